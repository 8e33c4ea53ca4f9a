# pylint: disable=g-bad-file-header
# Copyright 2024 The asymkv Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or  implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ============================================================================

"""Exposing the public methods of the analysis tools."""

# Base classes
from asymkv.analysis.base import ChannelProfile
from asymkv.analysis.base import EPSILON
from asymkv.analysis.base import ErrorMode
from asymkv.analysis.base import ErrorReport
from asymkv.analysis.base import SPARSITY_THRESHOLD

# Errors
from asymkv.analysis.errors import attention_matrix
from asymkv.analysis.errors import attention_sparsity
from asymkv.analysis.errors import relative_error
from asymkv.analysis.errors import value_output_error

# Profiles
from asymkv.analysis.profile import channel_profile
from asymkv.analysis.profile import make_profile_df
from asymkv.analysis.profile import make_profile_plot

# Sweeps
from asymkv.analysis.sweep import ablation_sweep
from asymkv.analysis.sweep import quadrant_sweep
from asymkv.analysis.sweep import quadrant_table
from asymkv.analysis.sweep import stream_decode
from asymkv.analysis.sweep import window_study

# Synthetic data
from asymkv.analysis.synthetic import default_outlier_channels
from asymkv.analysis.synthetic import make_outlier_keys
from asymkv.analysis.synthetic import make_queries
from asymkv.analysis.synthetic import make_sparse_attention
from asymkv.analysis.synthetic import make_token_offset_values
