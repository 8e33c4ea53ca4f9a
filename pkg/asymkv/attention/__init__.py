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

"""Exposing the public methods of decode attention."""

# Base classes
from asymkv.attention.base import DecodeInputs

# Decode
from asymkv.attention.decode import attend
from asymkv.attention.decode import attention_weights
from asymkv.attention.decode import decode_attention
from asymkv.attention.decode import decode_step
from asymkv.attention.decode import reference_attention

# Fused kernels
from asymkv.attention.kernels import quantized_logits
from asymkv.attention.kernels import quantized_weighted_sum
