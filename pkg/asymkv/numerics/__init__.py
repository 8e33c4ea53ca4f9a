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
"""Exposing the public methods of the numerics layer."""

from asymkv.numerics.base import as_matrix
from asymkv.numerics.base import concat_rows
from asymkv.numerics.base import empty
from asymkv.numerics.base import frobenius
from asymkv.numerics.base import matmul
from asymkv.numerics.base import matmul_transposed
from asymkv.numerics.base import softmax_rows
from asymkv.numerics.base import take_rows
from asymkv.numerics.base import to_numpy
