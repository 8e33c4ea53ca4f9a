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

"""Exposing the public methods of the quantizer."""

# Base classes
from asymkv.quantizer.base import PACKED_BITS
from asymkv.quantizer.base import PARAM_BYTES
from asymkv.quantizer.base import QuantizedTensor
from asymkv.quantizer.base import QuantParams

# Groups
from asymkv.quantizer.group import dequantize_group
from asymkv.quantizer.group import dequantize_groups
from asymkv.quantizer.group import quantize_group
from asymkv.quantizer.group import quantize_groups

# Matrices
from asymkv.quantizer.matrix import code_matrix
from asymkv.quantizer.matrix import concatenate
from asymkv.quantizer.matrix import dequantize_matrix
from asymkv.quantizer.matrix import empty_tensor
from asymkv.quantizer.matrix import fake_quantize
from asymkv.quantizer.matrix import from_groups
from asymkv.quantizer.matrix import nbytes
from asymkv.quantizer.matrix import quantize_matrix
from asymkv.quantizer.matrix import to_groups

# Packing
from asymkv.quantizer.packing import pack_codes
from asymkv.quantizer.packing import packed_length
from asymkv.quantizer.packing import unpack_codes
