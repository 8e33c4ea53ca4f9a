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

"""Base types for group-wise asymmetric quantization."""

import dataclasses
from typing import NamedTuple

from asymkv import base
import chex

# Code widths that tile a byte exactly, so codes never straddle bytes.
PACKED_BITS = (1, 2, 4, 8)

# Bytes charged per group for each of the zero-point and the scale.
PARAM_BYTES = 2


@dataclasses.dataclass(frozen=True)
class QuantParams:
  """Bit width, group size and grouping axis of a quantizer."""
  bits: int
  group_size: int
  axis: base.QuantAxis = base.QuantAxis.PER_TOKEN

  def __post_init__(self):
    if not 1 <= self.bits <= 8:
      raise base.ConfigError(f'bits={self.bits} must lie in [1, 8].')
    if self.group_size < 1:
      raise base.ConfigError(f'group_size={self.group_size} must be >= 1.')
    if not isinstance(self.axis, base.QuantAxis):
      raise base.ConfigError(f'axis={self.axis} is not a QuantAxis.')

  @property
  def max_code(self) -> int:
    return (1 << self.bits) - 1

  @property
  def packable(self) -> bool:
    return self.bits in PACKED_BITS


class QuantizedTensor(NamedTuple):
  """Packed low-bit codes plus one zero-point and scale per group.

  Group layout is token-major for both axes, so appending tokens only ever
  appends codes and groups:
    per_token: group t * (cols / G) + j holds channels [j*G, (j+1)*G) of token
      t, which is exactly the row-major order of the matrix.
    per_channel: group i * cols + c holds tokens [i*G, (i+1)*G) of channel c.
  """
  codes: chex.Array  # Packed uint8 codes, first code in the low bits.
  zero_points: chex.Array  # Float32 zero-point per group: [num_groups]
  scales: chex.Array  # Float32 scale per group: [num_groups]
  rows: int  # Logical token count.
  cols: int  # Logical channel count.
  params: QuantParams

  @property
  def padded_rows(self) -> int:
    if self.params.axis is base.QuantAxis.PER_CHANNEL:
      return _round_up(self.rows, self.params.group_size)
    return self.rows

  @property
  def padded_cols(self) -> int:
    if self.params.axis is base.QuantAxis.PER_TOKEN:
      return _round_up(self.cols, self.params.group_size)
    return self.cols

  @property
  def num_codes(self) -> int:
    return self.padded_rows * self.padded_cols

  @property
  def num_groups(self) -> int:
    return self.num_codes // self.params.group_size

  @property
  def is_padded(self) -> bool:
    return (self.padded_rows, self.padded_cols) != (self.rows, self.cols)


def _round_up(extent: int, multiple: int) -> int:
  return -(-extent // multiple) * multiple
