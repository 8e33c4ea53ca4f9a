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

"""Configuration and state types for the streaming key/value cache."""

import dataclasses
from typing import NamedTuple

from asymkv import base
from asymkv import quantizer

# Bytes charged per full-precision element (16-bit baseline).
RESIDUAL_BYTES = 2


@dataclasses.dataclass(frozen=True)
class CacheConfig:
  """Quantization settings of one per-head cache.

  Keys are grouped per-channel over blocks of group_size tokens and values
  per-token over blocks of group_size channels. The most recent tokens stay in
  full precision: keys until residual_length accumulate, values in a sliding
  window of residual_length tokens. With passthrough nothing is quantized.
  """
  bits: int = 2
  group_size: int = 32
  residual_length: int = 128
  head_dim: int = 128
  passthrough: bool = False

  def __post_init__(self):
    # Validates bits and group size.
    quantizer.QuantParams(self.bits, self.group_size)
    if self.residual_length < 1 or self.residual_length % self.group_size:
      raise base.ConfigError(
          f'residual_length={self.residual_length} must be a positive '
          f'multiple of group_size={self.group_size}.')
    if self.head_dim < 1 or self.head_dim % self.group_size:
      raise base.ConfigError(
          f'head_dim={self.head_dim} must be a positive multiple of '
          f'group_size={self.group_size}.')
    if not self.passthrough and self.bits not in quantizer.PACKED_BITS:
      raise base.ConfigError(
          f'bits={self.bits} cannot be stored packed; choose one of '
          f'{quantizer.PACKED_BITS}.')

  @property
  def key_params(self) -> quantizer.QuantParams:
    return quantizer.QuantParams(
        self.bits, self.group_size, base.QuantAxis.PER_CHANNEL)

  @property
  def value_params(self) -> quantizer.QuantParams:
    return quantizer.QuantParams(
        self.bits, self.group_size, base.QuantAxis.PER_TOKEN)


class KeyCacheState(NamedTuple):
  grouped: quantizer.QuantizedTensor  # Per-channel codes: [l - r, d]
  residual: base.Matrix  # Full precision keys: [r, d]
  total_tokens: int  # Tokens seen so far, l.
  num_flushes: int = 0  # Residual blocks moved into grouped during decode.


class ValueCacheState(NamedTuple):
  grouped: quantizer.QuantizedTensor  # Per-token codes: [l - r, d]
  residual: base.Matrix  # Most recent values, oldest first: [r, d]
  total_tokens: int


class KVCache(NamedTuple):
  """Key and value caches of a single (batch element, layer, head)."""
  keys: KeyCacheState
  values: ValueCacheState

  @property
  def total_tokens(self) -> int:
    return self.keys.total_tokens
