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

"""Closed-form token and byte accounting of a single-head cache."""

from typing import Tuple

from asymkv import quantizer
from asymkv.kvcache import base as kvcache_base
import pandas as pd


def split_tokens(num_tokens: int,
                 cfg: kvcache_base.CacheConfig) -> Tuple[int, int, int, int]:
  """(key grouped, key residual, value grouped, value residual) token counts.

  Holds for any mix of prefill and single-token appends that reaches
  num_tokens tokens, since key flushes land on multiples of R.
  """
  if cfg.passthrough:
    return 0, num_tokens, 0, num_tokens
  key_residual = num_tokens % cfg.residual_length
  value_residual = min(num_tokens, cfg.residual_length)
  return (num_tokens - key_residual, key_residual,
          num_tokens - value_residual, value_residual)


def grouped_bytes(num_tokens: int, cfg: kvcache_base.CacheConfig) -> int:
  """Bytes of num_tokens quantized tokens, codes plus 16-bit z and s."""
  elements = num_tokens * cfg.head_dim
  codes = quantizer.packed_length(elements, cfg.bits)
  groups = elements // cfg.group_size
  return codes + 2 * quantizer.PARAM_BYTES * groups


def expected_memory_bytes(num_tokens: int,
                          cfg: kvcache_base.CacheConfig) -> int:
  """Bytes memory_bytes reports for a key plus value cache of num_tokens."""
  key_grouped, key_residual, value_grouped, value_residual = split_tokens(
      num_tokens, cfg)
  residual_elements = (key_residual + value_residual) * cfg.head_dim
  return (grouped_bytes(key_grouped, cfg) + grouped_bytes(value_grouped, cfg) +
          kvcache_base.RESIDUAL_BYTES * residual_elements)


def residual_window_stats(cfg: kvcache_base.CacheConfig,
                          steps: int,
                          prompt_len: int = 1) -> pd.DataFrame:
  """Full-precision window sizes after each of steps decode appends."""
  records = []
  for step in range(1, steps + 1):
    total = prompt_len + step
    _, key_residual, _, value_residual = split_tokens(total, cfg)
    records.append({
        'step': step,
        'total_tokens': total,
        'key_residual': key_residual,
        'value_residual': value_residual,
    })
  return pd.DataFrame(records)
