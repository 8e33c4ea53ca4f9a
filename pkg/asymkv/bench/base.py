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

"""Workload, estimate and report types of the benchmark harness."""

import dataclasses
import enum
from typing import Any, Dict, List

from asymkv import base
from asymkv.kvcache import base as kvcache_base
import numpy as np


class Mode(enum.Enum):
  FP16 = 'fp16'  # Every token kept at 16 bits.
  QUANTIZED = 'quantized'  # Per-channel keys, per-token values, residuals.


@dataclasses.dataclass(frozen=True)
class WorkloadSpec:
  """Shape of a decode workload; the hidden size is kv_heads * head_dim."""
  batch: int = 1
  prompt_len: int = 161
  gen_len: int = 338
  layers: int = 1
  kv_heads: int = 1
  head_dim: int = 128
  bytes_per_element: int = 2

  def __post_init__(self):
    for field in dataclasses.fields(self):
      value = getattr(self, field.name)
      if not isinstance(value, int) or value < 1:
        raise base.ConfigError(f'{field.name}={value} must be an integer >= 1.')
    if self.bytes_per_element != kvcache_base.RESIDUAL_BYTES:
      raise base.ConfigError(
          f'bytes_per_element={self.bytes_per_element} is unsupported, caches '
          f'hold {kvcache_base.RESIDUAL_BYTES}-byte elements.')

  @property
  def hidden(self) -> int:
    return self.kv_heads * self.head_dim

  @property
  def total_len(self) -> int:
    return self.prompt_len + self.gen_len

  @property
  def num_caches(self) -> int:
    """Per-head caches held for the whole batch."""
    return self.batch * self.layers * self.kv_heads

  def replace(self, **changes) -> 'WorkloadSpec':
    return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class MemoryEstimate:
  """Cache bytes of a workload at the end of generation."""
  mode: Mode
  fp_bytes: int  # 16-bit baseline of the same workload.
  code_bytes: int
  param_bytes: int  # 16-bit zero-points and scales.
  residual_bytes: int  # 16-bit full-precision tokens.
  weight_bytes: int = 0

  @property
  def cache_bytes(self) -> int:
    return self.code_bytes + self.param_bytes + self.residual_bytes

  @property
  def compression_ratio(self) -> float:
    return self.fp_bytes / self.cache_bytes

  @property
  def peak_bytes(self) -> int:
    return self.cache_bytes + self.weight_bytes

  def to_dict(self) -> Dict[str, Any]:
    return {
        'mode': self.mode.value,
        'fp_bytes': self.fp_bytes,
        'cache_bytes': self.cache_bytes,
        'code_bytes': self.code_bytes,
        'param_bytes': self.param_bytes,
        'residual_bytes': self.residual_bytes,
        'compression_ratio': self.compression_ratio,
        'weight_bytes': self.weight_bytes,
        'peak_bytes': self.peak_bytes,
    }


@dataclasses.dataclass
class BenchmarkReport:
  """Outcome of one decode benchmark run."""
  mode: Mode
  tokens_generated: int
  elapsed_s: float
  final_cache_bytes: int  # Counted over every cache after the last step.
  peak_cache_bytes: int  # Largest count seen after prefill or any step.
  estimated_cache_bytes: int
  fp_cache_bytes: int
  latency_ms: np.ndarray  # Wall-clock per decode step: [num_steps]
  outputs: List[np.ndarray]  # Final layer output per element: [gen_len, d]

  @property
  def tokens_per_sec(self) -> float:
    return self.tokens_generated / max(self.elapsed_s, 1e-12)

  def latency_percentile(self, q: float) -> float:
    if not self.latency_ms.size:
      return 0.
    return float(np.percentile(self.latency_ms, q))

  def to_dict(self) -> Dict[str, Any]:
    return {
        'mode': self.mode.value,
        'tokens_generated': self.tokens_generated,
        'elapsed_s': self.elapsed_s,
        'tokens_per_sec': self.tokens_per_sec,
        'final_cache_bytes': self.final_cache_bytes,
        'peak_cache_bytes': self.peak_cache_bytes,
        'estimated_cache_bytes': self.estimated_cache_bytes,
        'fp_cache_bytes': self.fp_cache_bytes,
        'latency_p50_ms': self.latency_percentile(50),
        'latency_p90_ms': self.latency_percentile(90),
        'latency_p99_ms': self.latency_percentile(99),
    }
