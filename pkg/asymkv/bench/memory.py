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

"""Closed-form cache memory of a workload and the batch it admits."""

from typing import Optional, Sequence, Tuple

from asymkv import base
from asymkv.bench import base as bench_base
from asymkv.kvcache import accounting
from asymkv.kvcache import base as kvcache_base

_SCALE_AND_ZERO = 2


def _check_config(spec: bench_base.WorkloadSpec,
                  cfg: kvcache_base.CacheConfig):
  if cfg.head_dim != spec.head_dim:
    raise base.ConfigError(
        f'Cache head_dim={cfg.head_dim} differs from workload '
        f'head_dim={spec.head_dim}.')


def cache_config(spec: bench_base.WorkloadSpec,
                 bits: int = 2,
                 group_size: int = 32,
                 residual_length: int = 128) -> kvcache_base.CacheConfig:
  return kvcache_base.CacheConfig(
      bits=bits, group_size=group_size, residual_length=residual_length,
      head_dim=spec.head_dim)


def _head_breakdown(num_tokens: int, cfg: kvcache_base.CacheConfig,
                    element_bytes: int) -> Tuple[int, int, int]:
  """(code, param, residual) bytes of one key plus value head cache."""
  d = cfg.head_dim
  key_grouped, key_residual, value_grouped, value_residual = (
      accounting.split_tokens(num_tokens, cfg))
  code_bytes = 0
  param_bytes = 0
  for grouped in (key_grouped, value_grouped):
    code_bytes += -(-grouped * d * cfg.bits // 8)
    param_bytes += (
        _SCALE_AND_ZERO * element_bytes * grouped * d // cfg.group_size)
  residual_bytes = element_bytes * (key_residual + value_residual) * d
  return code_bytes, param_bytes, residual_bytes


def estimate_memory(
    spec: bench_base.WorkloadSpec,
    cfg: Optional[kvcache_base.CacheConfig] = None,
    mode: bench_base.Mode = bench_base.Mode.QUANTIZED,
    weight_bytes: int = 0,
    lengths: Optional[Sequence[Tuple[int, int]]] = None,
) -> bench_base.MemoryEstimate:
  """Cache bytes once every request has generated all of its tokens.

  Args:
    spec: workload shape.
    cfg: quantization settings, required for Mode.QUANTIZED.
    mode: fp16 keeps every token at 16 bits.
    weight_bytes: model weight bytes added to the peak.
    lengths: optional (prompt_len, gen_len) per batch element; defaults to
      the workload's lengths for every element.

  Returns:
    The estimate, with the 16-bit baseline of the same workload.
  """
  copies = 1
  if lengths is None:
    # Identical requests: size one and scale by the batch.
    lengths = [(spec.prompt_len, spec.gen_len)]
    copies = spec.batch
  heads = spec.layers * spec.kv_heads * copies
  element_bytes = spec.bytes_per_element
  fp_bytes = 0
  code_bytes = param_bytes = residual_bytes = 0
  if mode is bench_base.Mode.QUANTIZED:
    if cfg is None:
      raise base.UsageError('Quantized estimates need a cache config.')
    _check_config(spec, cfg)
  for prompt_len, gen_len in lengths:
    total = prompt_len + gen_len
    fp_bytes += 2 * element_bytes * total * spec.head_dim * heads
    if mode is bench_base.Mode.QUANTIZED:
      codes, params, residual = _head_breakdown(total, cfg, element_bytes)
      code_bytes += codes * heads
      param_bytes += params * heads
      residual_bytes += residual * heads
  if mode is bench_base.Mode.FP16:
    residual_bytes = fp_bytes
  return bench_base.MemoryEstimate(
      mode=mode, fp_bytes=fp_bytes, code_bytes=code_bytes,
      param_bytes=param_bytes, residual_bytes=residual_bytes,
      weight_bytes=weight_bytes)


def max_batch_at_budget(spec: bench_base.WorkloadSpec,
                        budget_bytes: int,
                        cfg: Optional[kvcache_base.CacheConfig] = None,
                        mode: bench_base.Mode = bench_base.Mode.QUANTIZED,
                        weight_bytes: int = 0) -> int:
  """Largest batch whose estimated peak fits in budget_bytes."""

  def fits(batch: int) -> bool:
    estimate = estimate_memory(
        spec.replace(batch=batch), cfg, mode, weight_bytes)
    return estimate.peak_bytes <= budget_bytes

  if not fits(1):
    raise _single_request_error(spec, budget_bytes)
  low, high = 1, 2
  while fits(high):
    low, high = high, 2 * high
  # fits(low) and not fits(high).
  while high - low > 1:
    mid = (low + high) // 2
    if fits(mid):
      low = mid
    else:
      high = mid
  return low


def _single_request_error(spec: bench_base.WorkloadSpec,
                          budget_bytes: int) -> base.BudgetError:
  return base.BudgetError(
      f'A single request of {spec.total_len} tokens does not fit in '
      f'{budget_bytes} bytes.', step='max_batch')
