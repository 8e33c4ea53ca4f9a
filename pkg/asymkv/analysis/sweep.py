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

"""Sweeps over quantization axes, bit widths and cache settings."""

import itertools
from typing import List, Sequence, Tuple

from absl import logging
from asymkv import attention
from asymkv import base
from asymkv import kvcache
from asymkv import numerics
from asymkv import quantizer
from asymkv.analysis import base as analysis_base
from asymkv.analysis import errors
import jax.numpy as jnp
import pandas as pd

ErrorMode = analysis_base.ErrorMode
ErrorReport = analysis_base.ErrorReport

_AXES = (base.QuantAxis.PER_TOKEN, base.QuantAxis.PER_CHANNEL)


def _check_shapes(keys: base.Matrix, values: base.Matrix,
                  queries: base.Matrix):
  if keys.shape != values.shape:
    raise base.ShapeError(
        f'keys {keys.shape} and values {values.shape} differ.')
  if queries.shape[1] != keys.shape[1]:
    raise base.ShapeError(
        f'queries have {queries.shape[1]} channels, keys {keys.shape[1]}.')


def _warn_constant_groups(name: str, m: base.Matrix,
                          params: quantizer.QuantParams):
  """Logs how many groups of m have max == min."""
  rows, cols = m.shape
  extent = rows if params.axis is base.QuantAxis.PER_CHANNEL else cols
  if not m.size or extent % params.group_size:
    return
  groups = quantizer.to_groups(m, params)
  constant = int(jnp.sum(jnp.max(groups, axis=1) == jnp.min(groups, axis=1)))
  if constant:
    logging.warning('%d of %d %s groups of the %ss are constant.',
                    constant, groups.shape[0], params.axis.value, name)


def quadrant_sweep(keys: base.Matrix,
                   values: base.Matrix,
                   queries: base.Matrix,
                   bits: int,
                   group_size: int,
                   mode: ErrorMode = ErrorMode.NORM_RATIO,
                   scale: bool = True,
                   threshold: float = analysis_base.SPARSITY_THRESHOLD,
                   ) -> List[ErrorReport]:
  """Fake-quantizes K and V along each pair of axes and measures the damage.

  Args:
    keys: [l, d] exact keys.
    values: [l, d] exact values.
    queries: [n, d] queries attending over all l tokens.
    bits: bit width of both caches.
    group_size: elements sharing a zero-point and scale.
    mode: reduction of the relative errors.
    scale: scale logits by 1/sqrt(d).
    threshold: weight below which attention counts as sparse.

  Returns:
    Four reports sorted by value output error, then attention score error.
  """
  keys, values, queries = (numerics.as_matrix(x)
                           for x in (keys, values, queries))
  _check_shapes(keys, values, queries)
  weights = errors.attention_matrix(queries, keys, scale)
  exact = numerics.matmul(weights, values)
  sparsity = errors.attention_sparsity(weights, threshold)

  fake_keys, fake_values = {}, {}
  for axis in _AXES:
    params = quantizer.QuantParams(bits, group_size, axis)
    _warn_constant_groups('key', keys, params)
    _warn_constant_groups('value', values, params)
    fake_keys[axis] = quantizer.fake_quantize(keys, params)
    fake_values[axis] = quantizer.fake_quantize(values, params)

  reports = []
  for key_axis, value_axis in itertools.product(_AXES, _AXES):
    weights_hat = errors.attention_matrix(queries, fake_keys[key_axis], scale)
    output = numerics.matmul(weights_hat, fake_values[value_axis])
    reports.append(ErrorReport(
        key_axis=key_axis,
        value_axis=value_axis,
        bits=bits,
        mode=mode,
        key_recon_err=errors.relative_error(keys, fake_keys[key_axis], mode),
        attn_score_err=errors.relative_error(weights, weights_hat, mode),
        value_recon_err=errors.relative_error(
            values, fake_values[value_axis], mode),
        value_output_err=errors.value_output_error(
            weights, values, fake_values[value_axis], mode),
        output_err=errors.relative_error(exact, output, mode),
        attention_sparsity=sparsity,
    ))
  return sorted(reports,
                key=lambda r: (r.value_output_err, r.attn_score_err))


def quadrant_table(keys: base.Matrix,
                   values: base.Matrix,
                   queries: base.Matrix,
                   bits: int,
                   group_size: int,
                   mode: ErrorMode = ErrorMode.NORM_RATIO,
                   scale: bool = True) -> pd.DataFrame:
  """Quadrant reports as a table led by the full-precision row.

  Below 4 bits a 4-bit per-token row is added for reference.
  """
  reports = quadrant_sweep(keys, values, queries, bits, group_size, mode,
                           scale)
  if bits < 4:
    reference = quadrant_sweep(keys, values, queries, 4, group_size, mode,
                               scale)
    reports = [r for r in reference
               if r.key_axis is r.value_axis is base.QuantAxis.PER_TOKEN
               ] + reports
  full = {
      'config': '16bit', 'bits': 16, 'mode': mode.value, 'key_recon_err': 0.,
      'attn_score_err': 0., 'value_recon_err': 0., 'value_output_err': 0.,
      'output_err': 0., 'combined_error': 0.,
      'attention_sparsity': reports[0].attention_sparsity,
  }
  return pd.DataFrame([full] + [r.to_dict() for r in reports])


def stream_decode(
    keys: base.Matrix,
    values: base.Matrix,
    queries: base.Matrix,
    cfg: kvcache.CacheConfig,
    scale: bool = True,
) -> Tuple[List[base.Matrix], List[base.Matrix], kvcache.KVCache]:
  """Prefills all but the last n tokens, then decodes them one by one.

  Args:
    keys: [l, d] exact keys.
    values: [l, d] exact values.
    queries: [n, d] queries of the last n tokens, n < l.
    cfg: cache configuration.
    scale: scale logits by 1/sqrt(d).

  Returns:
    (cache outputs, exact outputs, final cache).
  """
  keys, values, queries = (numerics.as_matrix(x)
                           for x in (keys, values, queries))
  _check_shapes(keys, values, queries)
  prompt_len = keys.shape[0] - queries.shape[0]
  if prompt_len < 1:
    raise base.UsageError(
        f'{queries.shape[0]} queries leave no prompt among '
        f'{keys.shape[0]} tokens.')
  key_state, value_state, _, _ = kvcache.prefill(
      keys[:prompt_len], values[:prompt_len], cfg)
  cache = kvcache.KVCache(key_state, value_state)
  outputs, exact = [], []
  for step in range(queries.shape[0]):
    token = prompt_len + step
    inputs = attention.DecodeInputs.create(
        queries[step], keys[token], values[token])
    out, cache = attention.decode_step(cache, inputs, cfg, scale)
    outputs.append(out)
    exact.append(attention.reference_attention(
        queries[step], keys[:token + 1], values[:token + 1], scale))
  return outputs, exact, cache


def window_study(keys: base.Matrix,
                 values: base.Matrix,
                 queries: base.Matrix,
                 cfg: kvcache.CacheConfig,
                 mode: ErrorMode = ErrorMode.NORM_RATIO,
                 scale: bool = True) -> pd.DataFrame:
  """Streaming cache against fake quantization of every token, per step.

  Both quantize keys per-channel and values per-token; only the streaming
  cache keeps its most recent tokens in full precision.
  """
  keys, values, queries = (numerics.as_matrix(x)
                           for x in (keys, values, queries))
  outputs, exact, _ = stream_decode(keys, values, queries, cfg, scale)
  prompt_len = keys.shape[0] - len(outputs)
  records = []
  for step, (out, target) in enumerate(zip(outputs, exact)):
    total = prompt_len + step + 1
    fake_out = attention.reference_attention(
        queries[step],
        quantizer.fake_quantize(keys[:total], cfg.key_params),
        quantizer.fake_quantize(values[:total], cfg.value_params),
        scale)
    _, key_residual, _, value_residual = kvcache.split_tokens(total, cfg)
    records.append({
        'step': step,
        'total_tokens': total,
        'key_residual': key_residual,
        'value_residual': value_residual,
        'streaming_err': errors.relative_error(target, out, mode),
        'fake_quant_err': errors.relative_error(target, fake_out, mode),
    })
  return pd.DataFrame(records)


def ablation_sweep(keys: base.Matrix,
                   values: base.Matrix,
                   queries: base.Matrix,
                   bits: int = 2,
                   group_sizes: Sequence[int] = (32, 64, 128),
                   residual_lengths: Sequence[int] = (32, 64, 96, 128),
                   mode: ErrorMode = ErrorMode.NORM_RATIO,
                   scale: bool = True) -> pd.DataFrame:
  """Decode error and cache bytes over group sizes and residual lengths."""
  head_dim = numerics.as_matrix(keys).shape[1]
  records = []
  for group_size, residual in itertools.product(group_sizes,
                                                residual_lengths):
    if residual % group_size or head_dim % group_size:
      logging.info('Skipping group_size=%d residual_length=%d.', group_size,
                   residual)
      continue
    cfg = kvcache.CacheConfig(bits=bits, group_size=group_size,
                              residual_length=residual, head_dim=head_dim)
    outputs, exact, cache = stream_decode(keys, values, queries, cfg, scale)
    step_errors = [errors.relative_error(t, o, mode)
                   for o, t in zip(outputs, exact)]
    counted = kvcache.memory_bytes(cache)
    full_precision = 2 * kvcache.RESIDUAL_BYTES * cache.total_tokens * head_dim
    records.append({
        'group_size': group_size,
        'residual_length': residual,
        'output_err': sum(step_errors) / len(step_errors),
        'memory_bytes': counted,
        'compression': full_precision / counted,
    })
  return pd.DataFrame(records)
