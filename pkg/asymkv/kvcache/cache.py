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

"""Prefill and per-token decode updates of the streaming cache."""

from typing import Tuple, Union

from absl import logging
from asymkv import base
from asymkv import numerics
from asymkv import quantizer
from asymkv.kvcache import base as kvcache_base
import numpy.typing as npt

CacheConfig = kvcache_base.CacheConfig
KeyCacheState = kvcache_base.KeyCacheState
ValueCacheState = kvcache_base.ValueCacheState
KVCache = kvcache_base.KVCache


def _check_tokens(m: base.Matrix, cfg: CacheConfig, name: str):
  if m.shape[1] != cfg.head_dim:
    raise base.ShapeError(
        f'{name} has {m.shape[1]} channels, cache head_dim={cfg.head_dim}.')


def _quantize(m: base.Matrix,
              params: quantizer.QuantParams) -> quantizer.QuantizedTensor:
  if not m.shape[0]:
    return quantizer.empty_tensor(m.shape[1], params)
  return quantizer.quantize_matrix(m, params)


def prefill(
    keys: npt.ArrayLike, values: npt.ArrayLike, cfg: CacheConfig
) -> Tuple[KeyCacheState, ValueCacheState, base.Matrix, base.Matrix]:
  """Builds the caches from the prompt's keys and values.

  Keys keep the last l mod R tokens in full precision and quantize the rest
  per-channel. Values keep the last min(l, R) tokens and quantize the rest
  per-token.

  Args:
    keys: [l, d] prompt keys.
    values: [l, d] prompt values.
    cfg: cache configuration.

  Returns:
    (key_state, value_state, keys, values) where the last two are the exact
    inputs, for use by the layers that follow.
  """
  keys = numerics.as_matrix(keys)
  values = numerics.as_matrix(values)
  _check_tokens(keys, cfg, 'keys')
  _check_tokens(values, cfg, 'values')
  if keys.shape[0] != values.shape[0]:
    raise base.ShapeError(
        f'keys have {keys.shape[0]} tokens but values have {values.shape[0]}.')
  length = keys.shape[0]
  if not length:
    raise base.UsageError('prefill needs at least one prompt token.')

  if cfg.passthrough:
    key_split, value_split = 0, 0
  else:
    key_split = length - length % cfg.residual_length
    value_split = max(length - cfg.residual_length, 0)

  key_state = KeyCacheState(
      grouped=_quantize(numerics.take_rows(keys, 0, key_split),
                        cfg.key_params),
      residual=numerics.take_rows(keys, key_split, length),
      total_tokens=length,
  )
  value_state = ValueCacheState(
      grouped=_quantize(numerics.take_rows(values, 0, value_split),
                        cfg.value_params),
      residual=numerics.take_rows(values, value_split, length),
      total_tokens=length,
  )
  logging.vlog(1, 'Prefill of %d tokens: keys %d grouped, values %d grouped.',
               length, key_split, value_split)
  return key_state, value_state, keys, values


def append_key(state: KeyCacheState, token: base.Matrix,
               cfg: CacheConfig) -> KeyCacheState:
  """Adds one key; a residual reaching R is quantized and reset to empty."""
  residual = numerics.concat_rows([state.residual, token])
  state = state._replace(residual=residual,
                         total_tokens=state.total_tokens + 1)
  if cfg.passthrough or residual.shape[0] < cfg.residual_length:
    return state
  block = quantizer.quantize_matrix(residual, cfg.key_params)
  return state._replace(
      grouped=quantizer.concatenate(state.grouped, block),
      residual=numerics.empty(cfg.head_dim),
      num_flushes=state.num_flushes + 1,
  )


def append_value(state: ValueCacheState, token: base.Matrix,
                 cfg: CacheConfig) -> ValueCacheState:
  """Adds one value; the oldest token is quantized once R are exceeded."""
  residual = numerics.concat_rows([state.residual, token])
  state = state._replace(residual=residual,
                         total_tokens=state.total_tokens + 1)
  if cfg.passthrough or residual.shape[0] <= cfg.residual_length:
    return state
  oldest = quantizer.quantize_matrix(
      numerics.take_rows(residual, 0, 1), cfg.value_params)
  return state._replace(
      grouped=quantizer.concatenate(state.grouped, oldest),
      residual=numerics.take_rows(residual, 1, residual.shape[0]),
  )


def append_token(
    key_state: KeyCacheState, value_state: ValueCacheState,
    key: npt.ArrayLike, value: npt.ArrayLike,
    cfg: CacheConfig) -> Tuple[KeyCacheState, ValueCacheState]:
  """Appends one decoded token's key and value to the caches."""
  key = numerics.as_matrix(key)
  value = numerics.as_matrix(value)
  for name, token in (('key', key), ('value', value)):
    if token.shape[0] != 1:
      raise base.ShapeError(
          f'append_token takes one {name} row, got {token.shape[0]}.')
    _check_tokens(token, cfg, name)
  return (append_key(key_state, key, cfg),
          append_value(value_state, value, cfg))


def materialize_keys(state: KeyCacheState) -> base.Matrix:
  """Dequantized grouped keys followed by the residual, in token order."""
  return numerics.concat_rows(
      [quantizer.dequantize_matrix(state.grouped), state.residual])


def materialize_values(state: ValueCacheState) -> base.Matrix:
  """Dequantized grouped values followed by the residual, in token order."""
  return numerics.concat_rows(
      [quantizer.dequantize_matrix(state.grouped), state.residual])


def memory_bytes(
    state: Union[KeyCacheState, ValueCacheState, KVCache]) -> int:
  """Counted bytes: packed codes, 16-bit z and s, 16-bit residual elements."""
  if isinstance(state, KVCache):
    return memory_bytes(state.keys) + memory_bytes(state.values)
  residual = int(state.residual.size) * kvcache_base.RESIDUAL_BYTES
  return quantizer.nbytes(state.grouped) + residual


def token_counts(
    state: Union[KeyCacheState, ValueCacheState]) -> Tuple[int, int]:
  """(grouped, residual) token counts of one cache."""
  return state.grouped.rows, int(state.residual.shape[0])


def empty_cache(cfg: CacheConfig) -> KVCache:
  """Cache holding no tokens yet."""
  none = numerics.empty(cfg.head_dim)
  return KVCache(
      keys=KeyCacheState(
          quantizer.empty_tensor(cfg.head_dim, cfg.key_params), none, 0),
      values=ValueCacheState(
          quantizer.empty_tensor(cfg.head_dim, cfg.value_params), none, 0),
  )
