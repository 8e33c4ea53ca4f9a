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

"""Decode-phase attention of one token over the mixed-precision cache."""

from typing import Tuple

from asymkv import base
from asymkv import kvcache
from asymkv import numerics
from asymkv.attention import base as attention_base
from asymkv.attention import kernels
import chex
import jax.numpy as jnp
import numpy as np

DecodeInputs = attention_base.DecodeInputs


def _scale_logits(logits: chex.Array, head_dim: int,
                  scale: bool) -> chex.Array:
  if not scale:
    return logits
  return logits * jnp.float32(1. / np.sqrt(head_dim))


def reference_attention(query: base.Matrix,
                        keys: base.Matrix,
                        values: base.Matrix,
                        scale: bool = True) -> base.Matrix:
  """softmax(q K^T) V in full precision, returned as a [1, d] row."""
  query = numerics.as_matrix(query)
  if keys.shape[0] != values.shape[0]:
    raise base.ShapeError(
        f'{keys.shape[0]} keys but {values.shape[0]} values.')
  logits = numerics.matmul_transposed(query, keys)
  weights = numerics.softmax_rows(
      _scale_logits(logits, query.shape[1], scale))
  return numerics.matmul(weights, values)


def _logits(query: base.Matrix, state: kvcache.KeyCacheState) -> chex.Array:
  """Concatenated [1, l] logits: grouped keys first, then the residual."""
  grouped = kernels.quantized_logits(query, state.grouped)
  residual = numerics.matmul_transposed(query, state.residual)
  return jnp.concatenate([grouped[None, :], residual], axis=1)


def attention_weights(query: base.Matrix,
                      state: kvcache.KeyCacheState,
                      scale: bool = True) -> chex.Array:
  """Softmax weights of query over every cached key, as a [1, l] row."""
  query = numerics.as_matrix(query)
  if query.shape[1] != state.residual.shape[1]:
    raise base.ShapeError(
        f'query has {query.shape[1]} channels, keys have '
        f'{state.residual.shape[1]}.')
  logits = _scale_logits(_logits(query, state), query.shape[1], scale)
  return numerics.softmax_rows(logits)


def attend(query: base.Matrix,
           key_state: kvcache.KeyCacheState,
           value_state: kvcache.ValueCacheState,
           scale: bool = True) -> base.Matrix:
  """Attention output of query over the caches without updating them."""
  weights = attention_weights(query, key_state, scale)
  num_tokens = key_state.total_tokens
  chex.assert_shape(weights, (1, num_tokens))
  # Values split at their own boundary, which differs from the keys'.
  grouped = value_state.grouped.rows
  out = kernels.quantized_weighted_sum(weights[0, :grouped],
                                       value_state.grouped)
  return out[None, :] + numerics.matmul(weights[:, grouped:],
                                        value_state.residual)


def decode_attention(
    inputs: DecodeInputs,
    key_state: kvcache.KeyCacheState,
    value_state: kvcache.ValueCacheState,
    cfg: kvcache.CacheConfig,
    scale: bool = True,
) -> Tuple[base.Matrix, kvcache.KeyCacheState, kvcache.ValueCacheState]:
  """Appends the token's key and value, then attends over every token.

  Args:
    inputs: query, key and value of the current token.
    key_state: key cache before this token.
    value_state: value cache before this token.
    cfg: cache configuration.
    scale: multiply logits by 1/sqrt(d) before the softmax.

  Returns:
    ([1, d] attention output, updated key state, updated value state).
  """
  if inputs.head_dim != cfg.head_dim:
    raise base.ShapeError(
        f'Inputs have d={inputs.head_dim}, cache head_dim={cfg.head_dim}.')
  key_state, value_state = kvcache.append_token(
      key_state, value_state, inputs.key, inputs.value, cfg)
  out = attend(inputs.query, key_state, value_state, scale)
  return out, key_state, value_state


def decode_step(cache: kvcache.KVCache,
                inputs: DecodeInputs,
                cfg: kvcache.CacheConfig,
                scale: bool = True) -> Tuple[base.Matrix, kvcache.KVCache]:
  """decode_attention over a paired cache."""
  out, key_state, value_state = decode_attention(
      inputs, cache.keys, cache.values, cfg, scale)
  return out, kvcache.KVCache(key_state, value_state)
