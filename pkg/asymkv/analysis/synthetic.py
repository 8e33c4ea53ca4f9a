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

"""Synthetic caches with the structure seen in real models.

Keys carry a few fixed channels of persistently large magnitude plus a
per-channel offset. Values carry a per-token offset and no channel structure.
Queries scaled up make the attention sparse.
"""

from typing import Optional, Sequence

from asymkv import base
import chex
import haiku as hk
import jax
import jax.numpy as jnp


def default_outlier_channels(head_dim: int) -> Sequence[int]:
  """Three channels spread across the head."""
  return tuple(sorted({head_dim // 8, head_dim // 2 + 3, 7 * head_dim // 8 + 1}
                      & set(range(head_dim))))


def make_outlier_keys(num_tokens: int,
                      head_dim: int,
                      seed: int = 0,
                      magnitude: float = 50.,
                      outlier_channels: Optional[Sequence[int]] = None,
                      ) -> base.Matrix:
  """Gaussian keys with channel offsets and a few large-magnitude channels."""
  if outlier_channels is None:
    outlier_channels = default_outlier_channels(head_dim)
  rng = hk.PRNGSequence(seed)
  noise = jax.random.normal(next(rng), [num_tokens, head_dim])
  offsets = jax.random.normal(next(rng), [head_dim])
  keys = noise + offsets[None, :]
  channels = jnp.asarray(outlier_channels, dtype=jnp.int32)
  if channels.size:
    signs = jnp.where(
        jax.random.bernoulli(next(rng), shape=[channels.size]), 1., -1.)
    wobble = jax.random.normal(next(rng), [num_tokens, channels.size])
    keys = keys.at[:, channels].set(magnitude * (signs + 0.1 * wobble))
  chex.assert_shape(keys, (num_tokens, head_dim))
  return keys


def make_token_offset_values(num_tokens: int,
                             head_dim: int,
                             seed: int = 0,
                             offset_scale: float = 2.) -> base.Matrix:
  """Gaussian values shifted by an independent offset per token."""
  rng = hk.PRNGSequence(seed)
  offsets = offset_scale * jax.random.normal(next(rng), [num_tokens, 1])
  return offsets + jax.random.normal(next(rng), [num_tokens, head_dim])


def make_queries(num_queries: int,
                 head_dim: int,
                 seed: int = 0,
                 query_scale: float = 3.) -> base.Matrix:
  return query_scale * jax.random.normal(
      jax.random.PRNGKey(seed), [num_queries, head_dim])


def make_sparse_attention(num_rows: int,
                          num_tokens: int,
                          seed: int = 0,
                          logit_scale: float = 4.) -> base.Matrix:
  """Softmax rows of scaled Gaussian logits; mass sits on few tokens."""
  logits = logit_scale * jax.random.normal(
      jax.random.PRNGKey(seed), [num_rows, num_tokens])
  return jax.nn.softmax(logits, axis=-1)
