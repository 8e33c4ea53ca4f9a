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

"""Products against packed tensors with dequantization folded into each tile.

Every tile covers one quantization group, so its zero-point and scale are
applied once per group instead of materializing the float matrix:
  sum_g a_g (c_g s + z) = s (sum_g a_g c_g) + z (sum_g a_g).
"""

from asymkv import base
from asymkv import quantizer
import chex
import jax.numpy as jnp


def quantized_logits(query: chex.Array,
                     keys: quantizer.QuantizedTensor) -> chex.Array:
  """query . k for every token k of per-channel quantized keys: [rows]."""
  if keys.params.axis is not base.QuantAxis.PER_CHANNEL:
    raise base.UsageError('quantized_logits expects per_channel keys.')
  query = query.reshape(-1)
  chex.assert_shape(query, [keys.cols])
  size = keys.params.group_size
  blocks = keys.padded_rows // size
  codes = quantizer.code_matrix(keys).reshape(blocks, keys.cols, size)
  scales = keys.scales.reshape(blocks, keys.cols)
  zero_points = keys.zero_points.reshape(blocks, keys.cols)
  # Tile [i, c, :] holds tokens i*G .. i*G + G - 1 of channel c.
  scaled_codes = codes.astype(jnp.float32) * scales[..., None]
  logits = (jnp.einsum('c,icg->ig', query, scaled_codes) +
            jnp.einsum('c,ic->i', query, zero_points)[:, None])
  return logits.reshape(-1)[:keys.rows]


def quantized_weighted_sum(weights: chex.Array,
                           values: quantizer.QuantizedTensor) -> chex.Array:
  """sum_t weights[t] v_t over per-token quantized values: [cols]."""
  if values.params.axis is not base.QuantAxis.PER_TOKEN:
    raise base.UsageError('quantized_weighted_sum expects per_token values.')
  weights = weights.reshape(-1)
  chex.assert_shape(weights, [values.rows])
  size = values.params.group_size
  groups_per_token = values.padded_cols // size
  codes = quantizer.code_matrix(values).reshape(
      values.rows, groups_per_token, size)
  scales = values.scales.reshape(values.rows, groups_per_token)
  zero_points = values.zero_points.reshape(values.rows, groups_per_token)
  scaled_codes = codes.astype(jnp.float32) * scales[..., None]
  out = (jnp.einsum('t,tjg->jg', weights, scaled_codes) +
         jnp.einsum('t,tj->j', weights, zero_points)[:, None])
  return out.reshape(-1)[:values.cols]
