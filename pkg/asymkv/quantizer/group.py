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

"""Round-to-nearest asymmetric quantization of individual groups.

Each group of G values shares a zero-point z = min and a scale
s = (max - min) / (2^B - 1). Codes are round((v - z) / s) with ties to even,
clipped to [0, 2^B - 1]. A constant group gets s = 1 and all-zero codes.
"""

from typing import Tuple

from asymkv import base
import chex
import jax.numpy as jnp
import numpy.typing as npt


def quantize_groups(
    groups: chex.Array, bits: int) -> Tuple[chex.Array, chex.Array, chex.Array]:
  """Quantizes a [num_groups, G] array, returning (codes, zero_points, scales).

  Every op here is elementwise or a per-group reduction, so quantizing a
  subset of groups gives the same bits as quantizing them inside a larger
  batch.
  """
  chex.assert_rank(groups, 2)
  groups = groups.astype(jnp.float32)
  max_code = (1 << bits) - 1
  if not groups.shape[0]:
    empty = jnp.zeros([0], jnp.float32)
    return jnp.zeros(groups.shape, jnp.uint8), empty, empty
  lo = jnp.min(groups, axis=1)
  hi = jnp.max(groups, axis=1)
  span = hi - lo
  scales = jnp.where(span > 0, span / max_code, jnp.float32(1.))
  codes = jnp.round((groups - lo[:, None]) / scales[:, None])
  codes = jnp.clip(codes, 0, max_code).astype(jnp.uint8)
  return codes, lo, scales


def dequantize_groups(codes: chex.Array,
                      zero_points: chex.Array,
                      scales: chex.Array) -> chex.Array:
  """Inverse map code * s + z over a [num_groups, G] code array."""
  chex.assert_rank(codes, 2)
  chex.assert_equal_shape([zero_points, scales])
  values = codes.astype(jnp.float32) * scales[:, None]
  return values + zero_points[:, None]


def quantize_group(
    values: npt.ArrayLike, bits: int) -> Tuple[chex.Array, float, float]:
  """Quantizes a single group of values to B-bit codes."""
  values = jnp.asarray(values, dtype=jnp.float32).reshape(-1)
  if not values.size:
    raise base.UsageError('Cannot quantize an empty group.')
  if not bool(jnp.all(jnp.isfinite(values))):
    raise base.UsageError('Group contains NaN or Inf values.')
  if not 1 <= bits <= 8:
    raise base.UsageError(f'bits={bits} must lie in [1, 8].')
  codes, zero_points, scales = quantize_groups(values[None, :], bits)
  return codes[0], float(zero_points[0]), float(scales[0])


def dequantize_group(codes: npt.ArrayLike, zero_point: float,
                     scale: float) -> chex.Array:
  codes = jnp.asarray(codes).reshape(1, -1)
  return dequantize_groups(
      codes, jnp.asarray([zero_point], jnp.float32),
      jnp.asarray([scale], jnp.float32))[0]
