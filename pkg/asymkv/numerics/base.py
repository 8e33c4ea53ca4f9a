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

"""Dense float32 matrix operations every other module computes on."""

from typing import Sequence

from asymkv import base
import chex
import jax
import jax.numpy as jnp
import numpy as np
import numpy.typing as npt


def as_matrix(values: npt.ArrayLike, check_finite: bool = True) -> base.Matrix:
  """Converts external input to a float32 [rows, cols] matrix."""
  matrix = jnp.asarray(values, dtype=jnp.float32)
  if matrix.ndim == 1:
    matrix = matrix[None, :]
  if matrix.ndim != 2:
    raise base.ShapeError(f'Expected a 2-D matrix, got shape {matrix.shape}.')
  if check_finite and matrix.size and not bool(jnp.all(jnp.isfinite(matrix))):
    raise base.UsageError('Matrix contains NaN or Inf values.')
  return matrix


def empty(cols: int) -> base.Matrix:
  """Zero-row matrix, the identity for concat_rows."""
  return jnp.zeros([0, cols], dtype=jnp.float32)


def matmul(a: base.Matrix, b: base.Matrix) -> base.Matrix:
  """Standard product of [m, k] and [k, n] matrices."""
  chex.assert_rank([a, b], 2)
  if a.shape[1] != b.shape[0]:
    raise base.ShapeError(
        f'matmul inner dimensions differ: a={a.shape}, b={b.shape}.')
  return jnp.matmul(a, b)


def matmul_transposed(a: base.Matrix, b: base.Matrix) -> base.Matrix:
  """Computes a @ b.T for [m, k] and [n, k] matrices."""
  chex.assert_rank([a, b], 2)
  if a.shape[1] != b.shape[1]:
    raise base.ShapeError(
        f'matmul_transposed column counts differ: a={a.shape}, b={b.shape}.')
  return jnp.matmul(a, b.T)


def softmax_rows(m: base.Matrix) -> base.Matrix:
  """Row-wise softmax with per-row max subtraction."""
  chex.assert_rank(m, 2)
  return jax.nn.softmax(m, axis=-1)


def frobenius(m: base.Matrix) -> float:
  """Square root of the sum of squared entries."""
  return float(jnp.sqrt(jnp.sum(jnp.square(m))))


def take_rows(m: base.Matrix, start: int, stop: int) -> base.Matrix:
  """Rows [start, stop) of m, clipped to the valid range."""
  chex.assert_rank(m, 2)
  start = max(0, min(start, m.shape[0]))
  stop = max(start, min(stop, m.shape[0]))
  return m[start:stop]


def concat_rows(parts: Sequence[base.Matrix]) -> base.Matrix:
  """Stacks matrices along the token axis; empty parts are skipped."""
  if not parts:
    raise base.UsageError('concat_rows needs at least one matrix.')
  cols = {p.shape[1] for p in parts}
  if len(cols) != 1:
    raise base.ShapeError(f'Cannot concatenate column counts {sorted(cols)}.')
  non_empty = [p for p in parts if p.shape[0]]
  if not non_empty:
    return empty(parts[0].shape[1])
  if len(non_empty) == 1:
    return non_empty[0]
  return jnp.concatenate(non_empty, axis=0)


def to_numpy(m: base.Matrix) -> np.ndarray:
  """Host copy of a matrix as a float32 numpy array."""
  return np.asarray(m, dtype=np.float32)
