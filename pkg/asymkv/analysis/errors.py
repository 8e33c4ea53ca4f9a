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

"""Relative error statistics of quantized keys, values and attention."""

from asymkv import base
from asymkv import numerics
from asymkv.analysis import base as analysis_base
import jax.numpy as jnp
import numpy as np

ErrorMode = analysis_base.ErrorMode


def relative_error(x: base.Matrix,
                   x_hat: base.Matrix,
                   mode: ErrorMode = ErrorMode.NORM_RATIO) -> float:
  """Relative error of x_hat as an estimate of x, reduced according to mode."""
  x = jnp.asarray(x, jnp.float32)
  x_hat = jnp.asarray(x_hat, jnp.float32)
  if x.shape != x_hat.shape:
    raise base.ShapeError(f'Shapes differ: {x.shape} vs {x_hat.shape}.')
  diff = x - x_hat
  if mode is ErrorMode.RATIO_NORM:
    ratio = diff / jnp.maximum(jnp.abs(x), analysis_base.EPSILON)
    return float(jnp.linalg.norm(ratio.reshape(-1)))
  if mode is ErrorMode.NORM_RATIO:
    denominator = max(numerics.frobenius(x.reshape(1, -1)),
                      analysis_base.EPSILON)
    return numerics.frobenius(diff.reshape(1, -1)) / denominator
  raise base.UsageError(f'mode={mode} not implemented.')


def attention_matrix(queries: base.Matrix,
                     keys: base.Matrix,
                     scale: bool = True) -> base.Matrix:
  """softmax(Q K^T), optionally with logits scaled by 1/sqrt(d)."""
  logits = numerics.matmul_transposed(queries, keys)
  if scale:
    logits = logits * jnp.float32(1. / np.sqrt(queries.shape[1]))
  return numerics.softmax_rows(logits)


def value_output_error(weights: base.Matrix,
                       values: base.Matrix,
                       values_hat: base.Matrix,
                       mode: ErrorMode = ErrorMode.NORM_RATIO) -> float:
  """Relative error of A V' against A V."""
  if values.shape != values_hat.shape:
    raise base.ShapeError(
        f'Shapes differ: {values.shape} vs {values_hat.shape}.')
  return relative_error(numerics.matmul(weights, values),
                        numerics.matmul(weights, values_hat), mode)


def attention_sparsity(
    weights: base.Matrix,
    threshold: float = analysis_base.SPARSITY_THRESHOLD) -> float:
  """Fraction of attention weights below threshold."""
  weights = jnp.asarray(weights)
  if not weights.size:
    return 0.
  return float(jnp.mean(weights < threshold))
