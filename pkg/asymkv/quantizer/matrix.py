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

"""Group-wise quantization of whole matrices along the token or channel axis."""

from absl import logging
from asymkv import base
from asymkv.quantizer import base as quantizer_base
from asymkv.quantizer import group
from asymkv.quantizer import packing
import chex
import jax.numpy as jnp

QuantParams = quantizer_base.QuantParams
QuantizedTensor = quantizer_base.QuantizedTensor


def to_groups(m: base.Matrix, params: QuantParams) -> chex.Array:
  """Reshapes m into [num_groups, G] in the documented group order."""
  rows, cols = m.shape
  size = params.group_size
  if params.axis is base.QuantAxis.PER_TOKEN:
    return m.reshape(rows * cols // size, size)
  blocks = m.reshape(rows // size, size, cols)
  return jnp.transpose(blocks, (0, 2, 1)).reshape(-1, size)


def from_groups(groups: chex.Array, rows: int, cols: int,
                params: QuantParams) -> base.Matrix:
  """Inverse of to_groups for a matrix of the given (padded) extent."""
  size = params.group_size
  if params.axis is base.QuantAxis.PER_TOKEN:
    return groups.reshape(rows, cols)
  blocks = groups.reshape(rows // size, cols, size)
  return jnp.transpose(blocks, (0, 2, 1)).reshape(rows, cols)


def _pad_grouped_axis(m: base.Matrix, params: QuantParams) -> base.Matrix:
  rows, cols = m.shape
  size = params.group_size
  if params.axis is base.QuantAxis.PER_CHANNEL:
    return jnp.pad(m, ((0, -rows % size), (0, 0)))
  return jnp.pad(m, ((0, 0), (0, -cols % size)))


def _grouped_extent(m: base.Matrix, params: QuantParams) -> int:
  if params.axis is base.QuantAxis.PER_CHANNEL:
    return m.shape[0]
  return m.shape[1]


def quantize_matrix(m: base.Matrix,
                    params: QuantParams,
                    pad: bool = False) -> QuantizedTensor:
  """Quantizes m into packed codes with one (z, s) pair per group.

  Args:
    m: [rows, cols] float matrix.
    params: bit width, group size and axis. Bits must be packable.
    pad: zero-pad the grouped axis up to a multiple of G instead of raising.

  Returns:
    QuantizedTensor whose logical extent is the extent of m.
  """
  chex.assert_rank(m, 2)
  if not params.packable:
    raise base.UsageError(
        f'bits={params.bits} has no packed layout; use fake_quantize.')
  logical_rows, logical_cols = m.shape
  extent = _grouped_extent(m, params)
  if extent % params.group_size:
    if not pad:
      name = 'rows' if params.axis is base.QuantAxis.PER_CHANNEL else 'cols'
      raise base.ShapeError(
          f'{params.axis.value} grouping needs {name}={extent} divisible by '
          f'group_size={params.group_size}.')
    m = _pad_grouped_axis(m, params)
  codes, zero_points, scales = group.quantize_groups(
      to_groups(m.astype(jnp.float32), params), params.bits)
  return QuantizedTensor(
      codes=packing.pack_codes(codes, params.bits),
      zero_points=zero_points,
      scales=scales,
      rows=logical_rows,
      cols=logical_cols,
      params=params,
  )


def code_matrix(qt: QuantizedTensor) -> chex.Array:
  """Unpacked uint8 codes as [num_groups, G] in group order."""
  codes = packing.unpack_codes(qt.codes, qt.num_codes, qt.params.bits)
  return codes.reshape(qt.num_groups, qt.params.group_size)


def dequantize_matrix(qt: QuantizedTensor) -> base.Matrix:
  """Reconstructs the [rows, cols] matrix, dropping any padding."""
  groups = group.dequantize_groups(
      code_matrix(qt), qt.zero_points, qt.scales)
  full = from_groups(groups, qt.padded_rows, qt.padded_cols, qt.params)
  return full[:qt.rows, :qt.cols]


def concatenate(first: QuantizedTensor,
                second: QuantizedTensor) -> QuantizedTensor:
  """Appends the tokens of second after those of first.

  Both layouts are token-major, so the result holds the codes and groups of
  first followed by those of second. This equals quantizing the stacked
  matrix directly whenever first ends on a group boundary.
  """
  if first.params != second.params:
    raise base.UsageError(
        f'Cannot concatenate {first.params} with {second.params}.')
  if first.cols != second.cols:
    raise base.ShapeError(
        f'Cannot concatenate cols={first.cols} with cols={second.cols}.')
  if first.is_padded or second.is_padded:
    raise base.UsageError('Padded tensors cannot be concatenated.')
  bits = first.params.bits
  if (first.num_codes * bits) % 8 == 0:
    codes = jnp.concatenate([first.codes, second.codes])
  else:
    codes = packing.pack_codes(
        jnp.concatenate([
            packing.unpack_codes(first.codes, first.num_codes, bits),
            packing.unpack_codes(second.codes, second.num_codes, bits),
        ]), bits)
  return QuantizedTensor(
      codes=codes,
      zero_points=jnp.concatenate([first.zero_points, second.zero_points]),
      scales=jnp.concatenate([first.scales, second.scales]),
      rows=first.rows + second.rows,
      cols=first.cols,
      params=first.params,
  )


def empty_tensor(cols: int, params: QuantParams) -> QuantizedTensor:
  """Zero-token tensor, the identity for concatenate."""
  if params.axis is base.QuantAxis.PER_TOKEN and cols % params.group_size:
    raise base.ShapeError(
        f'cols={cols} not divisible by group_size={params.group_size}.')
  none = jnp.zeros([0], jnp.float32)
  return QuantizedTensor(
      codes=jnp.zeros([0], jnp.uint8), zero_points=none, scales=none,
      rows=0, cols=cols, params=params)


def fake_quantize(m: base.Matrix, params: QuantParams) -> base.Matrix:
  """Quantize-then-dequantize, zero-padding the grouped axis as needed.

  Works for every bit width in [1, 8] since codes are never packed.
  """
  chex.assert_rank(m, 2)
  rows, cols = m.shape
  if not m.size:
    return m.astype(jnp.float32)
  if _grouped_extent(m, params) % params.group_size:
    logging.log_first_n(
        logging.INFO, 'Zero-padding %s axis of %s to group_size=%d.', 1,
        params.axis.value, m.shape, params.group_size)
  padded = _pad_grouped_axis(m.astype(jnp.float32), params)
  codes, zero_points, scales = group.quantize_groups(
      to_groups(padded, params), params.bits)
  values = group.dequantize_groups(codes, zero_points, scales)
  full = from_groups(values, padded.shape[0], padded.shape[1], params)
  return full[:rows, :cols]


def nbytes(qt: QuantizedTensor) -> int:
  """Packed code bytes plus 16-bit zero-point and scale per group."""
  return int(qt.codes.size) + 2 * quantizer_base.PARAM_BYTES * qt.num_groups
