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

"""Little-endian bit packing of low-bit codes into bytes."""

from asymkv import base
from asymkv.quantizer import base as quantizer_base
import chex
import jax.numpy as jnp


def _check_width(bits: int):
  if bits not in quantizer_base.PACKED_BITS:
    raise base.UsageError(
        f'bits={bits} cannot be packed without straddling bytes; '
        f'supported widths are {quantizer_base.PACKED_BITS}.')


def packed_length(num_codes: int, bits: int) -> int:
  """Number of bytes holding num_codes codes of the given width."""
  return -(-num_codes * bits // 8)


def pack_codes(codes: chex.Array, bits: int) -> chex.Array:
  """Packs codes into bytes, first code in the lowest-order bits of byte 0."""
  _check_width(bits)
  codes = jnp.asarray(codes).reshape(-1).astype(jnp.int32)
  if codes.size and (bool(jnp.any(codes < 0)) or
                     int(jnp.max(codes)) >= (1 << bits)):
    raise base.UsageError(f'Codes must lie in [0, {(1 << bits) - 1}].')
  per_byte = 8 // bits
  num_bytes = packed_length(codes.size, bits)
  padded = jnp.zeros([num_bytes * per_byte], jnp.int32).at[:codes.size].set(
      codes)
  shifts = jnp.arange(per_byte, dtype=jnp.int32) * bits
  shifted = jnp.left_shift(padded.reshape(num_bytes, per_byte), shifts)
  return jnp.sum(shifted, axis=1).astype(jnp.uint8)


def unpack_codes(packed: chex.Array, num_codes: int, bits: int) -> chex.Array:
  """Inverse of pack_codes, returning the first num_codes codes as uint8."""
  _check_width(bits)
  packed = jnp.asarray(packed, dtype=jnp.uint8).reshape(-1)
  if packed.size < packed_length(num_codes, bits):
    raise base.UsageError(
        f'{packed.size} bytes cannot hold {num_codes} codes of {bits} bits.')
  per_byte = 8 // bits
  shifts = jnp.arange(per_byte, dtype=jnp.int32) * bits
  mask = (1 << bits) - 1
  unpacked = jnp.bitwise_and(
      jnp.right_shift(packed.astype(jnp.int32)[:, None], shifts), mask)
  return unpacked.reshape(-1)[:num_codes].astype(jnp.uint8)
