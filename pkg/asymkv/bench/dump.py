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

"""Binary dump of captured keys or values.

Layout, little-endian: the magic b'KVQD', a u32 version, a u8 dtype code
(0 is float32), a u8 rank in [1, 3], one u64 per dimension, then the float32
payload in row-major order.
"""

import math
from typing import List, Sequence, Union

from asymkv import base
from asymkv import numerics
import numpy as np
import numpy.typing as npt

MAGIC = b'KVQD'
VERSION = 1
FLOAT32 = 0
_PREFIX_BYTES = 10  # magic, version, dtype and rank.


def header_bytes(ndim: int) -> int:
  return _PREFIX_BYTES + 8 * ndim


def encode(tensor: npt.ArrayLike) -> bytes:
  """Serializes an array of rank 1 to 3."""
  array = np.asarray(tensor, dtype=np.float32)
  if not 1 <= array.ndim <= 3:
    raise base.ShapeError(f'Dumps hold rank 1 to 3, got shape {array.shape}.')
  header = (MAGIC + np.asarray([VERSION], '<u4').tobytes() +
            bytes([FLOAT32, array.ndim]) +
            np.asarray(array.shape, '<u8').tobytes())
  return header + array.astype('<f4').tobytes()


def decode(data: bytes) -> np.ndarray:
  """Parses a dump, raising FormatError at the first bad byte offset."""
  for offset, (got, want) in enumerate(zip(data[:4], MAGIC)):
    if got != want:
      raise base.FormatError(f'Bad magic {data[:4]!r}.', offset=offset)
  if len(data) < _PREFIX_BYTES:
    raise base.FormatError('Truncated header.', offset=len(data))
  version = int(np.frombuffer(data, '<u4', count=1, offset=4)[0])
  if version != VERSION:
    raise base.FormatError(f'Unsupported version {version}.', offset=4)
  if data[8] != FLOAT32:
    raise base.FormatError(f'Unsupported dtype code {data[8]}.', offset=8)
  ndim = data[9]
  if not 1 <= ndim <= 3:
    raise base.FormatError(f'Unsupported rank {ndim}.', offset=9)
  payload_start = header_bytes(ndim)
  if len(data) < payload_start:
    raise base.FormatError('Truncated dimensions.', offset=len(data))
  shape = tuple(
      int(n) for n in np.frombuffer(data, '<u8', count=ndim,
                                    offset=_PREFIX_BYTES))
  payload_bytes = 4 * math.prod(shape)
  end = payload_start + payload_bytes
  if len(data) < end:
    raise base.FormatError(
        f'Truncated payload, expected {payload_bytes} bytes.',
        offset=len(data))
  if len(data) > end:
    raise base.FormatError('Trailing bytes after payload.', offset=end)
  if not payload_bytes:
    return np.zeros(shape, np.float32)
  payload = np.frombuffer(
      data, '<f4', count=payload_bytes // 4, offset=payload_start)
  return payload.astype(np.float32).reshape(shape)


def to_matrices(array: np.ndarray) -> List[base.Matrix]:
  """A 1-D dump is one row, 2-D one matrix, 3-D one matrix per head."""
  if array.ndim == 3:
    return [numerics.as_matrix(head) for head in array]
  return [numerics.as_matrix(array)]


def write_dump(path: str,
               tensors: Union[npt.ArrayLike, Sequence[base.Matrix]]):
  """Writes one array, or equally shaped matrices stacked by head."""
  if isinstance(tensors, (list, tuple)):
    tensors = np.stack([numerics.to_numpy(t) for t in tensors])
  with open(path, 'wb') as f:
    f.write(encode(tensors))


def read_dump(path: str) -> List[base.Matrix]:
  with open(path, 'rb') as f:
    return to_matrices(decode(f.read()))
