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

"""Inputs to one decode step of single-head attention."""

from typing import NamedTuple

from asymkv import base
from asymkv import numerics
import numpy.typing as npt


class DecodeInputs(NamedTuple):
  query: base.Matrix  # Current token query: [1, d]
  key: base.Matrix  # Current token key: [1, d]
  value: base.Matrix  # Current token value: [1, d]

  @classmethod
  def create(cls, query: npt.ArrayLike, key: npt.ArrayLike,
             value: npt.ArrayLike) -> 'DecodeInputs':
    """Validates and converts the three projections of one token."""
    inputs = cls(*(numerics.as_matrix(x) for x in (query, key, value)))
    shapes = {x.shape for x in inputs}
    if len(shapes) != 1 or inputs.query.shape[0] != 1:
      raise base.ShapeError(
          f'Decode inputs must be three [1, d] rows, got {sorted(shapes)}.')
    return inputs

  @property
  def head_dim(self) -> int:
    return self.query.shape[1]
