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

"""Base types and errors shared across asymkv."""

import enum
from typing import Optional

import chex

################################################################################
# Tensors

# Dense row-major float32 matrix of shape [tokens, channels].
Matrix = chex.Array


class QuantAxis(enum.Enum):
  """Axis along which consecutive elements share a zero-point and scale."""
  PER_TOKEN = 'per_token'  # Groups span G channels within one token.
  PER_CHANNEL = 'per_channel'  # Groups span G tokens within one channel.

  @property
  def short_label(self) -> str:
    """Single letter label, T for per-token and C for per-channel."""
    return 'T' if self is QuantAxis.PER_TOKEN else 'C'


################################################################################
# Errors


class AsymKVError(Exception):
  """Base class for every error raised by asymkv."""


class ShapeError(AsymKVError, ValueError):
  """Operand shapes are inconsistent with the requested operation."""


class UsageError(AsymKVError, ValueError):
  """An operation was called with arguments outside its contract."""


class ConfigError(AsymKVError, ValueError):
  """A configuration object violates one of its invariants."""


class FormatError(AsymKVError, ValueError):
  """A binary dump does not match the expected layout."""

  def __init__(self, message: str, offset: int):
    super().__init__(f'{message} (at byte offset {offset})')
    self.offset = offset


class BudgetError(AsymKVError, RuntimeError):
  """A cache footprint exceeded the configured memory budget."""

  def __init__(self, message: str, step: Optional[str] = None):
    if step is not None:
      message = f'{message} [step={step}]'
    super().__init__(message)
    self.step = step
