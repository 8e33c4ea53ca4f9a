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

"""Report types for quantization error analysis."""

import dataclasses
import enum
from typing import Any, Dict, Sequence

from asymkv import base
import numpy as np

# Threshold below which a softmax weight counts as negligible.
SPARSITY_THRESHOLD = 1e-3

# Denominator clamp of elementwise relative errors.
EPSILON = 1e-6


class ErrorMode(enum.Enum):
  """How a relative error between x and its estimate is reduced to a float."""
  NORM_RATIO = 'norm_ratio'  # ||x - x'||_F / ||x||_F
  RATIO_NORM = 'ratio_norm'  # ||(x - x') / max(|x|, eps)||_F


@dataclasses.dataclass(frozen=True)
class ErrorReport:
  """Errors of one key-axis by value-axis fake quantization configuration."""
  key_axis: base.QuantAxis
  value_axis: base.QuantAxis
  bits: int
  mode: ErrorMode
  key_recon_err: float
  attn_score_err: float
  value_recon_err: float
  value_output_err: float  # Error of A V with exact attention weights A.
  output_err: float  # Error of softmax(Q K'^T) V' against the exact output.
  attention_sparsity: float

  @property
  def config(self) -> str:
    return (f'K - {self.key_axis.short_label}, '
            f'V - {self.value_axis.short_label}')

  @property
  def label(self) -> str:
    return f'{self.bits}bit ({self.config})'

  @property
  def combined_error(self) -> float:
    return self.attn_score_err + self.value_output_err

  def to_dict(self) -> Dict[str, Any]:
    return {
        'config': self.label,
        'bits': self.bits,
        'mode': self.mode.value,
        'key_recon_err': self.key_recon_err,
        'attn_score_err': self.attn_score_err,
        'value_recon_err': self.value_recon_err,
        'value_output_err': self.value_output_err,
        'output_err': self.output_err,
        'combined_error': self.combined_error,
        'attention_sparsity': self.attention_sparsity,
    }


@dataclasses.dataclass(frozen=True)
class ChannelProfile:
  magnitudes: np.ndarray  # Mean |x| per channel: [d]
  top_channels: Sequence[int]  # Channel indices, largest magnitude first.

  @property
  def num_channels(self) -> int:
    return len(self.magnitudes)
