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

"""Workload presets, the synthetic projection layer and length sampling."""

import dataclasses
from typing import Dict, List, Tuple

from asymkv import base
from asymkv.bench import base as bench_base
import chex
import haiku as hk
import jax
import jax.numpy as jnp
import numpy as np

PRESETS: Dict[str, bench_base.WorkloadSpec] = {
    'opt175b': bench_base.WorkloadSpec(
        batch=512, prompt_len=512, gen_len=32,
        layers=96, kv_heads=96, head_dim=128),
    'llama2-7b': bench_base.WorkloadSpec(
        batch=16, prompt_len=4064, gen_len=32,
        layers=32, kv_heads=32, head_dim=128),
    # Mean request lengths of chat traffic on a model small enough to run.
    'sharegpt': bench_base.WorkloadSpec(
        batch=2, prompt_len=161, gen_len=338,
        layers=2, kv_heads=2, head_dim=64),
}


def get_preset(name: str) -> bench_base.WorkloadSpec:
  if name not in PRESETS:
    raise base.UsageError(
        f'Unknown preset {name!r}; choose one of {sorted(PRESETS)}.')
  return PRESETS[name]


def _projections(x: chex.Array) -> Tuple[chex.Array, chex.Array, chex.Array]:
  hidden = x.shape[-1]
  query = hk.Linear(hidden, with_bias=False, name='query')(x)
  key = hk.Linear(hidden, with_bias=False, name='key')(x)
  value = hk.Linear(hidden, with_bias=False, name='value')(x)
  return query, key, value


_TRANSFORMED = hk.without_apply_rng(hk.transform(_projections))


@dataclasses.dataclass
class SyntheticLayer:
  """Random query, key and value projections of one decoder layer."""
  hidden: int
  rng_key: chex.PRNGKey

  def __post_init__(self):
    self.params = _TRANSFORMED.init(
        self.rng_key, jnp.zeros([1, self.hidden]))
    self._apply = jax.jit(_TRANSFORMED.apply)

  def __call__(
      self, x: base.Matrix) -> Tuple[base.Matrix, base.Matrix, base.Matrix]:
    chex.assert_shape(x, (None, self.hidden))
    return self._apply(self.params, x)


def rms_normalize(x: base.Matrix, eps: float = 1e-6) -> base.Matrix:
  """Rescales each row to unit root-mean-square."""
  mean_square = jnp.mean(jnp.square(x), axis=-1, keepdims=True)
  return x * jax.lax.rsqrt(mean_square + eps)


def head_slice(x: base.Matrix, head: int, head_dim: int) -> base.Matrix:
  return x[:, head * head_dim:(head + 1) * head_dim]


def sample_lengths(spec: bench_base.WorkloadSpec,
                   seed: int = 0,
                   sigma: float = 0.5) -> List[Tuple[int, int]]:
  """Draws (prompt_len, gen_len) per batch element from lognormals.

  Each lognormal keeps the workload's lengths as its mean. Lengths are at
  least one token.

  Args:
    spec: workload whose prompt_len and gen_len are the means.
    seed: numpy seed.
    sigma: standard deviation of the underlying normal.

  Returns:
    One (prompt_len, gen_len) pair per batch element.
  """
  rng = np.random.RandomState(seed)
  lengths = []
  for mean in (spec.prompt_len, spec.gen_len):
    mu = np.log(mean) - sigma ** 2 / 2
    draws = np.rint(rng.lognormal(mu, sigma, size=spec.batch)).astype(np.int64)
    lengths.append(np.maximum(draws, 1))
  return [(int(p), int(g)) for p, g in zip(*lengths)]


def fixed_lengths(spec: bench_base.WorkloadSpec) -> List[Tuple[int, int]]:
  return [(spec.prompt_len, spec.gen_len)] * spec.batch
