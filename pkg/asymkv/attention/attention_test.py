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

"""Tests for asymkv.attention."""

from absl.testing import absltest
from absl.testing import parameterized
from asymkv import attention
from asymkv import base
from asymkv import kvcache
from asymkv import quantizer
import chex
import haiku as hk
import jax
import jax.numpy as jnp
import numpy as np


def _relative_error(estimate: chex.Array, target: chex.Array) -> float:
  return float(jnp.linalg.norm(estimate - target) / jnp.linalg.norm(target))


def _run_decode(cfg: kvcache.CacheConfig, prompt_len: int, steps: int,
                seed: int, scale: bool = True):
  """Decodes steps tokens after a prompt, returning outputs and exact K/V."""
  rng = hk.PRNGSequence(seed)
  total = prompt_len + steps
  keys = jax.random.normal(next(rng), [total, cfg.head_dim])
  values = jax.random.normal(next(rng), [total, cfg.head_dim])
  queries = jax.random.normal(next(rng), [steps, cfg.head_dim])
  key_state, value_state, _, _ = kvcache.prefill(
      keys[:prompt_len], values[:prompt_len], cfg)
  cache = kvcache.KVCache(key_state, value_state)
  outputs = []
  for t in range(steps):
    inputs = attention.DecodeInputs.create(
        queries[t], keys[prompt_len + t], values[prompt_len + t])
    out, cache = attention.decode_step(cache, inputs, cfg, scale)
    outputs.append(out)
  return outputs, cache, queries, keys, values


class ReferenceAttentionTest(parameterized.TestCase):

  def test_single_row(self):
    v = jnp.asarray([[0.5, -2., 3.]])
    out = attention.reference_attention(jnp.ones([1, 3]), v, v)
    np.testing.assert_array_equal(out, v)

  def test_saturated_softmax(self):
    keys = jnp.eye(2)
    values = jnp.asarray([[1., 2.], [-5., 7.]])
    out = attention.reference_attention(
        jnp.asarray([[30., 0.]]), keys, values, scale=False)
    np.testing.assert_allclose(out, values[:1], atol=1e-3)

  def test_uniform_logits(self):
    values = jax.random.normal(jax.random.PRNGKey(0), [7, 4])
    keys = jax.random.normal(jax.random.PRNGKey(1), [7, 4])
    out = attention.reference_attention(jnp.zeros([1, 4]), keys, values)
    np.testing.assert_allclose(out[0], jnp.mean(values, axis=0), atol=1e-6)

  def test_shape_mismatch(self):
    with self.assertRaises(base.ShapeError):
      attention.reference_attention(
          jnp.ones([1, 2]), jnp.ones([3, 2]), jnp.ones([2, 2]))


class KernelTest(parameterized.TestCase):

  @parameterized.product(bits=[2, 4, 8], rows=[8, 24])
  def test_logits_match_dequantized(self, bits: int, rows: int):
    rng = hk.PRNGSequence(bits + rows)
    keys = jax.random.normal(next(rng), [rows, 16])
    query = jax.random.normal(next(rng), [16])
    packed = quantizer.quantize_matrix(
        keys, quantizer.QuantParams(bits, 8, base.QuantAxis.PER_CHANNEL))
    expected = quantizer.dequantize_matrix(packed) @ query
    np.testing.assert_allclose(
        attention.quantized_logits(query, packed), expected,
        rtol=1e-5, atol=1e-5)

  @parameterized.product(bits=[2, 4, 8], rows=[1, 5])
  def test_weighted_sum_matches_dequantized(self, bits: int, rows: int):
    rng = hk.PRNGSequence(bits + rows)
    values = jax.random.normal(next(rng), [rows, 16])
    weights = jax.random.uniform(next(rng), [rows])
    packed = quantizer.quantize_matrix(
        values, quantizer.QuantParams(bits, 8, base.QuantAxis.PER_TOKEN))
    expected = weights @ quantizer.dequantize_matrix(packed)
    np.testing.assert_allclose(
        attention.quantized_weighted_sum(weights, packed), expected,
        rtol=1e-5, atol=1e-5)

  def test_wrong_axis(self):
    packed = quantizer.quantize_matrix(
        jnp.ones([4, 4]), quantizer.QuantParams(2, 2, base.QuantAxis.PER_TOKEN))
    with self.assertRaises(base.UsageError):
      attention.quantized_logits(jnp.ones([4]), packed)


class DecodeAttentionTest(parameterized.TestCase):

  def test_single_token_returns_value(self):
    cfg = kvcache.CacheConfig(bits=2, group_size=4, residual_length=8,
                              head_dim=4)
    cache = kvcache.empty_cache(cfg)
    value = jnp.asarray([[0.3, -1.7, 2.2, 9.]])
    inputs = attention.DecodeInputs.create(jnp.ones([4]), jnp.ones([4]), value)
    out, cache = attention.decode_step(cache, inputs, cfg)
    np.testing.assert_array_equal(out, value)
    self.assertEqual(cache.total_tokens, 1)

  @parameterized.parameters([0, 1, 2, 3, 4])
  def test_eight_bits_close_to_exact(self, seed: int):
    cfg = kvcache.CacheConfig(bits=8, group_size=32, residual_length=32,
                              head_dim=64)
    outputs, _, queries, keys, values = _run_decode(cfg, 75, 5, seed)
    for t, out in enumerate(outputs):
      length = 76 + t
      exact = attention.reference_attention(
          queries[t], keys[:length], values[:length])
      self.assertLess(_relative_error(out, exact), 1e-2)

  @parameterized.parameters(range(100))
  def test_passthrough_bit_exact(self, seed: int):
    rng = np.random.RandomState(seed)
    cfg = kvcache.CacheConfig(bits=2, group_size=32, residual_length=32,
                              head_dim=int(rng.choice([32, 64])),
                              passthrough=True)
    prompt_len = int(rng.randint(1, 298))
    outputs, _, queries, keys, values = _run_decode(cfg, prompt_len, 3, seed)
    for t, out in enumerate(outputs):
      length = prompt_len + 1 + t
      exact = attention.reference_attention(
          queries[t], keys[:length], values[:length])
      np.testing.assert_array_equal(out, exact)

  @parameterized.parameters([(1, 2), (5, 10), (20, 30)])
  def test_recent_tokens_bit_exact(self, prompt_len: int, seed: int):
    cfg = kvcache.CacheConfig(bits=2, group_size=8, residual_length=32,
                              head_dim=16)
    outputs, _, queries, keys, values = _run_decode(cfg, prompt_len, 3, seed)
    for t, out in enumerate(outputs):
      length = prompt_len + 1 + t
      exact = attention.reference_attention(
          queries[t], keys[:length], values[:length])
      np.testing.assert_array_equal(out, exact)

  @parameterized.parameters(range(100))
  def test_hybrid_equals_monolithic(self, seed: int):
    rng = np.random.RandomState(seed)
    group_size = int(rng.choice([8, 16]))
    cfg = kvcache.CacheConfig(
        bits=int(rng.choice([2, 4, 8])), group_size=group_size,
        residual_length=group_size * int(rng.choice([1, 2, 4])),
        head_dim=int(rng.choice([16, 32])))
    scale = bool(seed % 2)
    prompt_len = int(rng.randint(1, 297))
    steps = int(rng.randint(1, 5))
    outputs, cache, queries, _, _ = _run_decode(
        cfg, prompt_len, steps, seed, scale)
    keys = kvcache.materialize_keys(cache.keys)
    values = kvcache.materialize_values(cache.values)
    # Only the last output is computed against the final cache.
    monolithic = attention.reference_attention(
        queries[-1], keys, values, scale)
    np.testing.assert_allclose(outputs[-1], monolithic, rtol=1e-5, atol=1e-5)

  @parameterized.parameters([True, False])
  def test_weights_sum_to_one(self, scale: bool):
    cfg = kvcache.CacheConfig(bits=2, group_size=8, residual_length=16,
                              head_dim=16)
    _, cache, queries, _, _ = _run_decode(cfg, 70, 2, 0, scale)
    weights = attention.attention_weights(queries[-1], cache.keys, scale)
    chex.assert_shape(weights, (1, 72))
    self.assertAlmostEqual(float(jnp.sum(weights)), 1., delta=1e-6)

  @parameterized.parameters(range(50))
  def test_error_non_increasing_in_bits(self, seed: int):
    errors = []
    for bits in (2, 4, 8):
      cfg = kvcache.CacheConfig(bits=bits, group_size=32, residual_length=32,
                                head_dim=64)
      outputs, _, queries, keys, values = _run_decode(cfg, 200, 1, seed)
      exact = attention.reference_attention(queries[0], keys, values)
      errors.append(_relative_error(outputs[0], exact))
    self.assertGreaterEqual(errors[0], errors[1])
    self.assertGreaterEqual(errors[1], errors[2])

  def test_dimension_mismatch(self):
    cfg = kvcache.CacheConfig(bits=2, group_size=4, residual_length=8,
                              head_dim=8)
    cache = kvcache.empty_cache(cfg)
    inputs = attention.DecodeInputs.create(
        jnp.ones([4]), jnp.ones([4]), jnp.ones([4]))
    with self.assertRaises(base.ShapeError):
      attention.decode_step(cache, inputs, cfg)
    with self.assertRaises(base.ShapeError):
      attention.DecodeInputs.create(
          jnp.ones([4]), jnp.ones([4]), jnp.ones([8]))


if __name__ == '__main__':
  absltest.main()
