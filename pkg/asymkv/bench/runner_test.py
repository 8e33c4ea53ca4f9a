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
"""Tests for asymkv.bench.runner and the synthetic workload."""

from typing import Any, Dict, List, Mapping

from absl.testing import absltest
from absl.testing import parameterized
from acme.utils import loggers
from asymkv import base
from asymkv import bench
import chex
import jax
import numpy as np


class _RecordingLogger(loggers.Logger):

  def __init__(self):
    self.records: List[Dict[str, Any]] = []
    self.closed = False

  def write(self, data: Mapping[str, Any]):
    self.records.append(dict(data))

  def close(self):
    self.closed = True


# Prompt of 30 tokens crosses a key flush at 32 during generation.
_SPEC = bench.WorkloadSpec(
    batch=2, prompt_len=30, gen_len=5, layers=2, kv_heads=2, head_dim=32)


def _config(spec: bench.WorkloadSpec = _SPEC):
  return bench.cache_config(spec, bits=2, group_size=16, residual_length=32)


class RunDecodeBenchmarkTest(parameterized.TestCase):

  def test_counted_bytes_match_estimate(self):
    report = bench.run_decode_benchmark(_SPEC, _config())
    self.assertEqual(report.final_cache_bytes, report.estimated_cache_bytes)
    self.assertLess(report.final_cache_bytes, report.fp_cache_bytes)
    self.assertGreaterEqual(report.peak_cache_bytes, report.final_cache_bytes)
    self.assertEqual(report.tokens_generated, _SPEC.batch * _SPEC.gen_len)
    self.assertLen(report.latency_ms, _SPEC.gen_len)
    self.assertLen(report.outputs, _SPEC.batch)
    for outputs in report.outputs:
      chex.assert_shape(outputs, (_SPEC.gen_len, _SPEC.hidden))
      self.assertTrue(np.all(np.isfinite(outputs)))

  def test_fp16_mode_counts_baseline(self):
    report = bench.run_decode_benchmark(
        _SPEC, _config(), mode=bench.Mode.FP16)
    self.assertEqual(report.final_cache_bytes, report.fp_cache_bytes)
    self.assertEqual(report.estimated_cache_bytes, report.fp_cache_bytes)
    self.assertEqual(report.peak_cache_bytes, report.final_cache_bytes)

  def test_single_generated_token(self):
    spec = _SPEC.replace(gen_len=1, batch=1)
    report = bench.run_decode_benchmark(spec, _config(spec))
    self.assertLen(report.latency_ms, 1)
    chex.assert_shape(report.outputs[0], (1, spec.hidden))

  def test_deterministic_under_seed(self):
    first = bench.run_decode_benchmark(_SPEC, _config(), seed=7)
    second = bench.run_decode_benchmark(_SPEC, _config(), seed=7)
    for a, b in zip(first.outputs, second.outputs):
      np.testing.assert_array_equal(a, b)

  def test_seed_changes_outputs(self):
    first = bench.run_decode_benchmark(_SPEC, _config(), seed=0)
    second = bench.run_decode_benchmark(_SPEC, _config(), seed=1)
    self.assertFalse(np.array_equal(first.outputs[0], second.outputs[0]))

  def test_logger_gets_one_record_per_step(self):
    logger = _RecordingLogger()
    bench.run_decode_benchmark(_SPEC, _config(), logger=logger)
    self.assertEqual([r['step'] for r in logger.records],
                     list(range(_SPEC.gen_len)))
    self.assertFalse(logger.closed)

  def test_budget_exceeded_at_prefill(self):
    with self.assertRaises(base.BudgetError) as raised:
      bench.run_decode_benchmark(_SPEC, _config(), budget_bytes=100)
    self.assertEqual(raised.exception.step, 'prefill')

  def test_budget_exceeded_during_decode(self):
    prompt_only = [(_SPEC.prompt_len, 0)] * _SPEC.batch
    budget = bench.estimate_memory(
        _SPEC, mode=bench.Mode.FP16, lengths=prompt_only).fp_bytes
    with self.assertRaises(base.BudgetError) as raised:
      bench.run_decode_benchmark(
          _SPEC, _config(), mode=bench.Mode.FP16, budget_bytes=budget)
    self.assertEqual(raised.exception.step, 'decode_0')

  def test_sampled_lengths(self):
    lengths = bench.sample_lengths(_SPEC, seed=3)
    report = bench.run_decode_benchmark(_SPEC, _config(), lengths=lengths)
    self.assertEqual(report.final_cache_bytes, report.estimated_cache_bytes)
    self.assertEqual(report.tokens_generated, sum(g for _, g in lengths))
    self.assertLen(report.latency_ms, max(g for _, g in lengths))
    for (_, gen_len), outputs in zip(lengths, report.outputs):
      self.assertLen(outputs, gen_len)

  def test_percentiles_are_ordered(self):
    report = bench.run_decode_benchmark(_SPEC, _config())
    summary = report.to_dict()
    self.assertLessEqual(summary['latency_p50_ms'], summary['latency_p90_ms'])
    self.assertLessEqual(summary['latency_p90_ms'], summary['latency_p99_ms'])
    self.assertGreater(summary['tokens_per_sec'], 0.)


class WorkloadTest(parameterized.TestCase):

  def test_presets_are_consistent(self):
    for spec in bench.PRESETS.values():
      self.assertEqual(spec.hidden, spec.kv_heads * spec.head_dim)
    sharegpt = bench.get_preset('sharegpt')
    self.assertEqual((sharegpt.prompt_len, sharegpt.gen_len), (161, 338))

  def test_unknown_preset(self):
    with self.assertRaises(base.UsageError):
      bench.get_preset('gpt5')

  def test_synthetic_layer_is_seeded(self):
    x = jax.random.normal(jax.random.PRNGKey(0), [3, 16])
    first = bench.SyntheticLayer(16, jax.random.PRNGKey(4))
    second = bench.SyntheticLayer(16, jax.random.PRNGKey(4))
    for a, b in zip(first(x), second(x)):
      chex.assert_shape(a, (3, 16))
      np.testing.assert_array_equal(a, b)

  @parameterized.parameters([0, 1, 2])
  def test_sample_lengths(self, seed):
    spec = bench.WorkloadSpec(batch=2000)
    lengths = bench.sample_lengths(spec, seed)
    self.assertLen(lengths, spec.batch)
    self.assertEqual(lengths, bench.sample_lengths(spec, seed))
    prompts, gens = (np.asarray(x) for x in zip(*lengths))
    self.assertGreaterEqual(prompts.min(), 1)
    self.assertGreaterEqual(gens.min(), 1)
    self.assertAlmostEqual(prompts.mean(), spec.prompt_len,
                           delta=0.05 * spec.prompt_len)
    self.assertAlmostEqual(gens.mean(), spec.gen_len, delta=0.05 * spec.gen_len)


if __name__ == '__main__':
  absltest.main()
