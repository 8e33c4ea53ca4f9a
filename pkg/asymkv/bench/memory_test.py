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
"""Tests for asymkv.bench.memory."""

from absl.testing import absltest
from absl.testing import parameterized
from asymkv import base
from asymkv import bench
from asymkv import kvcache

_FP16 = bench.Mode.FP16
_QUANTIZED = bench.Mode.QUANTIZED


class EstimateMemoryTest(parameterized.TestCase):

  def test_opt175b_baseline(self):
    estimate = bench.estimate_memory(bench.PRESETS['opt175b'], mode=_FP16)
    self.assertEqual(estimate.fp_bytes, 1_314_259_992_576)
    self.assertLess(abs(estimate.fp_bytes - 1.2e12), 0.1 * 1.2e12)
    self.assertEqual(estimate.cache_bytes, estimate.fp_bytes)

  def test_unit_cell(self):
    spec = bench.WorkloadSpec(head_dim=1)
    estimate = bench.estimate_memory(spec, mode=_FP16, lengths=[(1, 0)])
    self.assertEqual(estimate.fp_bytes, 4)

  def test_llama_breakdown(self):
    spec = bench.PRESETS['llama2-7b']
    self.assertEqual(spec.total_len, 4096)
    estimate = bench.estimate_memory(spec, bench.cache_config(spec))
    caches = spec.batch * spec.layers * spec.kv_heads
    self.assertEqual(estimate.code_bytes, 258_048 * caches)
    self.assertEqual(estimate.param_bytes, 129_024 * caches)
    self.assertEqual(estimate.residual_bytes, 32_768 * caches)
    self.assertEqual(estimate.cache_bytes, 419_840 * caches)
    self.assertBetween(estimate.compression_ratio, 4.4, 5.0)
    self.assertAlmostEqual(
        estimate.compression_ratio, 2_097_152 / 419_840, delta=1e-9)

  @parameterized.product(
      total_len=[1, 31, 128, 129, 257, 1000],
      bits=[2, 4],
      group_size=[32, 64],
  )
  def test_matches_per_head_accounting(self, total_len, bits, group_size):
    spec = bench.WorkloadSpec(
        batch=3, prompt_len=total_len, gen_len=1, layers=2, kv_heads=2)
    cfg = bench.cache_config(spec, bits, group_size, 128)
    estimate = bench.estimate_memory(spec, cfg)
    self.assertEqual(
        estimate.cache_bytes,
        spec.num_caches * kvcache.expected_memory_bytes(spec.total_len, cfg))

  @parameterized.product(total_len=[256, 511, 2048], bits=[2, 4])
  def test_quantized_below_fp(self, total_len, bits):
    spec = bench.WorkloadSpec(prompt_len=total_len - 1, gen_len=1)
    estimate = bench.estimate_memory(spec, bench.cache_config(spec, bits))
    self.assertLess(estimate.cache_bytes, estimate.fp_bytes)

  def test_weight_bytes_add_to_peak(self):
    spec = bench.WorkloadSpec()
    estimate = bench.estimate_memory(spec, mode=_FP16, weight_bytes=1000)
    self.assertEqual(estimate.peak_bytes, estimate.cache_bytes + 1000)

  def test_head_dim_mismatch(self):
    spec = bench.WorkloadSpec(head_dim=64)
    with self.assertRaises(base.ConfigError):
      bench.estimate_memory(spec, kvcache.CacheConfig(head_dim=128))

  def test_quantized_needs_config(self):
    with self.assertRaises(base.UsageError):
      bench.estimate_memory(bench.WorkloadSpec(), None, _QUANTIZED)

  def test_invalid_workload(self):
    with self.assertRaises(base.ConfigError):
      bench.WorkloadSpec(batch=0)

  @parameterized.parameters([1, 4])
  def test_only_16_bit_elements(self, bytes_per_element):
    with self.assertRaises(base.ConfigError):
      bench.WorkloadSpec(bytes_per_element=bytes_per_element)


class MaxBatchTest(parameterized.TestCase):

  def setUp(self):
    super().setUp()
    self.spec = bench.WorkloadSpec(prompt_len=2016, gen_len=32)
    self.cfg = bench.cache_config(self.spec)

  def _fp_bytes(self, spec: bench.WorkloadSpec) -> int:
    return bench.estimate_memory(spec, mode=_FP16).fp_bytes

  def test_one_fp_request(self):
    budget = self._fp_bytes(self.spec)
    self.assertEqual(bench.max_batch_at_budget(self.spec, budget, mode=_FP16),
                     1)

  def test_quantized_fits_four_times_more(self):
    budget = self._fp_bytes(self.spec.replace(batch=64))
    fp_batch = bench.max_batch_at_budget(self.spec, budget, mode=_FP16)
    quantized_batch = bench.max_batch_at_budget(self.spec, budget, self.cfg)
    self.assertEqual(fp_batch, 64)
    self.assertGreaterEqual(quantized_batch, 4 * fp_batch)
    fits = bench.estimate_memory(
        self.spec.replace(batch=quantized_batch), self.cfg)
    over = bench.estimate_memory(
        self.spec.replace(batch=quantized_batch + 1), self.cfg)
    self.assertLessEqual(fits.peak_bytes, budget)
    self.assertGreater(over.peak_bytes, budget)

  @parameterized.parameters([10**6, 10**7, 3 * 10**7])
  def test_monotone_in_budget(self, budget):
    small = bench.max_batch_at_budget(self.spec, budget, self.cfg)
    large = bench.max_batch_at_budget(self.spec, 2 * budget, self.cfg)
    self.assertGreaterEqual(large, 2 * small)

  def test_monotone_in_length(self):
    budget = 10**8
    batches = [
        bench.max_batch_at_budget(
            self.spec.replace(prompt_len=prompt_len), budget, self.cfg)
        for prompt_len in (100, 500, 2016, 4000)
    ]
    self.assertEqual(batches, sorted(batches, reverse=True))

  def test_huge_budget_resolves_quickly(self):
    spec = bench.WorkloadSpec(prompt_len=8, gen_len=8, head_dim=4)
    per_request = self._fp_bytes(spec)
    self.assertEqual(per_request, 2 * 2 * 16 * 4)
    budget = 10**12
    self.assertEqual(
        bench.max_batch_at_budget(spec, budget, mode=_FP16),
        budget // per_request)

  def test_identical_requests_scale_with_batch(self):
    spec = self.spec.replace(batch=5)
    batched = bench.estimate_memory(spec, self.cfg)
    listed = bench.estimate_memory(
        spec, self.cfg, lengths=[(spec.prompt_len, spec.gen_len)] * 5)
    self.assertEqual(batched, listed)

  def test_budget_too_small(self):
    with self.assertRaises(base.BudgetError) as raised:
      bench.max_batch_at_budget(self.spec, 1000, self.cfg)
    self.assertEqual(raised.exception.step, 'max_batch')


if __name__ == '__main__':
  absltest.main()
