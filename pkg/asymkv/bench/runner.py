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

"""Decode benchmark over synthetic layers and real per-head caches."""

import dataclasses
import time
from typing import List, Optional, Sequence, Tuple

from absl import logging
from acme.utils import loggers
from asymkv import attention
from asymkv import base
from asymkv import kvcache
from asymkv.bench import base as bench_base
from asymkv.bench import memory
from asymkv.bench import workload
import haiku as hk
import jax
import jax.numpy as jnp
import numpy as np

# Caches of one batch element, indexed [layer][head].
_ElementCaches = List[List[kvcache.KVCache]]


def _prefill_element(prompt: base.Matrix,
                     layers: Sequence[workload.SyntheticLayer],
                     spec: bench_base.WorkloadSpec,
                     cfg: kvcache.CacheConfig) -> _ElementCaches:
  """Fills every head cache from the prompt's projections.

  Prompt attention is not computed: each layer reads the normalized value
  projections of the layer below.
  """
  caches = []
  x = workload.rms_normalize(prompt)
  for layer in layers:
    _, keys, values = layer(x)
    heads = []
    for h in range(spec.kv_heads):
      key_state, value_state, _, _ = kvcache.prefill(
          workload.head_slice(keys, h, spec.head_dim),
          workload.head_slice(values, h, spec.head_dim), cfg)
      heads.append(kvcache.KVCache(key_state, value_state))
    caches.append(heads)
    x = workload.rms_normalize(values)
  return caches


def _decode_token(x: base.Matrix,
                  caches: _ElementCaches,
                  layers: Sequence[workload.SyntheticLayer],
                  spec: bench_base.WorkloadSpec,
                  cfg: kvcache.CacheConfig,
                  scale: bool) -> base.Matrix:
  """Runs one token through every layer, updating caches in place."""
  for layer_index, layer in enumerate(layers):
    query, key, value = layer(x)
    outputs = []
    for h in range(spec.kv_heads):
      inputs = attention.DecodeInputs(
          *(workload.head_slice(p, h, spec.head_dim)
            for p in (query, key, value)))
      out, caches[layer_index][h] = attention.decode_step(
          caches[layer_index][h], inputs, cfg, scale)
      outputs.append(out)
    x = jnp.concatenate(outputs, axis=1)
    if layer_index + 1 < len(layers):
      x = workload.rms_normalize(x)
  return x


def _counted_bytes(all_caches: Sequence[_ElementCaches]) -> int:
  return sum(kvcache.memory_bytes(cache)
             for element in all_caches
             for heads in element
             for cache in heads)


def _check_budget(counted: int, budget_bytes: Optional[int], step: str):
  if budget_bytes is not None and counted > budget_bytes:
    raise base.BudgetError(
        f'Cache holds {counted} bytes, over the budget of {budget_bytes}.',
        step=step)


def run_decode_benchmark(
    spec: bench_base.WorkloadSpec,
    cfg: Optional[kvcache.CacheConfig] = None,
    mode: bench_base.Mode = bench_base.Mode.QUANTIZED,
    seed: int = 0,
    budget_bytes: Optional[int] = None,
    lengths: Optional[Sequence[Tuple[int, int]]] = None,
    logger: Optional[loggers.Logger] = None,
    scale: bool = True,
) -> bench_base.BenchmarkReport:
  """Prefills and decodes every batch element, timing each decode step.

  Batch elements run one after another within a step. Each generated token is
  fed back, normalized, as the next input.

  Args:
    spec: workload shape.
    cfg: cache settings; fp16 mode keeps them but stores nothing quantized.
    mode: fp16 or quantized caches.
    seed: seeds layer weights and prompts.
    budget_bytes: optional cap on counted cache bytes.
    lengths: optional (prompt_len, gen_len) per batch element.
    logger: receives one record per decode step; defaults to acme's
      terminal logger.
    scale: scale attention logits by 1/sqrt(head_dim).

  Returns:
    The report, including every element's final-layer outputs.

  Raises:
    BudgetError: counted bytes exceeded budget_bytes; the step is named.
  """
  if cfg is None:
    cfg = memory.cache_config(spec)
  if cfg.passthrough and mode is bench_base.Mode.QUANTIZED:
    raise base.UsageError('Quantized runs need a non-passthrough cache.')
  if lengths is None:
    lengths = workload.fixed_lengths(spec)
  if len(lengths) != spec.batch:
    raise base.UsageError(
        f'Got {len(lengths)} lengths for a batch of {spec.batch}.')
  estimate = memory.estimate_memory(spec, cfg, mode, lengths=lengths)
  logger = logger or loggers.make_default_logger(
      'decode', save_data=False, time_delta=0)
  if mode is bench_base.Mode.FP16:
    cfg = dataclasses.replace(cfg, passthrough=True)

  rng = hk.PRNGSequence(seed)
  layers = [workload.SyntheticLayer(spec.hidden, next(rng))
            for _ in range(spec.layers)]
  all_caches = []
  inputs = []
  for prompt_len, _ in lengths:
    prompt = jax.random.normal(next(rng), [prompt_len, spec.hidden])
    all_caches.append(_prefill_element(prompt, layers, spec, cfg))
    inputs.append(workload.rms_normalize(prompt[-1:]))
  counted = _counted_bytes(all_caches)
  _check_budget(counted, budget_bytes, 'prefill')
  peak = counted
  logging.info('Prefilled %d requests into %d bytes.', spec.batch, counted)

  outputs = [[] for _ in lengths]
  latencies = []
  num_steps = max(gen_len for _, gen_len in lengths)
  start = time.perf_counter()
  for step in range(num_steps):
    step_start = time.perf_counter()
    for b, (_, gen_len) in enumerate(lengths):
      if step >= gen_len:
        continue
      out = _decode_token(inputs[b], all_caches[b], layers, spec, cfg, scale)
      out = jax.block_until_ready(out)
      outputs[b].append(out)
      inputs[b] = workload.rms_normalize(out)
    latency_ms = 1e3 * (time.perf_counter() - step_start)
    latencies.append(latency_ms)
    counted = _counted_bytes(all_caches)
    _check_budget(counted, budget_bytes, f'decode_{step}')
    peak = max(peak, counted)
    logger.write({'step': step, 'latency_ms': latency_ms,
                  'cache_bytes': counted})
  elapsed = time.perf_counter() - start
  flushes = sum(cache.keys.num_flushes
                for element in all_caches for heads in element
                for cache in heads)
  logging.info('Decoded %d steps in %.3fs with %d key flushes.',
               num_steps, elapsed, flushes)

  if counted != estimate.cache_bytes:
    logging.warning('Counted %d cache bytes but estimated %d.',
                    counted, estimate.cache_bytes)
  return bench_base.BenchmarkReport(
      mode=mode,
      tokens_generated=sum(gen_len for _, gen_len in lengths),
      elapsed_s=elapsed,
      final_cache_bytes=counted,
      peak_cache_bytes=peak,
      estimated_cache_bytes=estimate.cache_bytes,
      fp_cache_bytes=estimate.fp_bytes,
      latency_ms=np.asarray(latencies),
      outputs=[np.concatenate(o, axis=0) for o in outputs],
  )
