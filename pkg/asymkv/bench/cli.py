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

"""Command line surface: estimate, bench, analyze, sweep, dump-roundtrip."""

import os
import sys
import tempfile
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from absl import flags
from absl import logging
from asymkv import analysis
from asymkv import base
from asymkv.bench import base as bench_base
from asymkv.bench import dump
from asymkv.bench import memory
from asymkv.bench import report
from asymkv.bench import runner
from asymkv.bench import workload
import jax
import numpy as np

_USAGE = """usage: asymkv <command> [--flags]

commands:
  estimate        Cache bytes of a workload, fp16 against quantized.
  bench           Decode benchmark on synthetic layers.
  analyze         Error reports and channel profiles of a dump.
  sweep           Quadrant table of key and value quantization axes.
  dump-roundtrip  Writes and re-reads a tensor dump.
"""

_Logger = Union[report.KeyValueLogger, report.TableLogger]


def _define_flags(fv: flags.FlagValues):
  """Registers every flag on a fresh FlagValues."""
  flags.DEFINE_integer('bits', 2, 'Bit width of quantized codes.',
                       flag_values=fv)
  flags.register_validator('bits', lambda bits: bits in (2, 4, 8),
                           message='--bits must be one of 2, 4, 8.',
                           flag_values=fv)
  flags.DEFINE_integer('group_size', 32, 'Elements per quantization group.',
                       flag_values=fv)
  flags.DEFINE_integer('residual', 128, 'Full-precision residual length.',
                       flag_values=fv)
  flags.DEFINE_integer('seed', 0, 'Random seed.', flag_values=fv)
  flags.DEFINE_integer('budget_bytes', None, 'Cache memory budget in bytes.',
                       flag_values=fv)
  flags.DEFINE_string('out', None, 'Report path; stdout when unset.',
                      flag_values=fv)
  flags.DEFINE_enum('preset', 'sharegpt', sorted(workload.PRESETS),
                    'Workload preset.', flag_values=fv)
  for name, help_text in [('batch', 'Batch size.'),
                          ('prompt_len', 'Prompt tokens per request.'),
                          ('gen_len', 'Generated tokens per request.'),
                          ('layers', 'Decoder layers.'),
                          ('kv_heads', 'Key/value heads per layer.'),
                          ('head_dim', 'Channels per head.')]:
    flags.DEFINE_integer(name, None, f'{help_text} Overrides the preset.',
                         flag_values=fv)
  flags.DEFINE_enum('mode', 'quantized', [m.value for m in bench_base.Mode],
                    'Cache mode of the benchmark.', flag_values=fv)
  flags.DEFINE_string('dump', None, 'Key dump to analyze, or to round trip.',
                      flag_values=fv)
  flags.DEFINE_string('values_dump', None,
                      'Value dump paired with --dump; defaults to --dump.',
                      flag_values=fv)
  flags.DEFINE_bool('table', False, 'Print records as one table.',
                    flag_values=fv)
  flags.DEFINE_integer('weight_bytes', 0, 'Model weight bytes for the peak.',
                       flag_values=fv)
  flags.DEFINE_enum('length_distribution', 'fixed', ['fixed', 'lognormal'],
                    'Per-request lengths of the benchmark.', flag_values=fv)
  flags.DEFINE_bool('synthetic_outliers', False,
                    'Sweep keys with outlier channels and values with token '
                    'offsets instead of plain Gaussians.', flag_values=fv)
  flags.DEFINE_integer('num_tokens', 512, 'Tokens of synthetic data.',
                       flag_values=fv)
  flags.DEFINE_integer('num_queries', 64, 'Queries of synthetic data.',
                       flag_values=fv)


def _normalize_arg(arg: str) -> str:
  """Accepts --group-size for --group_size."""
  if not arg.startswith('--') or arg == '--':
    return arg
  name, sep, value = arg[2:].partition('=')
  return '--' + name.replace('-', '_') + sep + value


def _make_logger(fv: flags.FlagValues) -> _Logger:
  if fv.table:
    return report.TableLogger(fv.out)
  return report.KeyValueLogger(fv.out)


def _workload(fv: flags.FlagValues) -> bench_base.WorkloadSpec:
  spec = workload.get_preset(fv.preset)
  overrides = {name: fv[name].value
               for name in ('batch', 'prompt_len', 'gen_len', 'layers',
                            'kv_heads', 'head_dim')
               if fv[name].value is not None}
  return spec.replace(**overrides)


def _human_bytes(num_bytes: float) -> str:
  for unit in ('B', 'KB', 'MB', 'GB'):
    if num_bytes < 1e3:
      return f'{num_bytes:.2f} {unit}'
    num_bytes /= 1e3
  return f'{num_bytes:.2f} TB'


def _estimate(fv: flags.FlagValues, logger: _Logger) -> int:
  spec = _workload(fv)
  cfg = memory.cache_config(spec, fv.bits, fv.group_size, fv.residual)
  estimates = [
      memory.estimate_memory(spec, None, bench_base.Mode.FP16,
                             fv.weight_bytes),
      memory.estimate_memory(spec, cfg, bench_base.Mode.QUANTIZED,
                             fv.weight_bytes),
  ]
  logger.comment(
      f'{fv.preset}: batch={spec.batch} tokens={spec.total_len} '
      f'layers={spec.layers} hidden={spec.hidden}; fp16 cache '
      f'{_human_bytes(estimates[0].fp_bytes)}, quantized cache '
      f'{_human_bytes(estimates[1].cache_bytes)}')
  for estimate in estimates:
    record = {'preset': fv.preset, 'bits': fv.bits,
              'group_size': fv.group_size, 'residual': fv.residual}
    record.update(estimate.to_dict())
    if fv.budget_bytes is not None:
      record['max_batch'] = memory.max_batch_at_budget(
          spec, fv.budget_bytes, cfg, estimate.mode, fv.weight_bytes)
    logger.write(record)
  return 0


def _bench(fv: flags.FlagValues, logger: _Logger) -> int:
  spec = _workload(fv)
  cfg = memory.cache_config(spec, fv.bits, fv.group_size, fv.residual)
  lengths = None
  if fv.length_distribution == 'lognormal':
    lengths = workload.sample_lengths(spec, fv.seed)
  mode = bench_base.Mode(fv.mode)
  logging.info('Benchmarking %s in %s mode.', spec, mode.value)
  result = runner.run_decode_benchmark(
      spec, cfg, mode, fv.seed, fv.budget_bytes, lengths)
  logger.comment(
      f'{fv.preset} {mode.value}: {result.tokens_generated} tokens in '
      f'{result.elapsed_s:.3f}s; cache {_human_bytes(result.final_cache_bytes)}'
      f' of {_human_bytes(result.fp_cache_bytes)} at fp16')
  logger.write(result.to_dict())
  logging.info('Benchmark finished in %.3fs.', result.elapsed_s)
  return 0


def _head_pairs(fv: flags.FlagValues) -> List[Tuple[base.Matrix, base.Matrix]]:
  """(keys, values) per head, from dumps or synthetic data."""
  if fv.dump is not None:
    keys = dump.read_dump(fv.dump)
    values = dump.read_dump(fv.values_dump or fv.dump)
    if len(keys) != len(values):
      raise base.ShapeError(
          f'{len(keys)} key heads but {len(values)} value heads.')
    return list(zip(keys, values))
  head_dim = fv.head_dim or 128
  keys = analysis.make_outlier_keys(fv.num_tokens, head_dim, fv.seed)
  values = analysis.make_token_offset_values(
      fv.num_tokens, head_dim, fv.seed + 1)
  return [(keys, values)]


def _gaussian_pair(fv: flags.FlagValues) -> Tuple[base.Matrix, base.Matrix]:
  head_dim = fv.head_dim or 128
  key_rng, value_rng = jax.random.split(jax.random.PRNGKey(fv.seed))
  return (jax.random.normal(key_rng, [fv.num_tokens, head_dim]),
          jax.random.normal(value_rng, [fv.num_tokens, head_dim]))


def _analyze(fv: flags.FlagValues, logger: _Logger) -> int:
  for head, (keys, values) in enumerate(_head_pairs(fv)):
    queries = analysis.make_queries(fv.num_queries, keys.shape[1], fv.seed)
    key_profile = analysis.channel_profile(keys)
    value_profile = analysis.channel_profile(values)
    logger.comment(f'head {head}: {keys.shape[0]} tokens, '
                   f'{keys.shape[1]} channels')
    logger.write({
        'head': head,
        'key_top_channels': ','.join(map(str, key_profile.top_channels)),
        'value_top_channels': ','.join(map(str, value_profile.top_channels)),
        'key_max_magnitude': float(np.max(key_profile.magnitudes)),
        'value_max_magnitude': float(np.max(value_profile.magnitudes)),
    })
    for mode in analysis.ErrorMode:
      for error_report in analysis.quadrant_sweep(
          keys, values, queries, fv.bits, fv.group_size, mode):
        logger.write({'head': head, **error_report.to_dict()})
  return 0


def _sweep(fv: flags.FlagValues, logger: _Logger) -> int:
  if fv.dump is not None or fv.synthetic_outliers:
    keys, values = _head_pairs(fv)[0]
  else:
    keys, values = _gaussian_pair(fv)
  queries = analysis.make_queries(fv.num_queries, keys.shape[1], fv.seed)
  best = analysis.quadrant_sweep(keys, values, queries, fv.bits,
                                 fv.group_size)[0]
  for mode in analysis.ErrorMode:
    table = analysis.quadrant_table(keys, values, queries, fv.bits,
                                    fv.group_size, mode)
    for record in table.to_dict('records'):
      logger.write(record)
  logger.comment(f'best = {best.label}')
  return 0


def _dump_roundtrip(fv: flags.FlagValues, logger: _Logger) -> int:
  if fv.dump is not None:
    with open(fv.dump, 'rb') as f:
      original = dump.decode(f.read())
  else:
    original = np.asarray(jax.random.normal(
        jax.random.PRNGKey(fv.seed), [2, fv.num_tokens, fv.head_dim or 128]))
  with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, 'roundtrip.kvqd')
    dump.write_dump(path, original)
    with open(path, 'rb') as f:
      restored = dump.decode(f.read())
  identical = (original.shape == restored.shape and
               original.astype('<f4').tobytes() == restored.tobytes())
  logger.write({
      'shape': 'x'.join(map(str, original.shape)),
      'elements': original.size,
      'bytes': dump.header_bytes(original.ndim) + 4 * original.size,
      'identical': identical,
  })
  return 0 if identical else 1


_COMMANDS: Dict[str, Callable[[flags.FlagValues, _Logger], int]] = {
    'estimate': _estimate,
    'bench': _bench,
    'analyze': _analyze,
    'sweep': _sweep,
    'dump-roundtrip': _dump_roundtrip,
}


def _usage_error(message: Optional[str], fv: flags.FlagValues) -> int:
  if message:
    print(f'error: {message}\n', file=sys.stderr)
  print(_USAGE, file=sys.stderr)
  print(fv.get_help(), file=sys.stderr)
  return 2


def cli(argv: Sequence[str]) -> int:
  """Runs one command; argv excludes the program name.

  Returns:
    0 on success, 2 on a usage error, 1 on a runtime error.
  """
  fv = flags.FlagValues()
  _define_flags(fv)
  try:
    positional = fv(['asymkv'] + [_normalize_arg(a) for a in argv])[1:]
  except flags.Error as e:
    return _usage_error(str(e), fv)
  if not positional:
    return _usage_error(None, fv)
  if len(positional) > 1 or positional[0] not in _COMMANDS:
    return _usage_error(f'unknown command {" ".join(positional)!r}', fv)

  try:
    logger = _make_logger(fv)
  except OSError as e:
    logging.error('Cannot open report: %s', e)
    return 1
  try:
    return _COMMANDS[positional[0]](fv, logger)
  except (base.UsageError, base.ConfigError) as e:
    return _usage_error(str(e), fv)
  except (base.AsymKVError, OSError) as e:
    logging.error('%s failed: %s', positional[0], e)
    return 1
  finally:
    logger.close()


def main():
  sys.exit(cli(sys.argv[1:]))


if __name__ == '__main__':
  main()
