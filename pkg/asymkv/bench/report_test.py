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
"""Tests for asymkv.bench.report."""

import os

from absl.testing import absltest
from absl.testing import parameterized
from acme.utils import loggers
from asymkv import bench
from asymkv.bench import report


class ReportTest(parameterized.TestCase):

  def _path(self) -> str:
    return os.path.join(self.create_tempdir().full_path, 'report.txt')

  def _read(self, path: str) -> str:
    with open(path) as f:
      return f.read()

  @parameterized.parameters([
      (True, 'true'), (0.1234567, '0.123457'), (3, '3'), ('fp16', 'fp16')])
  def test_format_value(self, value, expected):
    self.assertEqual(report.format_value(value), expected)

  def test_serialize(self):
    self.assertEqual(report.serialize({'a': 1, 'b': 2.5}), 'a = 1\nb = 2.5')

  @parameterized.parameters([bench.KeyValueLogger, bench.TableLogger])
  def test_are_acme_loggers(self, logger_cls):
    logger = logger_cls(self._path())
    self.assertIsInstance(logger, loggers.Logger)
    logger.close()

  def test_key_value_prints_every_record(self):
    path = self._path()
    logger = bench.KeyValueLogger(path)
    logger.comment('two steps')
    logger.write({'step': 0, 'cache_bytes': 10})
    logger.write({'step': 1, 'cache_bytes': 20})
    logger.close()
    self.assertEqual(
        self._read(path),
        '# two steps\nstep = 0\ncache_bytes = 10\n'
        'step = 1\ncache_bytes = 20\n')

  def test_table_prints_on_close(self):
    path = self._path()
    logger = bench.TableLogger(path)
    logger.write({'config': 'K - C, V - T', 'error': 0.5})
    logger.write({'config': 'K - T, V - T', 'error': 0.25})
    self.assertEqual(logger.df.shape, (2, 2))
    self.assertEqual(self._read(path), '')
    logger.close()
    lines = self._read(path).splitlines()
    self.assertLen(lines, 3)
    self.assertIn('config', lines[0])
    self.assertIn('0.25', lines[2])


if __name__ == '__main__':
  absltest.main()
