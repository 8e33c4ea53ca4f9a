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

"""Plain-text acme loggers for benchmark and analysis records."""

import sys
from typing import Any, Dict, IO, List, Mapping, Optional

from acme.utils import loggers
import pandas as pd


def format_value(value: Any) -> str:
  if isinstance(value, bool):
    return str(value).lower()
  if isinstance(value, float):
    return f'{value:.6g}'
  return str(value)


def serialize(values: Mapping[str, Any]) -> str:
  """One `key = value` line per entry."""
  return '\n'.join(f'{key} = {format_value(value)}'
                   for key, value in values.items())


class _TextSink:
  """Writes to a file when given a path, otherwise to the current stdout."""

  def __init__(self, path: Optional[str] = None):
    self._file: Optional[IO[str]] = open(path, 'w') if path else None

  def _print(self, text: str):
    print(text, file=self._file or sys.stdout)

  def comment(self, text: str):
    self._print(f'# {text}')

  def _close_file(self):
    if self._file is not None:
      self._file.close()
      self._file = None


class KeyValueLogger(_TextSink, loggers.TerminalLogger):
  """Terminal logger printing every record as `key = value` lines."""

  def __init__(self, path: Optional[str] = None):
    _TextSink.__init__(self, path)
    loggers.TerminalLogger.__init__(
        self, print_fn=self._print, serialize_fn=serialize, time_delta=-1.)

  def close(self):
    self._close_file()


class TableLogger(_TextSink, loggers.Logger):
  """Collects records and prints them as one table on close."""

  def __init__(self, path: Optional[str] = None):
    super().__init__(path)
    self._records: List[Dict[str, Any]] = []

  def write(self, data: Mapping[str, Any]):
    self._records.append(dict(data))

  @property
  def df(self) -> pd.DataFrame:
    return pd.DataFrame(self._records)

  def close(self):
    if self._records:
      self._print(self.df.to_string(index=False, float_format=format_value))
      self._records = []
    self._close_file()
