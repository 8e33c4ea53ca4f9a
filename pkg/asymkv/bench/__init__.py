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

"""Exposing the public methods of the benchmark harness."""

# Base classes
from asymkv.bench.base import BenchmarkReport
from asymkv.bench.base import MemoryEstimate
from asymkv.bench.base import Mode
from asymkv.bench.base import WorkloadSpec

# Command line
from asymkv.bench.cli import cli
from asymkv.bench.cli import main

# Dumps
from asymkv.bench.dump import decode
from asymkv.bench.dump import encode
from asymkv.bench.dump import header_bytes
from asymkv.bench.dump import read_dump
from asymkv.bench.dump import write_dump

# Memory
from asymkv.bench.memory import cache_config
from asymkv.bench.memory import estimate_memory
from asymkv.bench.memory import max_batch_at_budget

# Reports
from asymkv.bench.report import KeyValueLogger
from asymkv.bench.report import TableLogger

# Runner
from asymkv.bench.runner import run_decode_benchmark

# Workloads
from asymkv.bench.workload import get_preset
from asymkv.bench.workload import PRESETS
from asymkv.bench.workload import sample_lengths
from asymkv.bench.workload import SyntheticLayer
