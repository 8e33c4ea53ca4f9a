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

"""Exposing the public methods of the streaming cache."""

# Accounting
from asymkv.kvcache.accounting import expected_memory_bytes
from asymkv.kvcache.accounting import grouped_bytes
from asymkv.kvcache.accounting import residual_window_stats
from asymkv.kvcache.accounting import split_tokens

# Base classes
from asymkv.kvcache.base import CacheConfig
from asymkv.kvcache.base import KeyCacheState
from asymkv.kvcache.base import KVCache
from asymkv.kvcache.base import RESIDUAL_BYTES
from asymkv.kvcache.base import ValueCacheState

# Cache updates
from asymkv.kvcache.cache import append_key
from asymkv.kvcache.cache import append_token
from asymkv.kvcache.cache import append_value
from asymkv.kvcache.cache import empty_cache
from asymkv.kvcache.cache import materialize_keys
from asymkv.kvcache.cache import materialize_values
from asymkv.kvcache.cache import memory_bytes
from asymkv.kvcache.cache import prefill
from asymkv.kvcache.cache import token_counts
