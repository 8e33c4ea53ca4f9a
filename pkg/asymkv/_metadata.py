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
"""Package metadata for asymkv.

This is kept in a separate module so that it can be imported from setup.py, at
a time when asymkv's dependencies may not have been installed yet.
"""

__version__ = '0.1.0'
