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

"""Per-channel magnitude profiles of key and value caches."""

from typing import Optional, Sequence

from absl import logging
from asymkv import base
from asymkv.analysis import base as analysis_base
import numpy as np
import pandas as pd
import plotnine as gg


def channel_profile(x: base.Matrix, k: int = 3) -> analysis_base.ChannelProfile:
  """Mean absolute magnitude per channel and the k largest channels."""
  x = np.asarray(x, dtype=np.float32)
  if not x.shape[0]:
    logging.warning('Profiling a matrix with no tokens.')
    magnitudes = np.zeros(x.shape[1], np.float32)
  else:
    magnitudes = np.mean(np.abs(x), axis=0)
  top = np.argsort(-magnitudes, kind='stable')[:max(k, 0)]
  return analysis_base.ChannelProfile(magnitudes, [int(c) for c in top])


def make_profile_df(profile: analysis_base.ChannelProfile,
                    name: str = 'cache') -> pd.DataFrame:
  top = set(profile.top_channels)
  return pd.DataFrame({
      'channel': np.arange(profile.num_channels),
      'magnitude': profile.magnitudes,
      'outlier': [c in top for c in range(profile.num_channels)],
      'name': name,
  })


def make_profile_plot(*profiles: analysis_base.ChannelProfile,
                      names: Optional[Sequence[str]] = None) -> gg.ggplot:
  """Bar chart of channel magnitudes, one facet per profile."""
  names = names or [f'cache_{i}' for i in range(len(profiles))]
  plot_df = pd.concat(
      [make_profile_df(p, n) for p, n in zip(profiles, names)])
  p = (gg.ggplot(plot_df)
       + gg.aes('channel', 'magnitude', fill='outlier')
       + gg.geom_col()
       + gg.facet_wrap('~ name', scales='free_y')
       + gg.ylab('mean |x|')
      )
  return p
