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
"""Install script for setuptools."""

import importlib.util

import setuptools


def _get_version() -> str:
  spec = importlib.util.spec_from_file_location(
      '_metadata', 'asymkv/_metadata.py')
  metadata = importlib.util.module_from_spec(spec)
  spec.loader.exec_module(metadata)
  return metadata.__version__


# Additional requirements for testing.
testing_require = [
    'pytest-xdist',
    'pytype',
]

setuptools.setup(
    name='asymkv',
    description=('Asymmetric low-bit KV cache quantization. Per-channel keys, '
                 'per-token values and a memory/throughput harness.'),
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    license='Apache License, Version 2.0',
    version=_get_version(),
    keywords='kv-cache quantization python machine-learning',
    packages=setuptools.find_packages(),
    install_requires=[
        'absl-py',
        'chex',
        'dm-acme==0.4.0',
        'dm-haiku',
        'jax',
        'jaxlib',
        'numpy',
        'pandas',
        'plotnine',
    ],
    extras_require={
        'testing': testing_require,
    },
    entry_points={
        'console_scripts': ['asymkv=asymkv.bench.cli:main'],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: POSIX :: Linux',
        'Operating System :: MacOS :: MacOS X',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
)
