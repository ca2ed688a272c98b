# SPDX-License-Identifier: Apache-2.0
#
# risdoa: gridless 2D direction finding with an impaired 1-bit RIS
# Copyright (C) 2026 The risdoa authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Gridless 2D direction finding with an impaired 1-bit RIS."""

try:
    from ._risdoa import *  # noqa: F401,F403  installed wheel
    from ._risdoa import __doc__  # noqa: F401
except ImportError:
    # In-tree build: the extension sits next to this package on sys.path.
    from _risdoa import *  # noqa: F401,F403

__version__ = "0.3.0"
