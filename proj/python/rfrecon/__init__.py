# SPDX-License-Identifier: Apache-2.0
#
# Copyright 2026 The rfrecon Authors
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

"""Synthetic radio-map scenes, ray tracing, ray-image encoding, geometric
map reconstruction and map metrics."""

from ._core import (
    SPEED_OF_LIGHT,
    Error,
    IoError,
    Link,
    Path,
    Scene,
    ValidationError,
    encode,
    generate_scene,
    link_features,
    make_scene,
    rasterize,
    read_pbm,
    read_tensor,
    reconstruct,
    run_cli,
    score,
    trace,
    write_pbm,
    write_tensor,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "Error",
    "IoError",
    "Link",
    "Path",
    "Scene",
    "ValidationError",
    "encode",
    "generate_scene",
    "link_features",
    "make_scene",
    "rasterize",
    "read_pbm",
    "read_tensor",
    "reconstruct",
    "run_cli",
    "score",
    "trace",
    "write_pbm",
    "write_tensor",
]

__version__ = "0.1.0"
