// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The rfrecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rfrecon/dataset.hpp"
#include "rfrecon/metrics.hpp"
#include "rfrecon/reconstructor.hpp"

namespace rfrecon {

/// Runs the baseline on every scene of `split` (all scenes when empty) and
/// writes <id>.prob.pgm and <id>.pred.pbm into out_dir.
void reconstruct_dataset(const DatasetManifest& manifest, std::optional<Split> split, const ReconConfig& cfg,
                         const std::filesystem::path& out_dir, int workers = 1);

/// Ids of the ground-truth maps in a directory (stems of *.pbm, excluding
/// *.pred.pbm), sorted.
std::vector<std::string> list_map_ids(const std::filesystem::path& gt_dir);

/// Prediction for `id`: <id>.pred.pbm if present, else <id>.pbm.
std::filesystem::path prediction_path(const std::filesystem::path& pred_dir, const std::string& id);

/// Scores <gt_dir>/<id>.pbm against the prediction for every id, in order.
/// Maps cover a square of side side_m, so the pixel pitch follows from the
/// ground-truth width.
EvalReport evaluate_maps(const std::vector<std::string>& ids, const std::filesystem::path& pred_dir,
                         const std::filesystem::path& gt_dir, double side_m, int workers = 1);

/// Writes <id>.overlay.ppm into out_dir for every scene of `split`.
void render_dataset(const DatasetManifest& manifest, std::optional<Split> split, const std::filesystem::path& pred_dir,
                    const std::filesystem::path& out_dir, int workers = 1);

} // namespace rfrecon
