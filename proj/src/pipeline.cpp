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

#include "rfrecon/pipeline.hpp"

#include <algorithm>

#include "rfrecon/errors.hpp"
#include "rfrecon/parallel.hpp"

namespace fs = std::filesystem;

namespace rfrecon {

void reconstruct_dataset(const DatasetManifest& manifest, std::optional<Split> split, const ReconConfig& cfg,
                         const fs::path& out_dir, int workers) {
    cfg.validate();
    const DatasetPaths paths{manifest.root};
    const auto ids = manifest.ids(split);
    parallel_for(ids.size(), workers, [&](std::size_t k) {
        const auto& id = ids[k];
        const Scene scene = scene_from_json(read_file(paths.scene(id)));
        LinkFile lf = links_from_json(read_file(paths.links(id)));
        if (lf.scene_id != id) throw InvariantViolationError(id + ": links file belongs to " + lf.scene_id);
        const ReconInputs inputs{scene.side_m, scene.ues, scene.bss, std::move(lf.links)};
        const auto result = reconstruct(inputs, manifest.grid, cfg);
        write_pgm(out_dir / (id + ".prob.pgm"),
                  probability_image(result.probability, manifest.grid.width_px, manifest.grid.height_px));
        write_pbm(out_dir / (id + ".pred.pbm"), result.map);
    });
}

std::vector<std::string> list_map_ids(const fs::path& gt_dir) {
    std::error_code ec;
    if (!fs::is_directory(gt_dir, ec)) throw MissingFileError("not a directory: " + gt_dir.string());
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(gt_dir)) {
        const auto name = entry.path().filename().string();
        if (!entry.is_regular_file() || entry.path().extension() != ".pbm") continue;
        if (name.size() > 9 && name.ends_with(".pred.pbm")) continue;
        ids.push_back(entry.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

fs::path prediction_path(const fs::path& pred_dir, const std::string& id) {
    const fs::path pred = pred_dir / (id + ".pred.pbm");
    std::error_code ec;
    return fs::exists(pred, ec) ? pred : pred_dir / (id + ".pbm");
}

EvalReport evaluate_maps(const std::vector<std::string>& ids, const fs::path& pred_dir, const fs::path& gt_dir,
                         double side_m, int workers) {
    if (!(side_m > 0.0)) throw ValidationError("side_m must be positive");
    std::vector<MapScores> scores(ids.size());
    parallel_for(ids.size(), workers, [&](std::size_t k) {
        const auto gt = read_pbm(gt_dir / (ids[k] + ".pbm"));
        const auto pred = read_pbm(prediction_path(pred_dir, ids[k]));
        scores[k] = score_map(ids[k], gt, pred, side_m / gt.width());
    });
    return aggregate(std::move(scores));
}

void render_dataset(const DatasetManifest& manifest, std::optional<Split> split, const fs::path& pred_dir,
                    const fs::path& out_dir, int workers) {
    const DatasetPaths paths{manifest.root};
    const auto ids = manifest.ids(split);
    parallel_for(ids.size(), workers, [&](std::size_t k) {
        const auto& id = ids[k];
        const Scene scene = scene_from_json(read_file(paths.scene(id)));
        const auto gt = read_pbm(paths.gt(id));
        const auto pred = read_pbm(prediction_path(pred_dir, id));
        if (pred.width() != gt.width() || pred.height() != gt.height()) {
            throw DimensionMismatchError(id + ": prediction is " + std::to_string(pred.width()) + "x" +
                                         std::to_string(pred.height()) + ", ground truth is " +
                                         std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
        }
        write_ppm(out_dir / (id + ".overlay.ppm"), render_overlay(gt, pred, scene.ues, scene.bss, manifest.grid));
    });
}

} // namespace rfrecon
