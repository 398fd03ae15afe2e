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

#include "rfrecon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "rfrecon/errors.hpp"
#include "rfrecon/parallel.hpp"
#include "rfrecon/rng.hpp"

namespace rfrecon {

using ordered_json = nlohmann::ordered_json;

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw ValidationError("unknown split '" + name + "' (expected train, val or test)");
}

void SplitRatios::validate() const {
    for (double r : {train, val, test}) {
        if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("split ratios must be positive");
    }
    if (std::fabs(train + val + test - 1.0) > 1e-9) {
        throw ValidationError("split ratios must sum to 1, got " + std::to_string(train + val + test));
    }
}

std::array<int, 3> split_sizes(int n, const SplitRatios& ratios) {
    ratios.validate();
    if (n < 0) throw ValidationError("scene count must be non-negative");
    const std::array<double, 3> quota{n * ratios.train, n * ratios.val, n * ratios.test};
    std::array<int, 3> sizes{};
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
        sizes[i] = static_cast<int>(std::floor(quota[i]));
        assigned += sizes[i];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
    });
    for (int k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
    return sizes;
}

std::vector<Split> assign_splits(int n, const SplitRatios& ratios, std::uint64_t seed) {
    const auto sizes = split_sizes(n, ratios);
    std::vector<Split> labels;
    labels.reserve(n);
    for (int i = 0; i < 3; ++i) labels.insert(labels.end(), sizes[i], static_cast<Split>(i));
    Rng rng(derive_seed(seed, ~std::uint64_t{0}));
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.uniform_int(0, i));
        std::swap(labels[i], labels[j]);
    }
    return labels;
}

std::string scene_id(std::uint64_t seed, int k) { return "scene_" + std::to_string(seed) + "_" + std::to_string(k); }

std::vector<std::string> DatasetManifest::ids(std::optional<Split> split) const {
    std::vector<std::string> out;
    for (const auto& e : scenes) {
        if (!split || e.split == *split) out.push_back(e.id);
    }
    return out;
}

bool DatasetManifest::contains(const std::string& id) const {
    return std::any_of(scenes.begin(), scenes.end(), [&](const ManifestEntry& e) { return e.id == id; });
}

GenParams DatasetManifest::scene_params(int k) const {
    GenParams p = params;
    p.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    p.id = scene_id(seed, k);
    return p;
}

namespace {

ordered_json grid_json(const GridSpec& g) {
    return {{"width_px", g.width_px}, {"height_px", g.height_px}, {"side_m", g.side_m}};
}

ordered_json params_json(const GenParams& p) {
    return {{"n_buildings", {p.n_buildings.lo, p.n_buildings.hi}},
            {"building_width_m", {p.building_width_m.lo, p.building_width_m.hi}},
            {"building_height_m", {p.building_height_m.lo, p.building_height_m.hi}},
            {"n_ues", p.n_ues},
            {"n_bss", p.n_bss},
            {"side_m", p.side_m},
            {"min_gap_m", p.min_gap_m},
            {"align_px", p.align_px},
            {"device_clearance_m", p.device_clearance_m}};
}

ordered_json trace_json(const TraceConfig& t) {
    return {{"max_bounces", t.max_bounces},     {"max_paths_per_pair", t.max_paths_per_pair},
            {"c", t.c},                         {"angle_noise_rad", t.angle_noise_rad},
            {"delay_noise_s", t.delay_noise_s}, {"noise_seed", t.noise_seed}};
}

template <typename T>
T field(const ordered_json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw CorruptFormatError(std::string("manifest: missing field ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw CorruptFormatError(std::string("manifest: field ") + key + " has the wrong type");
    }
}

} // namespace

std::string manifest_to_json(const DatasetManifest& m) {
    ordered_json j;
    j["format_version"] = m.format_version;
    j["seed"] = m.seed;
    j["grid"] = grid_json(m.grid);
    j["gen_params"] = params_json(m.params);
    j["trace"] = trace_json(m.trace);
    j["split_ratios"] = {{"train", m.ratios.train}, {"val", m.ratios.val}, {"test", m.ratios.test}};
    j["tensor_layout"] = "per_ue_max";
    j["tensor_channels"] = m.tensor_channels();
    j["scenes"] = ordered_json::array();
    for (const auto& e : m.scenes) j["scenes"].push_back({{"id", e.id}, {"split", split_name(e.split)}});
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFormatError(std::string("manifest: ") + e.what());
    }
    DatasetManifest m;
    m.format_version = field<int>(j, "format_version");
    if (m.format_version != kManifestFormatVersion) {
        throw CorruptFormatError("manifest: unsupported format_version " + std::to_string(m.format_version));
    }
    m.seed = field<std::uint64_t>(j, "seed");

    const auto g = field<ordered_json>(j, "grid");
    m.grid = {field<int>(g, "width_px"), field<int>(g, "height_px"), field<double>(g, "side_m")};

    const auto p = field<ordered_json>(j, "gen_params");
    const auto nb = field<std::array<int, 2>>(p, "n_buildings");
    const auto bw = field<std::array<double, 2>>(p, "building_width_m");
    const auto bh = field<std::array<double, 2>>(p, "building_height_m");
    m.params.n_buildings = {nb[0], nb[1]};
    m.params.building_width_m = {bw[0], bw[1]};
    m.params.building_height_m = {bh[0], bh[1]};
    m.params.n_ues = field<int>(p, "n_ues");
    m.params.n_bss = field<int>(p, "n_bss");
    m.params.side_m = field<double>(p, "side_m");
    m.params.min_gap_m = field<double>(p, "min_gap_m");
    m.params.align_px = field<int>(p, "align_px");
    m.params.device_clearance_m = field<double>(p, "device_clearance_m");

    const auto t = field<ordered_json>(j, "trace");
    m.trace.max_bounces = field<int>(t, "max_bounces");
    m.trace.max_paths_per_pair = field<int>(t, "max_paths_per_pair");
    m.trace.c = field<double>(t, "c");
    m.trace.angle_noise_rad = field<double>(t, "angle_noise_rad");
    m.trace.delay_noise_s = field<double>(t, "delay_noise_s");
    m.trace.noise_seed = field<std::uint64_t>(t, "noise_seed");

    const auto r = field<ordered_json>(j, "split_ratios");
    m.ratios = {field<double>(r, "train"), field<double>(r, "val"), field<double>(r, "test")};

    if (field<std::string>(j, "tensor_layout") != "per_ue_max") throw CorruptFormatError("manifest: unknown tensor_layout");
    if (field<int>(j, "tensor_channels") != m.tensor_channels())
        throw InvariantViolationError("manifest: tensor_channels does not match 2 * n_ues");

    std::set<std::string> seen;
    for (const auto& e : field<ordered_json>(j, "scenes")) {
        ManifestEntry entry{field<std::string>(e, "id"), Split::Train};
        try {
            entry.split = parse_split(field<std::string>(e, "split"));
        } catch (const ValidationError& err) {
            throw CorruptFormatError(std::string("manifest: ") + err.what());
        }
        if (!seen.insert(entry.id).second) throw InvariantViolationError("manifest: duplicate scene id " + entry.id);
        m.scenes.push_back(std::move(entry));
    }
    try {
        m.grid.validate();
        m.params.validate();
        m.trace.validate();
        m.ratios.validate();
    } catch (const ValidationError& err) {
        throw InvariantViolationError(std::string("manifest: ") + err.what());
    }
    return m;
}

std::string features_to_json(const Scene& scene, const std::vector<RadioLink>& links, double c) {
    ordered_json j;
    j["scene_id"] = scene.id;
    j["pairs"] = ordered_json::array();
    for (const auto& link : links) {
        const auto f = encode_link_features(link, scene.ues.at(link.ue_index), scene.bss.at(link.bs_index), scene.side_m, c);
        ordered_json values = ordered_json::array();
        for (float v : f) values.push_back(v);
        j["pairs"].push_back({{"ue", link.ue_index}, {"bs", link.bs_index}, {"features", std::move(values)}});
    }
    return j.dump() + "\n";
}

namespace {

void write_encoded(const DatasetPaths& paths, const Scene& scene, const std::vector<RadioLink>& links,
                   const GridSpec& grid, double c) {
    write_tensor(paths.tensor(scene.id), encode_scene_combined(scene.ues, scene.bss, links, grid, c));
    write_file(paths.features(scene.id), features_to_json(scene, links, c));
}

} // namespace

DatasetManifest build_dataset(const GenParams& params, int n_scenes, const SplitRatios& ratios, std::uint64_t seed,
                              const std::filesystem::path& root, const BuildOptions& options) {
    ratios.validate();
    params.validate();
    options.grid.validate();
    options.trace.validate();
    if (n_scenes < 1) throw ValidationError("scene count must be at least 1");
    if (options.grid.side_m != params.side_m) {
        throw ExtentMismatchError("grid side does not match generator side");
    }

    DatasetManifest m;
    m.root = root;
    m.seed = seed;
    m.grid = options.grid;
    m.params = params;
    m.params.seed = 0;
    m.params.id.clear();
    m.trace = options.trace;
    m.ratios = ratios;
    const auto splits = assign_splits(n_scenes, ratios, seed);
    for (int k = 0; k < n_scenes; ++k) m.scenes.push_back({scene_id(seed, k), splits[k]});

    const DatasetPaths paths{root};
    std::error_code ec;
    std::filesystem::remove(paths.manifest(), ec);
    if (ec) throw IoError("cannot remove stale manifest " + paths.manifest().string() + ": " + ec.message());

    parallel_for(static_cast<std::size_t>(n_scenes), options.workers, [&](std::size_t k) {
        const Scene scene = generate_scene(m.scene_params(static_cast<int>(k)));
        const auto links = trace_scene(scene, m.trace, 1);
        write_file(paths.scene(scene.id), scene_to_json(scene));
        write_file(paths.links(scene.id), links_to_json(scene.id, links));
        write_encoded(paths, scene, links, m.grid, m.trace.c);
        write_pbm(paths.gt(scene.id), rasterize_scene(scene, m.grid));
    });
    write_file(paths.manifest(), manifest_to_json(m));
    return m;
}

DatasetManifest load_manifest(const std::filesystem::path& root) {
    DatasetManifest m = manifest_from_json(read_file(DatasetPaths{root}.manifest()));
    m.root = root;
    return m;
}

SceneBundle load_scene_bundle(const DatasetManifest& manifest, const std::string& id) {
    if (!manifest.contains(id)) throw ValidationError("scene " + id + " is not in the manifest");
    const DatasetPaths paths{manifest.root};
    auto fail = [&](const std::string& what) { throw InvariantViolationError(id + ": " + what); };

    Scene scene = scene_from_json(read_file(paths.scene(id)));
    if (scene.id != id) fail("scene file holds id " + scene.id);
    if (scene.side_m != manifest.grid.side_m) fail("scene side does not match the manifest grid");

    LinkFile lf = links_from_json(read_file(paths.links(id)));
    if (lf.scene_id != id) fail("links file belongs to " + lf.scene_id);
    const std::size_t nu = scene.ues.size();
    const std::size_t nb = scene.bss.size();
    if (lf.links.size() != nu * nb) fail("expected " + std::to_string(nu * nb) + " links, got " + std::to_string(lf.links.size()));
    for (std::size_t k = 0; k < lf.links.size(); ++k) {
        if (lf.links[k].ue_index != static_cast<int>(k / nb) || lf.links[k].bs_index != static_cast<int>(k % nb))
            fail("links are not in (ue, bs) order at position " + std::to_string(k));
    }

    RayImageTensor tensor = read_tensor(paths.tensor(id));
    if (!(tensor.grid == manifest.grid)) fail("tensor grid does not match the manifest");
    if (tensor.channels() != 2 * nu) fail("tensor has " + std::to_string(tensor.channels()) + " channels, expected " + std::to_string(2 * nu));
    for (std::size_t k = 0; k < tensor.channels(); ++k) {
        const ChannelLabel want{static_cast<int>(k / 2), -1, k % 2 == 0 ? AngleRole::Aoa : AngleRole::Aod};
        if (!(tensor.labels[k] == want)) fail("unexpected channel label " + tensor.labels[k].str());
    }

    BinaryMap gt = read_pbm(paths.gt(id));
    if (gt.width() != manifest.grid.width_px || gt.height() != manifest.grid.height_px)
        fail("ground-truth map has the wrong dimensions");
    if (!(gt == rasterize_scene(scene, manifest.grid))) fail("ground-truth map does not match the scene");

    return {std::move(scene), std::move(lf.links), std::move(tensor), std::move(gt)};
}

void retrace_dataset(const DatasetManifest& manifest, int workers) {
    const DatasetPaths paths{manifest.root};
    parallel_for(manifest.scenes.size(), workers, [&](std::size_t k) {
        const auto& id = manifest.scenes[k].id;
        const Scene scene = scene_from_json(read_file(paths.scene(id)));
        write_file(paths.links(id), links_to_json(id, trace_scene(scene, manifest.trace, 1)));
    });
}

void encode_dataset(const DatasetManifest& manifest, int workers) {
    const DatasetPaths paths{manifest.root};
    parallel_for(manifest.scenes.size(), workers, [&](std::size_t k) {
        const auto& id = manifest.scenes[k].id;
        const Scene scene = scene_from_json(read_file(paths.scene(id)));
        const LinkFile lf = links_from_json(read_file(paths.links(id)));
        if (lf.scene_id != id) throw InvariantViolationError(id + ": links file belongs to " + lf.scene_id);
        write_encoded(paths, scene, lf.links, manifest.grid, manifest.trace.c);
    });
}

} // namespace rfrecon
