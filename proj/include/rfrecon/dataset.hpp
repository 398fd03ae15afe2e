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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rfrecon/encoder.hpp"
#include "rfrecon/raster.hpp"
#include "rfrecon/raytracer.hpp"
#include "rfrecon/scene.hpp"

namespace rfrecon {

inline constexpr int kManifestFormatVersion = 1;

enum class Split { Train, Val, Test };

std::string split_name(Split s);
/// Throws ValidationError for anything but "train", "val" or "test".
Split parse_split(const std::string& name);

struct SplitRatios {
    double train = 0.93;
    double val = 0.06;
    double test = 0.01;

    /// Each ratio positive and the sum within 1e-9 of 1.
    void validate() const;
};

/// Largest-remainder apportionment of n into (train, val, test). Ties in the
/// remainder go to the earlier split.
std::array<int, 3> split_sizes(int n, const SplitRatios& ratios);

/// Split of scene k for k in [0, n). Depends only on (n, ratios, seed).
std::vector<Split> assign_splits(int n, const SplitRatios& ratios, std::uint64_t seed);

struct ManifestEntry {
    std::string id;
    Split split = Split::Train;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    std::filesystem::path root;  // where it was loaded from; not serialized
    int format_version = kManifestFormatVersion;
    std::uint64_t seed = 0;
    GridSpec grid;
    GenParams params;  // per-scene seed and id are derived, see scene_params()
    TraceConfig trace;
    SplitRatios ratios;
    std::vector<ManifestEntry> scenes;

    /// Channels per stored tensor: AoA and AoD planes per UE.
    int tensor_channels() const { return 2 * params.n_ues; }
    std::vector<std::string> ids(std::optional<Split> split = std::nullopt) const;
    bool contains(const std::string& id) const;
    /// Generator parameters for the k-th scene.
    GenParams scene_params(int k) const;
};

std::string scene_id(std::uint64_t seed, int k);  // "scene_{seed}_{k}"

std::string manifest_to_json(const DatasetManifest& manifest);
/// Throws CorruptFormatError or InvariantViolationError (duplicate ids).
DatasetManifest manifest_from_json(const std::string& text);

/// Per-scene file locations under a dataset root.
struct DatasetPaths {
    std::filesystem::path root;

    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path scene(const std::string& id) const { return root / "scenes" / (id + ".json"); }
    std::filesystem::path links(const std::string& id) const { return root / "links" / (id + ".json"); }
    std::filesystem::path tensor(const std::string& id) const { return root / "tensors" / (id + ".rft"); }
    std::filesystem::path features(const std::string& id) const { return root / "features" / (id + ".json"); }
    std::filesystem::path gt(const std::string& id) const { return root / "gt" / (id + ".pbm"); }
};

struct BuildOptions {
    GridSpec grid;
    TraceConfig trace;
    int workers = 1;
};

/// Generates, traces, encodes and rasterizes n_scenes scenes into `root`,
/// then writes the manifest. Any previous manifest is removed first, so a
/// root without manifest.json is an incomplete dataset.
DatasetManifest build_dataset(const GenParams& params, int n_scenes, const SplitRatios& ratios, std::uint64_t seed,
                              const std::filesystem::path& root, const BuildOptions& options = {});

/// Throws MissingFileError when root/manifest.json is absent.
DatasetManifest load_manifest(const std::filesystem::path& root);

struct SceneBundle {
    Scene scene;
    std::vector<RadioLink> links;
    RayImageTensor tensor;
    BinaryMap gt;
};

/// Loads and cross-checks the four artifacts of one scene.
SceneBundle load_scene_bundle(const DatasetManifest& manifest, const std::string& id);

/// Re-traces every scene in the manifest and rewrites its links file.
void retrace_dataset(const DatasetManifest& manifest, int workers = 1);

/// Rewrites the tensor and feature files of every scene from its links.
void encode_dataset(const DatasetManifest& manifest, int workers = 1);

// {"scene_id", "pairs": [{"ue", "bs", "features": [35 floats]}]}
std::string features_to_json(const Scene& scene, const std::vector<RadioLink>& links, double c = kSpeedOfLight);

} // namespace rfrecon
