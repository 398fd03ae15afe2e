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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfrecon/geometry.hpp"
#include "rfrecon/scene.hpp"

namespace rfrecon {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Tracer-side ground truth for one path. Only tests look at this; it is
/// never serialized and the reconstructor rejects inputs that carry it.
struct PathTruth {
    int bounces = 0;
    std::vector<Point2> vertices;  // ue, reflection points..., bs
    std::vector<std::pair<int, int>> walls;  // (building, edge) per bounce

    friend bool operator==(const PathTruth&, const PathTruth&) = default;
};

/// One propagation path between a UE and a BS.
struct PathDescriptor {
    double aoa = 0.0;    // at the BS, direction towards the last path vertex, [0, 2π)
    double aod = 0.0;    // at the UE, direction of the first leg, [0, 2π)
    double delay = 0.0;  // seconds
    std::optional<PathTruth> truth;

    double length_m(double c = kSpeedOfLight) const { return delay * c; }

    friend bool operator==(const PathDescriptor&, const PathDescriptor&) = default;
};

struct RadioLink {
    int ue_index = 0;
    int bs_index = 0;
    std::vector<PathDescriptor> paths;  // ascending delay

    friend bool operator==(const RadioLink&, const RadioLink&) = default;
};

struct TraceConfig {
    int max_bounces = 2;  // 0, 1 or 2
    int max_paths_per_pair = 25;
    double c = kSpeedOfLight;
    // Measurement noise hook; zero means noise-free.
    double angle_noise_rad = 0.0;
    double delay_noise_s = 0.0;
    std::uint64_t noise_seed = 0;

    void validate() const;
};

/// LOS plus every specular path up to cfg.max_bounces found with the
/// mirror-image method, each leg occlusion-checked. Returns at most
/// cfg.max_paths_per_pair paths, shortest first. Throws
/// DeviceInsideBuildingError when either endpoint is strictly inside a building.
std::vector<PathDescriptor> trace_pair(const Scene& scene, Point2 ue, Point2 bs, const TraceConfig& cfg);

/// One link per (ue, bs) in lexicographic order. Pairs may be traced on
/// `workers` threads; the result does not depend on the worker count.
std::vector<RadioLink> trace_scene(const Scene& scene, const TraceConfig& cfg, int workers = 1);

/// Copies of the links with all truth metadata removed.
std::vector<RadioLink> strip_truth(std::vector<RadioLink> links);

// JSON: {"scene_id", "links": [{"ue", "bs", "paths": [[aoa, aod, delay], ...]}]}.
std::string links_to_json(const std::string& scene_id, const std::vector<RadioLink>& links);

struct LinkFile {
    std::string scene_id;
    std::vector<RadioLink> links;
};
LinkFile links_from_json(const std::string& text);

} // namespace rfrecon
