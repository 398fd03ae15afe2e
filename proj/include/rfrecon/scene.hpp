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
#include <string>
#include <vector>

#include "rfrecon/geometry.hpp"
#include "rfrecon/raster.hpp"

namespace rfrecon {

/// Ground-truth world: square extent [0, side_m]², building footprints and
/// device locations. A plain value; validate_scene() checks the invariants.
struct Scene {
    std::string id;
    double side_m = 200.0;
    std::vector<SimplePolygon> buildings;
    std::vector<Point2> ues;
    std::vector<Point2> bss;

    friend bool operator==(const Scene&, const Scene&) = default;
};

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct MeterRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct GenParams {
    IntRange n_buildings{4, 12};
    MeterRange building_width_m{10.0, 40.0};
    MeterRange building_height_m{10.0, 40.0};
    int n_ues = 30;
    int n_bss = 5;
    double side_m = 200.0;
    double min_gap_m = 4.0;
    /// Building corners snap to multiples of side_m / align_px so that walls
    /// fall on pixel boundaries of a grid with that resolution. 0 disables.
    int align_px = 224;
    /// Minimum clearance between a device and any building.
    double device_clearance_m = 0.5;
    std::uint64_t seed = 0;
    std::string id;  // empty: "scene_<seed>"

    void validate() const;
};

inline constexpr int kMaxPlacementAttempts = 10000;

/// Deterministic in params.seed. Buildings are axis-aligned rectangles placed
/// by rejection sampling; devices are uniform in free space. Throws
/// PlacementError when an entity cannot be placed in kMaxPlacementAttempts.
Scene generate_scene(const GenParams& params);

/// Checks every Scene invariant from scratch; throws InvariantViolationError.
void validate_scene(const Scene& scene);

/// True iff p lies strictly inside some building.
bool inside_any_building(const Scene& scene, Point2 p);

/// Pixel = 1 iff its center lies inside or on the boundary of a building.
/// Throws ExtentMismatchError when grid.side_m != scene.side_m.
BinaryMap rasterize_scene(const Scene& scene, const GridSpec& grid);

// JSON: {"id", "side_m", "buildings", "ues", "bss"} in that order.
std::string scene_to_json(const Scene& scene);
/// Parses and validates; throws CorruptFormatError or InvariantViolationError.
Scene scene_from_json(const std::string& text);

} // namespace rfrecon
