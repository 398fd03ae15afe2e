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
#include <span>
#include <vector>

#include "rfrecon/geometry.hpp"
#include "rfrecon/raster.hpp"
#include "rfrecon/raytracer.hpp"
#include "rfrecon/scene.hpp"

namespace rfrecon {

/// Everything the estimator may see: device locations and measured links.
struct ReconInputs {
    double side_m = 200.0;
    std::vector<Point2> ues;
    std::vector<Point2> bss;
    std::vector<RadioLink> links;
};

/// Drops the buildings and all tracer truth from a traced scene.
ReconInputs observe(const Scene& scene, const std::vector<RadioLink>& links);

enum class UnknownFill { Free, Building };

struct ReconConfig {
    double length_tol_m = 0.5;
    double angle_tol_rad = 1e-3;
    int carve_width_px = 1;
    int wall_dilate_px = 1;
    int min_evidence = 1;
    UnknownFill unknown_fill = UnknownFill::Free;
    double c = kSpeedOfLight;

    void validate() const;
};

/// Triangulated reflection point hypothesised to lie on a wall.
struct EvidencePoint {
    Point2 position;
    double normal = 0.0;    // points from the wall into free space, [0, 2π)
    double residual = 0.0;  // | |ue-q| + |q-bs| - c·τ |, meters
    int ue_index = -1;
    int bs_index = -1;
    int path_index = -1;
};

struct LosTolerance {
    double length_m = 0.5;
    double angle_rad = 1e-3;
};

/// Path length matches |ue - bs| and both angles point along the direct line.
bool classify_los(Point2 ue, Point2 bs, const PathDescriptor& path, LosTolerance tol, double c = kSpeedOfLight);

/// Intersects the AoD ray from the UE with the AoA ray from the BS and keeps
/// the point if the two legs add up to c·τ within cfg.length_tol_m.
std::optional<EvidencePoint> estimate_single_bounce(Point2 ue, Point2 bs, const PathDescriptor& path,
                                                    const ReconConfig& cfg);

/// Per-pixel vote counters. Accumulation is commutative, so the final grid
/// does not depend on the order links are processed in.
struct EvidenceGrid {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> free_votes;
    std::vector<std::uint32_t> wall_votes;

    EvidenceGrid(int w, int h);
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * width + col; }
    friend bool operator==(const EvidenceGrid&, const EvidenceGrid&) = default;
};

/// Marks every pixel whose interior the segment crosses (supercover, with a
/// 1e-6 px inset so touching an edge or corner does not count). With
/// carve_width_px > 1 pixels whose center lies within (width-1)/2 px of the
/// segment are added. `exclude` removes one pixel (e.g. the one holding a
/// reflection point).
void carve_segment(EvidenceGrid& acc, Point2 a, Point2 b, const GridSpec& grid, int carve_width_px,
                   std::optional<Point2> exclude = std::nullopt);

/// Free-space carving for one UE-BS pair: full segment for LOS paths, both
/// legs (minus the reflection pixel) for accepted single-bounce evidence.
/// Returns the accepted evidence.
std::vector<EvidencePoint> carve_free(EvidenceGrid& acc, Point2 ue, Point2 bs, std::span<const PathDescriptor> paths,
                                      const GridSpec& grid, const ReconConfig& cfg);

/// Pixel just behind the wall at an evidence point, or nullopt off-map.
std::optional<std::pair<int, int>> wall_pixel(const EvidencePoint& e, const GridSpec& grid);

struct ReconResult {
    BinaryMap map;
    std::vector<double> probability;  // row-major, [0, 1]
    std::vector<EvidencePoint> evidence;
    EvidenceGrid votes;
};

/// classify -> triangulate -> vote -> threshold. probability is 0 on carved
/// pixels, s / (s + min_evidence) where s is the largest wall vote count in the
/// dilation window, and 0 (free fill) or 0.5 (building fill) with no evidence.
/// map = probability >= 0.5. Throws ValidationError if any path carries truth.
ReconResult reconstruct(const ReconInputs& inputs, const GridSpec& grid, const ReconConfig& cfg);

/// Probability map quantized to 8 bits for PGM output.
GrayImage probability_image(const std::vector<double>& probability, int width, int height);

} // namespace rfrecon
