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

#include <span>
#include <string>
#include <vector>

#include "rfrecon/geometry.hpp"
#include "rfrecon/raster.hpp"

namespace rfrecon {

/// |a ∧ b| / |a ∨ b|; 1.0 when both maps are empty.
double iou(const BinaryMap& a, const BinaryMap& b);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

/// precision = |pred ∧ gt| / |pred|, recall = |pred ∧ gt| / |gt|. An empty
/// denominator scores 1.0 when the other map is empty too and 0.0 otherwise.
PrecisionRecall precision_recall(const BinaryMap& gt, const BinaryMap& pred);

/// Building outline sampled at the centers of pixel edges separating a
/// building pixel from free space or the map border, in meters.
struct BoundaryPointSet {
    std::vector<Point2> points;
    /// Distance reported when exactly one of two compared sets is empty.
    double diagonal_m = 0.0;
};

BoundaryPointSet extract_boundary(const BinaryMap& map, double meters_per_pixel);
BoundaryPointSet extract_boundary(const BinaryMap& map, const GridSpec& grid);

/// Uniform bucket grid over a point set for exact nearest-neighbour queries.
class NearestNeighborIndex {
public:
    explicit NearestNeighborIndex(std::span<const Point2> points);

    /// Exact min over the indexed points of dx² + dy²; +inf when empty.
    double nearest_squared(Point2 q) const;

private:
    std::vector<Point2> points_;
    std::vector<std::size_t> cell_start_;
    Point2 origin_;
    double cell_ = 1.0;
    int nx_ = 0;
    int ny_ = 0;
};

/// d(p, to) for every p in `from`, in input order.
std::vector<double> directed_distances(std::span<const Point2> from, std::span<const Point2> to);

/// Sum in ascending order divided by count, so the result does not depend on
/// the order of the input.
double ordered_mean(std::vector<double> values);

double hausdorff(const BoundaryPointSet& p1, const BoundaryPointSet& p2);
double chamfer(const BoundaryPointSet& p1, const BoundaryPointSet& p2);

namespace overlay_colors {
inline constexpr Rgb kTruePositive{255, 255, 255};
inline constexpr Rgb kFalseNegative{128, 128, 128};
inline constexpr Rgb kFalsePositive{139, 0, 0};
inline constexpr Rgb kTrueNegative{0, 0, 0};
inline constexpr Rgb kBaseStation{255, 165, 0};
inline constexpr Rgb kUserEquipment{0, 0, 255};
} // namespace overlay_colors

/// Confusion overlay with crosses (arm length 2 px) at UEs, then BSs on top.
RgbImage render_overlay(const BinaryMap& gt, const BinaryMap& pred, std::span<const Point2> ues,
                        std::span<const Point2> bss, const GridSpec& grid);

struct MapScores {
    std::string id;
    double recall = 0.0;
    double precision = 0.0;
    double iou = 0.0;
    double hausdorff_m = 0.0;
    double chamfer_m = 0.0;

    friend bool operator==(const MapScores&, const MapScores&) = default;
};

/// Throws DimensionMismatchError naming `id` when the maps disagree in size.
MapScores score_map(const std::string& id, const BinaryMap& gt, const BinaryMap& pred, double meters_per_pixel);

struct EvalReport {
    std::vector<MapScores> maps;
    MapScores mean;  // id "mean"; arithmetic mean over maps

    std::size_t count() const { return maps.size(); }
};

EvalReport aggregate(std::vector<MapScores> maps);

std::string report_to_json(const EvalReport& report, int indent = 2);
EvalReport report_from_json(const std::string& text);
/// Aligned table in the column order Recall, Precision, IoU, Hausdorff, Chamfer.
std::string report_to_table(const EvalReport& report);

} // namespace rfrecon
