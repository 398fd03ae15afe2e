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

#include "rfrecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "rfrecon/errors.hpp"

namespace rfrecon {

using ordered_json = nlohmann::ordered_json;

namespace {

void require_same_size(const BinaryMap& a, const BinaryMap& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw DimensionMismatchError("map dimensions differ: " + std::to_string(a.width()) + "x" +
                                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                     std::to_string(b.height()));
    }
}

struct Counts {
    std::size_t both = 0, a = 0, b = 0;
};

Counts count(const BinaryMap& a, const BinaryMap& b) {
    require_same_size(a, b);
    Counts n;
    const auto& x = a.bits();
    const auto& y = b.bits();
    for (std::size_t k = 0; k < x.size(); ++k) {
        n.a += x[k];
        n.b += y[k];
        n.both += x[k] & y[k];
    }
    return n;
}

double ratio(std::size_t num, std::size_t den, bool other_empty) {
    if (den == 0) return other_empty ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

double iou(const BinaryMap& a, const BinaryMap& b) {
    const Counts n = count(a, b);
    const std::size_t uni = n.a + n.b - n.both;
    return uni == 0 ? 1.0 : static_cast<double>(n.both) / static_cast<double>(uni);
}

PrecisionRecall precision_recall(const BinaryMap& gt, const BinaryMap& pred) {
    const Counts n = count(gt, pred);
    return {ratio(n.both, n.b, n.a == 0), ratio(n.both, n.a, n.b == 0)};
}

BoundaryPointSet extract_boundary(const BinaryMap& map, double mpp) {
    BoundaryPointSet out;
    out.diagonal_m = std::hypot(static_cast<double>(map.width()), static_cast<double>(map.height())) * mpp;
    const int w = map.width();
    const int h = map.height();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!map.at(r, c)) continue;
            if (r == 0 || !map.at(r - 1, c)) out.points.push_back({(c + 0.5) * mpp, r * mpp});
            if (r == h - 1 || !map.at(r + 1, c)) out.points.push_back({(c + 0.5) * mpp, (r + 1) * mpp});
            if (c == 0 || !map.at(r, c - 1)) out.points.push_back({c * mpp, (r + 0.5) * mpp});
            if (c == w - 1 || !map.at(r, c + 1)) out.points.push_back({(c + 1) * mpp, (r + 0.5) * mpp});
        }
    }
    return out;
}

BoundaryPointSet extract_boundary(const BinaryMap& map, const GridSpec& grid) {
    if (map.width() != grid.width_px || map.height() != grid.height_px)
        throw DimensionMismatchError("map does not match the grid dimensions");
    return extract_boundary(map, grid.meters_per_pixel());
}

NearestNeighborIndex::NearestNeighborIndex(std::span<const Point2> points) {
    if (points.empty()) return;
    Point2 lo = points.front();
    Point2 hi = points.front();
    for (const auto& p : points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double extent = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
    cell_ = extent / std::max(1.0, std::sqrt(static_cast<double>(points.size())));
    origin_ = lo;
    nx_ = static_cast<int>((hi.x - lo.x) / cell_) + 1;
    ny_ = static_cast<int>((hi.y - lo.y) / cell_) + 1;

    auto cell_of = [&](Point2 p) {
        const int cx = std::min(nx_ - 1, static_cast<int>((p.x - origin_.x) / cell_));
        const int cy = std::min(ny_ - 1, static_cast<int>((p.y - origin_.y) / cell_));
        return static_cast<std::size_t>(cy) * nx_ + cx;
    };
    cell_start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    for (const auto& p : points) ++cell_start_[cell_of(p) + 1];
    std::partial_sum(cell_start_.begin(), cell_start_.end(), cell_start_.begin());
    points_.resize(points.size());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (const auto& p : points) points_[fill[cell_of(p)]++] = p;
}

double NearestNeighborIndex::nearest_squared(Point2 q) const {
    double best = std::numeric_limits<double>::infinity();
    if (points_.empty()) return best;
    const int qx = std::clamp(static_cast<int>(std::floor((q.x - origin_.x) / cell_)), 0, nx_ - 1);
    const int qy = std::clamp(static_cast<int>(std::floor((q.y - origin_.y) / cell_)), 0, ny_ - 1);
    auto scan = [&](int cx, int cy) {
        if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
        const std::size_t cell = static_cast<std::size_t>(cy) * nx_ + cx;
        for (std::size_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
            const double dx = q.x - points_[k].x;
            const double dy = q.y - points_[k].y;
            best = std::min(best, dx * dx + dy * dy);
        }
    };
    const int max_ring = std::max(nx_, ny_);
    for (int ring = 0; ring <= max_ring; ++ring) {
        if (ring == 0) {
            scan(qx, qy);
        } else {
            for (int dx = -ring; dx <= ring; ++dx) {
                scan(qx + dx, qy - ring);
                scan(qx + dx, qy + ring);
            }
            for (int dy = -ring + 1; dy <= ring - 1; ++dy) {
                scan(qx - ring, qy + dy);
                scan(qx + ring, qy + dy);
            }
        }
        // Every point in ring+1 or beyond is at least ring·cell away.
        const double bound = ring * cell_ * (1.0 - 1e-9);
        if (best < bound * bound) break;
    }
    return best;
}

std::vector<double> directed_distances(std::span<const Point2> from, std::span<const Point2> to) {
    const NearestNeighborIndex index(to);
    std::vector<double> out;
    out.reserve(from.size());
    for (const auto& p : from) out.push_back(std::sqrt(index.nearest_squared(p)));
    return out;
}

double ordered_mean(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

namespace {

// Both empty: 0. Exactly one empty: the map diagonal.
bool degenerate(const BoundaryPointSet& p1, const BoundaryPointSet& p2, double& value) {
    if (p1.points.empty() && p2.points.empty()) {
        value = 0.0;
        return true;
    }
    if (p1.points.empty() || p2.points.empty()) {
        value = std::max(p1.diagonal_m, p2.diagonal_m);
        return true;
    }
    return false;
}

} // namespace

double hausdorff(const BoundaryPointSet& p1, const BoundaryPointSet& p2) {
    double value = 0.0;
    if (degenerate(p1, p2, value)) return value;
    const auto d12 = directed_distances(p1.points, p2.points);
    const auto d21 = directed_distances(p2.points, p1.points);
    return std::max(*std::max_element(d12.begin(), d12.end()), *std::max_element(d21.begin(), d21.end()));
}

double chamfer(const BoundaryPointSet& p1, const BoundaryPointSet& p2) {
    double value = 0.0;
    if (degenerate(p1, p2, value)) return value;
    return 0.5 * (ordered_mean(directed_distances(p1.points, p2.points)) +
                  ordered_mean(directed_distances(p2.points, p1.points)));
}

RgbImage render_overlay(const BinaryMap& gt, const BinaryMap& pred, std::span<const Point2> ues,
                        std::span<const Point2> bss, const GridSpec& grid) {
    require_same_size(gt, pred);
    if (gt.width() != grid.width_px || gt.height() != grid.height_px)
        throw DimensionMismatchError("overlay maps do not match the grid dimensions");
    using namespace overlay_colors;
    RgbImage img{gt.width(), gt.height(), std::vector<Rgb>(static_cast<std::size_t>(gt.width()) * gt.height())};
    for (int r = 0; r < gt.height(); ++r) {
        for (int c = 0; c < gt.width(); ++c) {
            const bool g = gt.at(r, c);
            const bool p = pred.at(r, c);
            img.set(r, c, g ? (p ? kTruePositive : kFalseNegative) : (p ? kFalsePositive : kTrueNegative));
        }
    }
    const double mpp = grid.meters_per_pixel();
    auto cross_at = [&](Point2 pos, Rgb color) {
        const int r0 = std::clamp(static_cast<int>(std::floor(pos.y / mpp)), 0, img.height - 1);
        const int c0 = std::clamp(static_cast<int>(std::floor(pos.x / mpp)), 0, img.width - 1);
        for (int k = -2; k <= 2; ++k) {
            if (r0 + k >= 0 && r0 + k < img.height) img.set(r0 + k, c0, color);
            if (c0 + k >= 0 && c0 + k < img.width) img.set(r0, c0 + k, color);
        }
    };
    for (const auto& p : ues) cross_at(p, kUserEquipment);
    for (const auto& p : bss) cross_at(p, kBaseStation);
    return img;
}

MapScores score_map(const std::string& id, const BinaryMap& gt, const BinaryMap& pred, double mpp) {
    if (gt.width() != pred.width() || gt.height() != pred.height()) {
        throw DimensionMismatchError("scene " + id + ": prediction is " + std::to_string(pred.width()) + "x" +
                                     std::to_string(pred.height()) + " but ground truth is " +
                                     std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
    }
    MapScores s;
    s.id = id;
    const auto pr = precision_recall(gt, pred);
    s.recall = pr.recall;
    s.precision = pr.precision;
    s.iou = iou(gt, pred);
    const auto bg = extract_boundary(gt, mpp);
    const auto bp = extract_boundary(pred, mpp);
    s.hausdorff_m = hausdorff(bg, bp);
    s.chamfer_m = chamfer(bg, bp);
    return s;
}

EvalReport aggregate(std::vector<MapScores> maps) {
    EvalReport report;
    report.maps = std::move(maps);
    report.mean.id = "mean";
    if (report.maps.empty()) return report;
    // ordered means, so the result does not depend on the order of the maps
    auto mean_of = [&](double MapScores::*field) {
        std::vector<double> v;
        v.reserve(report.maps.size());
        for (const auto& m : report.maps) v.push_back(m.*field);
        return ordered_mean(std::move(v));
    };
    report.mean.recall = mean_of(&MapScores::recall);
    report.mean.precision = mean_of(&MapScores::precision);
    report.mean.iou = mean_of(&MapScores::iou);
    report.mean.hausdorff_m = mean_of(&MapScores::hausdorff_m);
    report.mean.chamfer_m = mean_of(&MapScores::chamfer_m);
    return report;
}

namespace {

ordered_json scores_json(const MapScores& s, bool with_id) {
    ordered_json j;
    if (with_id) j["id"] = s.id;
    j["recall"] = s.recall;
    j["precision"] = s.precision;
    j["iou"] = s.iou;
    j["hausdorff_m"] = s.hausdorff_m;
    j["chamfer_m"] = s.chamfer_m;
    return j;
}

MapScores scores_from(const ordered_json& j, std::string id) {
    MapScores s;
    s.id = j.contains("id") ? j["id"].get<std::string>() : std::move(id);
    s.recall = j.at("recall").get<double>();
    s.precision = j.at("precision").get<double>();
    s.iou = j.at("iou").get<double>();
    s.hausdorff_m = j.at("hausdorff_m").get<double>();
    s.chamfer_m = j.at("chamfer_m").get<double>();
    return s;
}

} // namespace

std::string report_to_json(const EvalReport& report, int indent) {
    ordered_json j;
    j["maps"] = report.count();
    j["mean"] = scores_json(report.mean, false);
    j["per_map"] = ordered_json::array();
    for (const auto& m : report.maps) j["per_map"].push_back(scores_json(m, true));
    return j.dump(indent);
}

EvalReport report_from_json(const std::string& text) {
    try {
        const auto j = ordered_json::parse(text);
        EvalReport r;
        r.mean = scores_from(j.at("mean"), "mean");
        for (const auto& m : j.at("per_map")) r.maps.push_back(scores_from(m, ""));
        if (j.at("maps").get<std::size_t>() != r.maps.size())
            throw CorruptFormatError("eval report: map count disagrees with per_map length");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFormatError(std::string("eval report: ") + e.what());
    }
}

std::string report_to_table(const EvalReport& report) {
    std::size_t width = 5;
    for (const auto& m : report.maps) width = std::max(width, m.id.size());
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %10s %10s %10s %14s %12s\n", static_cast<int>(width), "scene", "Recall",
                  "Precision", "IoU", "Hausdorff(m)", "Chamfer(m)");
    out += line;
    auto row = [&](const MapScores& m) {
        std::snprintf(line, sizeof line, "%-*s %10.4f %10.4f %10.4f %14.3f %12.3f\n", static_cast<int>(width),
                      m.id.c_str(), m.recall, m.precision, m.iou, m.hausdorff_m, m.chamfer_m);
        out += line;
    };
    for (const auto& m : report.maps) row(m);
    row(report.mean);
    return out;
}

} // namespace rfrecon
