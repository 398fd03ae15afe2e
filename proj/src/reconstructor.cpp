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

#include "rfrecon/reconstructor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "rfrecon/errors.hpp"

namespace rfrecon {

ReconInputs observe(const Scene& scene, const std::vector<RadioLink>& links) {
    return {scene.side_m, scene.ues, scene.bss, strip_truth(links)};
}

void ReconConfig::validate() const {
    if (!(length_tol_m > 0.0) || !(angle_tol_rad > 0.0)) throw ValidationError("tolerances must be positive");
    if (carve_width_px < 1) throw ValidationError("carve_width_px must be >= 1");
    if (wall_dilate_px < 0) throw ValidationError("wall_dilate_px must be >= 0");
    if (min_evidence < 1) throw ValidationError("min_evidence must be >= 1");
    if (!(c > 0.0)) throw ValidationError("propagation speed must be positive");
}

bool classify_los(Point2 ue, Point2 bs, const PathDescriptor& path, LosTolerance tol, double c) {
    if (std::fabs(path.delay * c - distance(ue, bs)) > tol.length_m) return false;
    return angular_distance(path.aod, direction_angle(bs - ue)) <= tol.angle_rad &&
           angular_distance(path.aoa, direction_angle(ue - bs)) <= tol.angle_rad;
}

std::optional<EvidencePoint> estimate_single_bounce(Point2 ue, Point2 bs, const PathDescriptor& path,
                                                    const ReconConfig& cfg) {
    if (classify_los(ue, bs, path, {cfg.length_tol_m, cfg.angle_tol_rad}, cfg.c)) return std::nullopt;
    const auto q = ray_ray_intersection(Ray(ue, path.aod), Ray(bs, path.aoa));
    if (!q) return std::nullopt;
    const double legs = distance(ue, *q) + distance(*q, bs);
    const double residual = std::fabs(legs - path.delay * cfg.c);
    if (residual > cfg.length_tol_m) return std::nullopt;
    const Point2 in = (1.0 / distance(ue, *q)) * (*q - ue);
    const Point2 out = (1.0 / distance(*q, bs)) * (bs - *q);
    const Point2 turn = out - in;
    if (norm(turn) <= kGeomTol) return std::nullopt;
    EvidencePoint e;
    e.position = *q;
    e.normal = direction_angle(turn);
    e.residual = residual;
    return e;
}

EvidenceGrid::EvidenceGrid(int w, int h)
    : width(w), height(h), free_votes(static_cast<std::size_t>(w) * h, 0), wall_votes(static_cast<std::size_t>(w) * h, 0) {}

namespace {

constexpr double kCellInset = 1e-6;  // pixels

std::optional<std::size_t> pixel_of(Point2 p, const GridSpec& grid) {
    const double mpp = grid.meters_per_pixel();
    const int c = static_cast<int>(std::floor(p.x / mpp));
    const int r = static_cast<int>(std::floor(p.y / mpp));
    if (c < 0 || r < 0 || c >= grid.width_px || r >= grid.height_px) return std::nullopt;
    return static_cast<std::size_t>(r) * grid.width_px + c;
}

// Rows whose inset interior (r + inset, r + 1 - inset) meets [ylo, yhi].
template <typename Fn>
void rows_hit(double ylo, double yhi, int height, Fn&& mark) {
    const int r0 = std::max(0, static_cast<int>(std::floor(ylo)) - 1);
    const int r1 = std::min(height - 1, static_cast<int>(std::floor(yhi)) + 1);
    for (int r = r0; r <= r1; ++r) {
        if (ylo < r + 1 - kCellInset && yhi > r + kCellInset) mark(r);
    }
}

} // namespace

void carve_segment(EvidenceGrid& acc, Point2 a, Point2 b, const GridSpec& grid, int carve_width_px,
                   std::optional<Point2> exclude) {
    const double mpp = grid.meters_per_pixel();
    Point2 p{a.x / mpp, a.y / mpp};
    Point2 q{b.x / mpp, b.y / mpp};
    if (q.x < p.x) std::swap(p, q);
    const int w = acc.width;
    const int h = acc.height;

    std::vector<std::size_t> hits;
    if (q.x - p.x < 1e-12) {
        const int c = static_cast<int>(std::floor(p.x));
        if (c >= 0 && c < w && p.x > c + kCellInset && p.x < c + 1 - kCellInset) {
            rows_hit(std::min(p.y, q.y), std::max(p.y, q.y), h,
                     [&](int r) { hits.push_back(static_cast<std::size_t>(r) * w + c); });
        }
    } else {
        const double slope = (q.y - p.y) / (q.x - p.x);
        const int c0 = std::max(0, static_cast<int>(std::floor(p.x)));
        const int c1 = std::min(w - 1, static_cast<int>(std::floor(q.x)));
        for (int c = c0; c <= c1; ++c) {
            const double xlo = std::max(p.x, c + kCellInset);
            const double xhi = std::min(q.x, c + 1 - kCellInset);
            if (xlo > xhi) continue;
            const double ya = p.y + (xlo - p.x) * slope;
            const double yb = p.y + (xhi - p.x) * slope;
            rows_hit(std::min(ya, yb), std::max(ya, yb), h,
                     [&](int r) { hits.push_back(static_cast<std::size_t>(r) * w + c); });
        }
    }
    if (carve_width_px > 1) {
        const double half = 0.5 * (carve_width_px - 1);
        const Segment seg{p, q};
        const int reach = static_cast<int>(std::ceil(half)) + 1;
        const int c0 = std::max(0, static_cast<int>(std::floor(p.x)) - reach);
        const int c1 = std::min(w - 1, static_cast<int>(std::floor(q.x)) + reach);
        const int r0 = std::max(0, static_cast<int>(std::floor(std::min(p.y, q.y))) - reach);
        const int r1 = std::min(h - 1, static_cast<int>(std::floor(std::max(p.y, q.y))) + reach);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                if (point_segment_distance({c + 0.5, r + 0.5}, seg) <= half)
                    hits.push_back(static_cast<std::size_t>(r) * w + c);
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    const auto skip = exclude ? pixel_of(*exclude, grid) : std::nullopt;
    for (std::size_t k : hits) {
        if (skip && *skip == k) continue;
        ++acc.free_votes[k];
    }
}

std::vector<EvidencePoint> carve_free(EvidenceGrid& acc, Point2 ue, Point2 bs, std::span<const PathDescriptor> paths,
                                      const GridSpec& grid, const ReconConfig& cfg) {
    std::vector<EvidencePoint> accepted;
    const LosTolerance tol{cfg.length_tol_m, cfg.angle_tol_rad};
    for (std::size_t k = 0; k < paths.size(); ++k) {
        if (classify_los(ue, bs, paths[k], tol, cfg.c)) {
            carve_segment(acc, ue, bs, grid, cfg.carve_width_px);
            continue;
        }
        auto e = estimate_single_bounce(ue, bs, paths[k], cfg);
        if (!e) continue;
        const Point2 q = e->position;
        if (q.x < 0.0 || q.y < 0.0 || q.x > grid.side_m || q.y > grid.side_m) continue;
        carve_segment(acc, ue, q, grid, cfg.carve_width_px, q);
        carve_segment(acc, q, bs, grid, cfg.carve_width_px, q);
        e->path_index = static_cast<int>(k);
        accepted.push_back(*e);
    }
    return accepted;
}

std::optional<std::pair<int, int>> wall_pixel(const EvidencePoint& e, const GridSpec& grid) {
    const double mpp = grid.meters_per_pixel();
    const Point2 behind = e.position - (0.5 * mpp) * unit_vector(e.normal);
    const int c = static_cast<int>(std::floor(behind.x / mpp));
    const int r = static_cast<int>(std::floor(behind.y / mpp));
    if (c < 0 || r < 0 || c >= grid.width_px || r >= grid.height_px) return std::nullopt;
    return std::pair{r, c};
}

ReconResult reconstruct(const ReconInputs& inputs, const GridSpec& grid, const ReconConfig& cfg) {
    grid.validate();
    cfg.validate();
    if (grid.side_m != inputs.side_m) {
        throw ExtentMismatchError("grid side " + std::to_string(grid.side_m) + " m does not match scene side " +
                                  std::to_string(inputs.side_m) + " m");
    }
    const int w = grid.width_px;
    const int h = grid.height_px;
    ReconResult result{BinaryMap(w, h), {}, {}, EvidenceGrid(w, h)};

    for (const auto& link : inputs.links) {
        if (link.ue_index < 0 || link.ue_index >= static_cast<int>(inputs.ues.size()) || link.bs_index < 0 ||
            link.bs_index >= static_cast<int>(inputs.bss.size())) {
            throw ValidationError("link (" + std::to_string(link.ue_index) + ", " + std::to_string(link.bs_index) +
                                  ") does not index the device lists");
        }
        for (const auto& p : link.paths) {
            if (p.truth) throw ValidationError("reconstruction inputs must not carry tracer truth");
        }
        auto found = carve_free(result.votes, inputs.ues[link.ue_index], inputs.bss[link.bs_index], link.paths, grid, cfg);
        for (auto& e : found) {
            e.ue_index = link.ue_index;
            e.bs_index = link.bs_index;
            result.evidence.push_back(e);
        }
    }
    std::sort(result.evidence.begin(), result.evidence.end(), [](const EvidencePoint& a, const EvidencePoint& b) {
        return std::tie(a.ue_index, a.bs_index, a.path_index) < std::tie(b.ue_index, b.bs_index, b.path_index);
    });
    for (const auto& e : result.evidence) {
        if (const auto px = wall_pixel(e, grid)) ++result.votes.wall_votes[result.votes.index(px->first, px->second)];
    }

    const double m = cfg.min_evidence;
    const int d = cfg.wall_dilate_px;
    result.probability.assign(static_cast<std::size_t>(w) * h, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t k = result.votes.index(r, c);
            if (result.votes.free_votes[k] > 0) continue;
            std::uint32_t support = 0;
            for (int rr = std::max(0, r - d); rr <= std::min(h - 1, r + d); ++rr)
                for (int cc = std::max(0, c - d); cc <= std::min(w - 1, c + d); ++cc)
                    support = std::max(support, result.votes.wall_votes[result.votes.index(rr, cc)]);
            double p = support > 0 ? support / (support + m) : 0.0;
            // building fill: any pixel not carved free is at least undecided
            if (cfg.unknown_fill == UnknownFill::Building) p = std::max(p, 0.5);
            result.probability[k] = p;
        }
    }
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) result.map.set(r, c, result.probability[result.votes.index(r, c)] >= 0.5);
    return result;
}

GrayImage probability_image(const std::vector<double>& probability, int width, int height) {
    GrayImage img{width, height, std::vector<std::uint8_t>(probability.size())};
    for (std::size_t k = 0; k < probability.size(); ++k)
        img.pixels[k] = static_cast<std::uint8_t>(std::lround(std::clamp(probability[k], 0.0, 1.0) * 255.0));
    return img;
}

} // namespace rfrecon
