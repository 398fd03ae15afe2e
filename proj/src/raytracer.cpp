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

#include "rfrecon/raytracer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <json.hpp>

#include "rfrecon/errors.hpp"
#include "rfrecon/parallel.hpp"
#include "rfrecon/rng.hpp"

namespace rfrecon {

using ordered_json = nlohmann::ordered_json;

void TraceConfig::validate() const {
    if (max_bounces < 0 || max_bounces > 2) throw ValidationError("max_bounces must be 0, 1 or 2");
    if (max_paths_per_pair < 1) throw ValidationError("max_paths_per_pair must be >= 1");
    if (!(c > 0.0)) throw ValidationError("propagation speed must be positive");
    if (angle_noise_rad < 0.0 || delay_noise_s < 0.0) throw ValidationError("noise levels must be non-negative");
}

namespace {

struct Wall {
    Segment seg;
    Point2 dir;
    double len;
    int building;
    int edge;

    // Positive on the interior (left) side of a counter-clockwise edge.
    double side(Point2 p) const { return cross(dir, p - seg.a) / len; }
    double param(Point2 p) const { return dot(p - seg.a, dir) / (len * len); }
    bool within_extent(Point2 p) const {
        const double u = param(p);
        const double slack = kGeomTol / len;
        return u >= -slack && u <= 1.0 + slack;
    }
};

class Tracer {
public:
    Tracer(const Scene& scene, const TraceConfig& cfg) : scene_(scene), cfg_(cfg) {
        for (std::size_t b = 0; b < scene.buildings.size(); ++b) {
            const auto& poly = scene.buildings[b];
            for (std::size_t e = 0; e < poly.size(); ++e) {
                const Segment s = poly.edge(e);
                walls_.push_back({s, s.direction(), s.length(), static_cast<int>(b), static_cast<int>(e)});
            }
        }
    }

    std::vector<PathDescriptor> trace(Point2 ue, Point2 bs) const {
        if (inside_any_building(scene_, ue)) throw DeviceInsideBuildingError("UE lies inside a building");
        if (inside_any_building(scene_, bs)) throw DeviceInsideBuildingError("BS lies inside a building");
        if (distance(ue, bs) <= kGeomTol) throw ValidationError("UE and BS coincide");

        std::vector<PathDescriptor> paths;
        if (visible(ue, bs)) add_path(paths, {ue, bs}, {});
        if (cfg_.max_bounces >= 1) single_bounce(paths, ue, bs);
        if (cfg_.max_bounces >= 2) double_bounce(paths, ue, bs);
        if (cfg_.angle_noise_rad > 0.0 || cfg_.delay_noise_s > 0.0) add_noise(paths, ue, bs);
        return finalize(std::move(paths));
    }

private:
    bool visible(Point2 a, Point2 b) const {
        const Segment s{a, b};
        return std::none_of(scene_.buildings.begin(), scene_.buildings.end(),
                            [&](const SimplePolygon& p) { return segment_intersects_polygon_interior(s, p); });
    }

    void add_path(std::vector<PathDescriptor>& out, std::vector<Point2> vertices,
                  std::vector<std::pair<int, int>> walls) const {
        double length = 0.0;
        for (std::size_t k = 0; k + 1 < vertices.size(); ++k) length += distance(vertices[k], vertices[k + 1]);
        PathDescriptor p;
        p.aod = direction_angle(vertices[1] - vertices[0]);
        p.aoa = direction_angle(vertices[vertices.size() - 2] - vertices.back());
        p.delay = length / cfg_.c;
        p.truth = PathTruth{static_cast<int>(walls.size()), std::move(vertices), std::move(walls)};
        out.push_back(std::move(p));
    }

    void single_bounce(std::vector<PathDescriptor>& out, Point2 ue, Point2 bs) const {
        for (const Wall& w : walls_) {
            const double s_ue = w.side(ue);
            const double s_bs = w.side(bs);
            if (!(s_ue < -kGeomTol) || !(s_bs < -kGeomTol)) continue;
            const Point2 image = reflect_point_across_line(bs, w.seg);
            const double s_img = w.side(image);
            const Point2 q = ue + (s_ue / (s_ue - s_img)) * (image - ue);
            if (!w.within_extent(q)) continue;
            if (!visible(ue, q) || !visible(q, bs)) continue;
            add_path(out, {ue, q, bs}, {{w.building, w.edge}});
        }
    }

    void double_bounce(std::vector<PathDescriptor>& out, Point2 ue, Point2 bs) const {
        for (const Wall& last : walls_) {
            if (!(last.side(bs) < -kGeomTol)) continue;
            const Point2 bs_image = reflect_point_across_line(bs, last.seg);
            for (const Wall& first : walls_) {
                if (&first == &last) continue;
                const double s_ue = first.side(ue);
                if (!(s_ue < -kGeomTol)) continue;
                const Point2 image = reflect_point_across_line(bs_image, first.seg);
                const double s_img = first.side(image);
                if (!(s_img > kGeomTol)) continue;
                const Point2 q1 = ue + (s_ue / (s_ue - s_img)) * (image - ue);
                if (!first.within_extent(q1)) continue;

                const double s_q1 = last.side(q1);
                const double s_bsi = last.side(bs_image);
                if (!(s_q1 < -kGeomTol) || !(s_bsi > kGeomTol)) continue;
                const Point2 q2 = q1 + (s_q1 / (s_q1 - s_bsi)) * (bs_image - q1);
                if (!last.within_extent(q2)) continue;
                if (!(first.side(q2) < -kGeomTol) || distance(q1, q2) <= kGeomTol) continue;

                if (!visible(ue, q1) || !visible(q1, q2) || !visible(q2, bs)) continue;
                add_path(out, {ue, q1, q2, bs}, {{first.building, first.edge}, {last.building, last.edge}});
            }
        }
    }

    void add_noise(std::vector<PathDescriptor>& paths, Point2 ue, Point2 bs) const {
        std::uint64_t key = cfg_.noise_seed;
        for (double v : {ue.x, ue.y, bs.x, bs.y}) key = splitmix64(key ^ std::bit_cast<std::uint64_t>(v));
        Rng rng(key);
        for (auto& p : paths) {
            p.aoa = normalize_angle(p.aoa + cfg_.angle_noise_rad * rng.normal());
            p.aod = normalize_angle(p.aod + cfg_.angle_noise_rad * rng.normal());
            // keep delay·c above the straight-line distance
            const double floor_delay = distance(ue, bs) / cfg_.c;
            p.delay = std::max(floor_delay, p.delay + cfg_.delay_noise_s * rng.normal());
        }
    }

    std::vector<PathDescriptor> finalize(std::vector<PathDescriptor> paths) const {
        std::sort(paths.begin(), paths.end(), [](const PathDescriptor& a, const PathDescriptor& b) {
            if (a.delay != b.delay) return a.delay < b.delay;
            if (a.aoa != b.aoa) return a.aoa < b.aoa;
            return a.aod < b.aod;
        });
        std::vector<PathDescriptor> kept;
        for (auto& p : paths) {
            const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const PathDescriptor& k) {
                return std::fabs(k.length_m(cfg_.c) - p.length_m(cfg_.c)) <= kGeomTol &&
                       angular_distance(k.aoa, p.aoa) <= kGeomTol && angular_distance(k.aod, p.aod) <= kGeomTol;
            });
            if (duplicate) continue;
            kept.push_back(std::move(p));
            if (static_cast<int>(kept.size()) == cfg_.max_paths_per_pair) break;
        }
        return kept;
    }

    const Scene& scene_;
    const TraceConfig& cfg_;
    std::vector<Wall> walls_;
};

} // namespace

std::vector<PathDescriptor> trace_pair(const Scene& scene, Point2 ue, Point2 bs, const TraceConfig& cfg) {
    cfg.validate();
    return Tracer(scene, cfg).trace(ue, bs);
}

std::vector<RadioLink> trace_scene(const Scene& scene, const TraceConfig& cfg, int workers) {
    cfg.validate();
    const Tracer tracer(scene, cfg);
    const std::size_t n_bs = scene.bss.size();
    std::vector<RadioLink> links(scene.ues.size() * n_bs);
    parallel_for(links.size(), workers, [&](std::size_t k) {
        const int i = static_cast<int>(k / n_bs);
        const int j = static_cast<int>(k % n_bs);
        try {
            links[k] = {i, j, tracer.trace(scene.ues[i], scene.bss[j])};
        } catch (const DeviceInsideBuildingError& e) {
            throw DeviceInsideBuildingError("scene " + scene.id + ", ue " + std::to_string(i) + ", bs " +
                                            std::to_string(j) + ": " + e.what());
        }
    });
    return links;
}

std::vector<RadioLink> strip_truth(std::vector<RadioLink> links) {
    for (auto& link : links)
        for (auto& p : link.paths) p.truth.reset();
    return links;
}

std::string links_to_json(const std::string& scene_id, const std::vector<RadioLink>& links) {
    ordered_json j;
    j["scene_id"] = scene_id;
    j["links"] = ordered_json::array();
    for (const auto& link : links) {
        ordered_json l;
        l["ue"] = link.ue_index;
        l["bs"] = link.bs_index;
        l["paths"] = ordered_json::array();
        for (const auto& p : link.paths) l["paths"].push_back(ordered_json::array({p.aoa, p.aod, p.delay}));
        j["links"].push_back(std::move(l));
    }
    return j.dump() + "\n";
}

LinkFile links_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFormatError(std::string("links json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("scene_id") || !j.contains("links") || !j["scene_id"].is_string() ||
        !j["links"].is_array()) {
        throw CorruptFormatError("links json: expected {scene_id, links}");
    }
    LinkFile out;
    out.scene_id = j["scene_id"].get<std::string>();
    for (const auto& l : j["links"]) {
        if (!l.is_object() || !l.contains("ue") || !l.contains("bs") || !l.contains("paths") ||
            !l["ue"].is_number_integer() || !l["bs"].is_number_integer() || !l["paths"].is_array()) {
            throw CorruptFormatError("links json: malformed link entry");
        }
        RadioLink link{l["ue"].get<int>(), l["bs"].get<int>(), {}};
        for (const auto& p : l["paths"]) {
            if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
                throw CorruptFormatError("links json: path must be [aoa, aod, delay]");
            link.paths.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), std::nullopt});
        }
        out.links.push_back(std::move(link));
    }
    return out;
}

} // namespace rfrecon
