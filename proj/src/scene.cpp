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

#include "rfrecon/scene.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "rfrecon/errors.hpp"
#include "rfrecon/rng.hpp"

namespace rfrecon {

using ordered_json = nlohmann::ordered_json;

void GenParams::validate() const {
    if (n_buildings.lo < 0 || n_buildings.hi < n_buildings.lo) throw ValidationError("n_buildings range is empty");
    if (!(building_width_m.lo > 0.0) || building_width_m.hi < building_width_m.lo)
        throw ValidationError("building width range is empty");
    if (!(building_height_m.lo > 0.0) || building_height_m.hi < building_height_m.lo)
        throw ValidationError("building height range is empty");
    if (n_ues < 1 || n_bss < 1) throw ValidationError("need at least one UE and one BS");
    if (!(side_m > 0.0) || !std::isfinite(side_m)) throw ValidationError("side_m must be positive");
    if (min_gap_m < 0.0) throw ValidationError("min_gap_m must be non-negative");
    if (align_px < 0) throw ValidationError("align_px must be non-negative");
    if (device_clearance_m < 0.0) throw ValidationError("device_clearance_m must be non-negative");
}

namespace {

struct Rect {
    double x0, y0, x1, y1;
};

bool too_close(const Rect& a, const Rect& b, double gap) {
    return !(a.x1 + gap <= b.x0 || b.x1 + gap <= a.x0 || a.y1 + gap <= b.y0 || b.y1 + gap <= a.y0);
}

// Draws a size in `range` and a lower corner so that [lo, lo+size] fits in
// [0, side]. With alignment both are whole multiples of the grid unit.
bool draw_span(Rng& rng, MeterRange range, double side, int align_px, double& lo, double& hi) {
    const double size = rng.uniform(range.lo, range.hi);
    if (align_px == 0) {
        if (size > side) return false;
        lo = rng.uniform(0.0, side - size);
        hi = lo + size;
        return true;
    }
    const double unit = side / align_px;
    const auto cells = std::max<std::int64_t>(1, std::llround(size / unit));
    if (cells > align_px) return false;
    const std::int64_t start = rng.uniform_int(0, align_px - cells);
    lo = static_cast<double>(start) * side / align_px;
    hi = static_cast<double>(start + cells) * side / align_px;
    return true;
}

Point2 place_device(Rng& rng, const GenParams& params, const std::vector<SimplePolygon>& buildings, const char* kind,
                    int index) {
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
        const Point2 p{rng.uniform(0.0, params.side_m), rng.uniform(0.0, params.side_m)};
        bool ok = true;
        for (const auto& b : buildings) {
            if (contains_closed(b, p) || boundary_distance(p, b) < params.device_clearance_m) {
                ok = false;
                break;
            }
        }
        if (ok) return p;
    }
    throw PlacementError(std::string("could not place ") + kind + " " + std::to_string(index) + " within " +
                         std::to_string(kMaxPlacementAttempts) + " attempts");
}

} // namespace

Scene generate_scene(const GenParams& params) {
    params.validate();
    Rng rng(params.seed);
    Scene scene;
    scene.id = params.id.empty() ? "scene_" + std::to_string(params.seed) : params.id;
    scene.side_m = params.side_m;

    const auto n_buildings = static_cast<int>(rng.uniform_int(params.n_buildings.lo, params.n_buildings.hi));
    std::vector<Rect> rects;
    for (int k = 0; k < n_buildings; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            Rect r{};
            if (!draw_span(rng, params.building_width_m, params.side_m, params.align_px, r.x0, r.x1)) continue;
            if (!draw_span(rng, params.building_height_m, params.side_m, params.align_px, r.y0, r.y1)) continue;
            if (std::any_of(rects.begin(), rects.end(), [&](const Rect& o) { return too_close(r, o, params.min_gap_m); }))
                continue;
            rects.push_back(r);
            placed = true;
        }
        if (!placed) {
            throw PlacementError("could not place building " + std::to_string(k) + " within " +
                                 std::to_string(kMaxPlacementAttempts) + " attempts");
        }
    }
    for (const Rect& r : rects) scene.buildings.push_back(SimplePolygon::rectangle(r.x0, r.y0, r.x1, r.y1));
    for (int i = 0; i < params.n_ues; ++i) scene.ues.push_back(place_device(rng, params, scene.buildings, "UE", i));
    for (int j = 0; j < params.n_bss; ++j) scene.bss.push_back(place_device(rng, params, scene.buildings, "BS", j));
    return scene;
}

bool inside_any_building(const Scene& scene, Point2 p) {
    return std::any_of(scene.buildings.begin(), scene.buildings.end(),
                       [&](const SimplePolygon& b) { return contains_strictly(b, p); });
}

namespace {

bool in_extent(Point2 p, double side) {
    return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= -kGeomTol && p.y >= -kGeomTol &&
           p.x <= side + kGeomTol && p.y <= side + kGeomTol;
}

bool boxes_overlap(const BoundingBox& a, const BoundingBox& b) {
    return !(a.hi.x < b.lo.x || b.hi.x < a.lo.x || a.hi.y < b.lo.y || b.hi.y < a.lo.y);
}

bool interiors_overlap(const SimplePolygon& a, const SimplePolygon& b) {
    if (!boxes_overlap(a.bounds(), b.bounds())) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (segment_intersects_polygon_interior(a.edge(i), b)) return true;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (segment_intersects_polygon_interior(b.edge(i), a)) return true;
    // No boundary enters the other interior: overlap is only possible as containment.
    return contains_strictly(b, interior_point(a)) || contains_strictly(a, interior_point(b));
}

} // namespace

void validate_scene(const Scene& scene) {
    if (!(scene.side_m > 0.0) || !std::isfinite(scene.side_m))
        throw InvariantViolationError("scene " + scene.id + ": side_m must be positive");
    if (scene.ues.empty()) throw InvariantViolationError("scene " + scene.id + ": needs at least one UE");
    if (scene.bss.empty()) throw InvariantViolationError("scene " + scene.id + ": needs at least one BS");
    for (std::size_t b = 0; b < scene.buildings.size(); ++b) {
        for (const auto& v : scene.buildings[b].vertices()) {
            if (!in_extent(v, scene.side_m))
                throw InvariantViolationError("scene " + scene.id + ": building " + std::to_string(b) +
                                              " leaves the extent");
        }
    }
    auto check_devices = [&](const std::vector<Point2>& devices, const char* kind) {
        for (std::size_t i = 0; i < devices.size(); ++i) {
            const std::string who = std::string(kind) + " " + std::to_string(i);
            if (!in_extent(devices[i], scene.side_m))
                throw InvariantViolationError("scene " + scene.id + ": " + who + " outside the extent");
            if (inside_any_building(scene, devices[i]))
                throw InvariantViolationError("scene " + scene.id + ": " + who + " is inside a building");
        }
    };
    check_devices(scene.ues, "UE");
    check_devices(scene.bss, "BS");
    for (std::size_t a = 0; a < scene.buildings.size(); ++a) {
        for (std::size_t b = a + 1; b < scene.buildings.size(); ++b) {
            if (interiors_overlap(scene.buildings[a], scene.buildings[b]))
                throw InvariantViolationError("scene " + scene.id + ": buildings " + std::to_string(a) + " and " +
                                              std::to_string(b) + " overlap");
        }
    }
}

BinaryMap rasterize_scene(const Scene& scene, const GridSpec& grid) {
    grid.validate();
    if (grid.side_m != scene.side_m) {
        throw ExtentMismatchError("grid side " + std::to_string(grid.side_m) + " m does not match scene side " +
                                  std::to_string(scene.side_m) + " m");
    }
    BinaryMap map(grid.width_px, grid.height_px);
    const double mpp = grid.meters_per_pixel();
    for (const auto& poly : scene.buildings) {
        const auto& box = poly.bounds();
        const int c0 = std::max(0, static_cast<int>(std::floor(box.lo.x / mpp - 0.5)));
        const int c1 = std::min(grid.width_px - 1, static_cast<int>(std::ceil(box.hi.x / mpp - 0.5)));
        const int r0 = std::max(0, static_cast<int>(std::floor(box.lo.y / mpp - 0.5)));
        const int r1 = std::min(grid.height_px - 1, static_cast<int>(std::ceil(box.hi.y / mpp - 0.5)));
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                if (!map.at(r, c) && contains_closed(poly, grid.pixel_center(r, c))) map.set(r, c, true);
    }
    return map;
}

namespace {

ordered_json point_json(Point2 p) { return ordered_json::array({p.x, p.y}); }

Point2 point_from(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw CorruptFormatError("scene json: expected [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string scene_to_json(const Scene& scene) {
    ordered_json j;
    j["id"] = scene.id;
    j["side_m"] = scene.side_m;
    j["buildings"] = ordered_json::array();
    for (const auto& b : scene.buildings) {
        ordered_json ring = ordered_json::array();
        for (const auto& v : b.vertices()) ring.push_back(point_json(v));
        j["buildings"].push_back(std::move(ring));
    }
    j["ues"] = ordered_json::array();
    for (const auto& p : scene.ues) j["ues"].push_back(point_json(p));
    j["bss"] = ordered_json::array();
    for (const auto& p : scene.bss) j["bss"].push_back(point_json(p));
    return j.dump() + "\n";
}

Scene scene_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFormatError(std::string("scene json: ") + e.what());
    }
    for (const char* key : {"id", "side_m", "buildings", "ues", "bss"}) {
        if (!j.is_object() || !j.contains(key)) throw CorruptFormatError(std::string("scene json: missing field ") + key);
    }
    if (!j["id"].is_string() || !j["side_m"].is_number() || !j["buildings"].is_array() || !j["ues"].is_array() ||
        !j["bss"].is_array()) {
        throw CorruptFormatError("scene json: field has the wrong type");
    }
    Scene scene;
    scene.id = j["id"].get<std::string>();
    scene.side_m = j["side_m"].get<double>();
    for (const auto& ring : j["buildings"]) {
        if (!ring.is_array()) throw CorruptFormatError("scene json: building must be a vertex list");
        std::vector<Point2> vertices;
        for (const auto& v : ring) vertices.push_back(point_from(v));
        try {
            scene.buildings.emplace_back(std::move(vertices));
        } catch (const ValidationError& e) {
            throw InvariantViolationError("scene " + scene.id + ": building " +
                                          std::to_string(scene.buildings.size()) + ": " + e.what());
        }
    }
    for (const auto& p : j["ues"]) scene.ues.push_back(point_from(p));
    for (const auto& p : j["bss"]) scene.bss.push_back(point_from(p));
    validate_scene(scene);
    return scene;
}

} // namespace rfrecon
