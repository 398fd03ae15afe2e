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

#include "rfrecon/geometry.hpp"

#include <algorithm>
#include <limits>

#include "rfrecon/errors.hpp"

namespace rfrecon {

double normalize_angle(double radians) {
    double a = std::fmod(radians, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    // fmod of a tiny negative value can round back up to exactly 2π
    if (a >= kTwoPi) a = 0.0;
    return a;
}

double angular_distance(double a, double b) {
    double d = std::fabs(normalize_angle(a) - normalize_angle(b));
    return std::min(d, kTwoPi - d);
}

double signed_area(std::span<const Point2> ring) {
    double twice = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        twice += cross(ring[i], ring[(i + 1) % ring.size()]);
    }
    return 0.5 * twice;
}

double point_segment_distance(Point2 p, const Segment& s) {
    const Point2 d = s.direction();
    const double len2 = dot(d, d);
    if (len2 == 0.0) return distance(p, s.a);
    const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return distance(p, s.a + t * d);
}

bool segments_touch(const Segment& s1, const Segment& s2) {
    if (point_segment_distance(s1.a, s2) <= kGeomTol || point_segment_distance(s1.b, s2) <= kGeomTol ||
        point_segment_distance(s2.a, s1) <= kGeomTol || point_segment_distance(s2.b, s1) <= kGeomTol) {
        return true;
    }
    const double o1 = cross(s1.direction(), s2.a - s1.a);
    const double o2 = cross(s1.direction(), s2.b - s1.a);
    const double o3 = cross(s2.direction(), s1.a - s2.a);
    const double o4 = cross(s2.direction(), s1.b - s2.a);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

SimplePolygon::SimplePolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
    for (const auto& v : vertices_) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw ValidationError("polygon vertex is not finite");
    }
    if (!(signed_area(vertices_) > 0.0)) {
        throw ValidationError("polygon must be counter-clockwise with positive area");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Segment ei = edge(i);
        if (ei.length() <= kGeomTol) throw ValidationError("polygon has a degenerate edge");
        // Adjacent edges may only share their common vertex: reject fold-backs.
        const Segment next = edge((i + 1) % n);
        const Point2 back = ei.a - ei.b;
        const Point2 fwd = next.b - next.a;
        if (std::fabs(cross(back, fwd)) <= kGeomTol * norm(back) * norm(fwd) && dot(back, fwd) > 0.0) {
            throw ValidationError("polygon folds back on itself");
        }
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_touch(ei, edge(j))) throw ValidationError("polygon is self-intersecting");
        }
    }
    bounds_ = {vertices_.front(), vertices_.front()};
    for (const auto& v : vertices_) {
        bounds_.lo = {std::min(bounds_.lo.x, v.x), std::min(bounds_.lo.y, v.y)};
        bounds_.hi = {std::max(bounds_.hi.x, v.x), std::max(bounds_.hi.y, v.y)};
    }
}

SimplePolygon SimplePolygon::rectangle(double x0, double y0, double x1, double y1) {
    return SimplePolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

double SimplePolygon::area() const { return signed_area(vertices_); }

double boundary_distance(Point2 p, const SimplePolygon& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) best = std::min(best, point_segment_distance(p, poly.edge(i)));
    return best;
}

namespace {

bool crossing_parity(const SimplePolygon& poly, Point2 p) {
    bool inside = false;
    const auto& v = poly.vertices();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool outside_bounds(const SimplePolygon& poly, Point2 p, double margin) {
    const auto& b = poly.bounds();
    return p.x < b.lo.x - margin || p.x > b.hi.x + margin || p.y < b.lo.y - margin || p.y > b.hi.y + margin;
}

} // namespace

bool contains_closed(const SimplePolygon& poly, Point2 p) {
    if (outside_bounds(poly, p, kGeomTol)) return false;
    return crossing_parity(poly, p) || boundary_distance(p, poly) <= kGeomTol;
}

bool contains_strictly(const SimplePolygon& poly, Point2 p) {
    if (outside_bounds(poly, p, 0.0)) return false;
    return crossing_parity(poly, p) && boundary_distance(p, poly) > kGeomTol;
}

Point2 interior_point(const SimplePolygon& poly) {
    // The lowest-then-leftmost vertex is always convex; step inside along its bisector.
    const auto& v = poly.vertices();
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].y < v[k].y || (v[i].y == v[k].y && v[i].x < v[k].x)) k = i;
    }
    const Point2 prev = v[(k + v.size() - 1) % v.size()];
    const Point2 next = v[(k + 1) % v.size()];
    const Point2 a = prev - v[k];
    const Point2 b = next - v[k];
    const Point2 bis = (1.0 / norm(a)) * a + (1.0 / norm(b)) * b;
    double step = 1e-3 * std::min(norm(a), norm(b));
    for (int i = 0; i < 40; ++i, step *= 0.5) {
        const Point2 q = v[k] + (step / norm(bis)) * bis;
        if (contains_strictly(poly, q)) return q;
    }
    throw ValidationError("could not locate an interior point of polygon");
}

bool segment_intersects_polygon_interior(const Segment& s, const SimplePolygon& poly) {
    const auto& box = poly.bounds();
    if (std::max(s.a.x, s.b.x) < box.lo.x || std::min(s.a.x, s.b.x) > box.hi.x ||
        std::max(s.a.y, s.b.y) < box.lo.y || std::min(s.a.y, s.b.y) > box.hi.y) {
        return false;
    }
    const Point2 d = s.direction();
    const double len2 = dot(d, d);
    if (len2 == 0.0) return false;

    // Split the segment at every parameter where it meets the boundary; each
    // piece then lies entirely inside, outside or on the boundary, so testing
    // its midpoint decides it.
    std::vector<double> cuts{0.0, 1.0};
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Segment e = poly.edge(i);
        const Point2 ed = e.direction();
        const double denom = cross(d, ed);
        if (std::fabs(denom) > 1e-15 * std::sqrt(len2) * norm(ed)) {
            const Point2 w = e.a - s.a;
            const double t = cross(w, ed) / denom;
            const double u = cross(w, d) / denom;
            if (t > 0.0 && t < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) cuts.push_back(t);
        }
        if (point_segment_distance(e.a, s) <= kGeomTol) {
            cuts.push_back(std::clamp(dot(e.a - s.a, d) / len2, 0.0, 1.0));
        }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k + 1] - cuts[k] <= 0.0) continue;
        const Point2 mid = s.a + (0.5 * (cuts[k] + cuts[k + 1])) * d;
        if (contains_strictly(poly, mid)) return true;
    }
    return false;
}

std::optional<Point2> ray_ray_intersection(const Ray& r1, const Ray& r2) {
    const Point2 d1 = r1.direction();
    const Point2 d2 = r2.direction();
    const double denom = cross(d1, d2);
    if (std::fabs(denom) < kGeomTol) return std::nullopt;
    const Point2 w = r2.origin - r1.origin;
    const double t1 = cross(w, d2) / denom;
    const double t2 = cross(w, d1) / denom;
    if (!(t1 > 0.0) || !(t2 > 0.0)) return std::nullopt;
    return r1.origin + t1 * d1;
}

Point2 reflect_point_across_line(Point2 p, const Segment& s) {
    const Point2 d = s.direction();
    const double t = dot(p - s.a, d) / dot(d, d);
    const Point2 foot = s.a + t * d;
    return foot + (foot - p);
}

} // namespace rfrecon
