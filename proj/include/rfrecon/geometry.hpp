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

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace rfrecon {

/// Absolute tolerance (meters) used by every geometric predicate.
inline constexpr double kGeomTol = 1e-9;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend constexpr Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point2, Point2) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 v) { return std::hypot(v.x, v.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Wraps any finite angle into [0, 2π).
double normalize_angle(double radians);

/// Angle of a direction vector, counter-clockwise from +x, in [0, 2π).
inline double direction_angle(Point2 v) { return normalize_angle(std::atan2(v.y, v.x)); }
inline Point2 unit_vector(double radians) { return {std::cos(radians), std::sin(radians)}; }

/// Smallest absolute difference between two angles, in [0, π].
double angular_distance(double a, double b);

struct Segment {
    Point2 a;
    Point2 b;

    Point2 direction() const { return b - a; }
    double length() const { return distance(a, b); }
};

struct Ray {
    Point2 origin;
    double angle = 0.0;  // [0, 2π)

    Ray() = default;
    Ray(Point2 o, double radians) : origin(o), angle(normalize_angle(radians)) {}
    Point2 direction() const { return unit_vector(angle); }
};

struct BoundingBox {
    Point2 lo;
    Point2 hi;
};

/// Counter-clockwise simple polygon. Construction validates the invariants
/// (>= 3 vertices, no self-intersection, positive signed area) and throws
/// ValidationError otherwise.
class SimplePolygon {
public:
    explicit SimplePolygon(std::vector<Point2> vertices);

    /// Axis-aligned rectangle [x0,x1]x[y0,y1], emitted counter-clockwise.
    static SimplePolygon rectangle(double x0, double y0, double x1, double y1);

    const std::vector<Point2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    Segment edge(std::size_t i) const { return {vertices_[i], vertices_[(i + 1) % vertices_.size()]}; }
    const BoundingBox& bounds() const { return bounds_; }
    double area() const;

    friend bool operator==(const SimplePolygon& a, const SimplePolygon& b) { return a.vertices_ == b.vertices_; }

private:
    std::vector<Point2> vertices_;
    BoundingBox bounds_;
};

double signed_area(std::span<const Point2> ring);

double point_segment_distance(Point2 p, const Segment& s);

/// Distance from p to the polygon boundary.
double boundary_distance(Point2 p, const SimplePolygon& poly);

/// Closed containment: interior or within kGeomTol of the boundary.
bool contains_closed(const SimplePolygon& poly, Point2 p);

/// Open containment: interior and farther than kGeomTol from the boundary.
bool contains_strictly(const SimplePolygon& poly, Point2 p);

/// A point guaranteed to lie in the open interior of the polygon.
Point2 interior_point(const SimplePolygon& poly);

/// True iff the open segment passes through the open interior of the polygon.
/// Running along or touching the boundary does not count.
bool segment_intersects_polygon_interior(const Segment& s, const SimplePolygon& poly);

/// Intersection with both ray parameters strictly positive; nullopt for
/// parallel rays or an intersection behind either origin.
std::optional<Point2> ray_ray_intersection(const Ray& r1, const Ray& r2);

/// Mirror image of p across the infinite line through s.
Point2 reflect_point_across_line(Point2 p, const Segment& s);

/// True iff the closed segments share at least one point (within kGeomTol).
bool segments_touch(const Segment& s1, const Segment& s2);

} // namespace rfrecon
