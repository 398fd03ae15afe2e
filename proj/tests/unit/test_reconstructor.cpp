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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rfrecon/errors.hpp"
#include "rfrecon/reconstructor.hpp"
#include "rfrecon/rng.hpp"

using namespace rfrecon;

namespace {

constexpr double kC = kSpeedOfLight;

PathDescriptor mirror_path() {
    return {std::atan2(3.0, -2.0), std::atan2(3.0, 2.0), 2.0 * std::sqrt(13.0) / kC, std::nullopt};
}

PathDescriptor los_path(Point2 ue, Point2 bs) {
    return {direction_angle(ue - bs), direction_angle(bs - ue), distance(ue, bs) / kC, std::nullopt};
}

Scene empty_scene(double side) {
    Scene s;
    s.id = "empty";
    s.side_m = side;
    return s;
}

// Building from y = 3 to y = 4 across the full width, devices underneath.
Scene one_wall_scene() {
    Scene s = empty_scene(20.0);
    s.id = "wall";
    s.buildings.push_back(SimplePolygon::rectangle(0, 3, 20, 4));
    for (int i = 0; i < 10; ++i) s.ues.push_back({1.0 + 2.0 * i, 0.5 + 0.2 * i});
    s.bss.push_back({10.3, 1.7});
    return s;
}

const TraceConfig kTrace{};

} // namespace

TEST_CASE("LOS classification") {
    const Point2 ue{0, 0};
    const Point2 bs{4, 0};
    const LosTolerance tol{};
    CHECK(classify_los(ue, bs, los_path(ue, bs), tol));
    const auto traced = trace_pair(empty_scene(10), ue, bs, kTrace);
    REQUIRE(traced.size() == 1);
    CHECK(classify_los(ue, bs, traced[0], tol));

    const PathDescriptor bounce = mirror_path();
    CHECK(bounce.length_m() - distance(ue, bs) == doctest::Approx(3.2111).epsilon(1e-4));
    CHECK_FALSE(classify_los(ue, bs, bounce, tol));

    PathDescriptor rotated = los_path(ue, bs);
    rotated.aod = normalize_angle(rotated.aod + std::numbers::pi / 2);
    CHECK_FALSE(classify_los(ue, bs, rotated, tol));
    PathDescriptor bad_aoa = los_path(ue, bs);
    bad_aoa.aoa = normalize_angle(bad_aoa.aoa + 0.01);
    CHECK_FALSE(classify_los(ue, bs, bad_aoa, tol));
}

TEST_CASE("single-bounce triangulation of the mirror example") {
    const auto e = estimate_single_bounce({0, 0}, {4, 0}, mirror_path(), {});
    REQUIRE(e);
    CHECK(e->position.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e->position.y == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e->normal == doctest::Approx(3 * std::numbers::pi / 2).epsilon(1e-12));
    CHECK(e->residual < 1e-9);
}

TEST_CASE("LOS paths yield no evidence") {
    CHECK_FALSE(estimate_single_bounce({1, 1}, {7, 5}, los_path({1, 1}, {7, 5}), {}));
}

TEST_CASE("length mismatch rejects a triangulation") {
    PathDescriptor p = mirror_path();
    p.delay += 2.0 / kC;
    CHECK_FALSE(estimate_single_bounce({0, 0}, {4, 0}, p, {}));
    p.delay = mirror_path().delay + 0.4 / kC;
    CHECK(estimate_single_bounce({0, 0}, {4, 0}, p, {}));
}

TEST_CASE("double-bounce paths off slanted walls are rejected by the length test") {
    Scene s = empty_scene(100.0);
    s.buildings.push_back(SimplePolygon({{20, 60}, {50, 75}, {45, 85}, {15, 70}}));
    s.buildings.push_back(SimplePolygon({{60, 30}, {85, 20}, {90, 32}, {65, 42}}));
    Rng rng(12);
    int double_bounces = 0;
    int intersecting = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Point2 ue{rng.uniform(1, 99), rng.uniform(1, 99)};
        const Point2 bs{rng.uniform(1, 99), rng.uniform(1, 99)};
        if (std::any_of(s.buildings.begin(), s.buildings.end(),
                        [&](const SimplePolygon& b) { return contains_closed(b, ue) || contains_closed(b, bs); }))
            continue;
        for (const auto& path : trace_pair(s, ue, bs, kTrace)) {
            if (path.truth->bounces != 2) continue;
            ++double_bounces;
            const auto q = ray_ray_intersection(Ray(ue, path.aod), Ray(bs, path.aoa));
            if (q) {
                ++intersecting;
                const double gap = std::fabs(distance(ue, *q) + distance(*q, bs) - path.length_m());
                CHECK(gap > 0.5);
            }
            CHECK_FALSE(estimate_single_bounce(ue, bs, path, {}));
        }
    }
    CHECK(double_bounces > 20);
    CHECK(intersecting > 5);
}

TEST_CASE("carving a LOS segment marks exactly the crossed pixels") {
    const GridSpec g{16, 16, 16.0};
    EvidenceGrid acc(16, 16);
    carve_segment(acc, {1.5, 5.5}, {10.5, 5.5}, g, 1);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) CHECK(acc.free_votes[acc.index(r, c)] == (r == 5 && c >= 1 && c <= 10 ? 1u : 0u));

    // along a pixel boundary and through a corner only
    EvidenceGrid edge(16, 16);
    carve_segment(edge, {2, 4}, {9, 4}, g, 1);
    carve_segment(edge, {3, 3}, {3, 3}, g, 1);
    CHECK(std::all_of(edge.free_votes.begin(), edge.free_votes.end(), [](auto v) { return v == 0u; }));
    EvidenceGrid diag(16, 16);
    carve_segment(diag, {0, 0}, {4, 4}, g, 1);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) CHECK(diag.free_votes[diag.index(r, c)] == (r == c && r < 4 ? 1u : 0u));
}

TEST_CASE("wider carving adds pixels near the segment") {
    const GridSpec g{16, 16, 16.0};
    EvidenceGrid acc(16, 16);
    carve_segment(acc, {1.5, 5.5}, {10.5, 5.5}, g, 3);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
            const bool body = r >= 4 && r <= 6 && c >= 1 && c <= 10;
            const bool caps = r == 5 && (c == 0 || c == 11);  // centers exactly 1 px past the ends
            CHECK(acc.free_votes[acc.index(r, c)] == (body || caps ? 1u : 0u));
        }
}

TEST_CASE("carve_free on a LOS pair carves the whole segment") {
    const GridSpec g{16, 16, 16.0};
    EvidenceGrid direct(16, 16);
    const Point2 ue{1.5, 2.5};
    const Point2 bs{13.2, 11.9};
    const std::vector<PathDescriptor> paths{los_path(ue, bs)};
    CHECK(carve_free(direct, ue, bs, paths, g, {}).empty());
    EvidenceGrid want(16, 16);
    carve_segment(want, ue, bs, g, 1);
    CHECK(direct == want);

    EvidenceGrid none(16, 16);
    CHECK(carve_free(none, ue, bs, {}, g, {}).empty());
    CHECK(none == EvidenceGrid(16, 16));
}

TEST_CASE("carve_free on the mirror example carves both legs but not the reflection pixel") {
    const GridSpec g{16, 16, 8.0};
    EvidenceGrid acc(16, 16);
    const std::vector<PathDescriptor> paths{mirror_path()};
    const auto ev = carve_free(acc, {0, 0}, {4, 0}, paths, g, {});
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].path_index == 0);
    CHECK(acc.free_votes[acc.index(6, 4)] == 0u);
    CHECK(acc.free_votes[acc.index(0, 0)] == 1u);
    CHECK(acc.free_votes[acc.index(5, 3)] == 1u);
    CHECK(acc.free_votes[acc.index(5, 4)] == 1u);
    CHECK(acc.free_votes[acc.index(0, 7)] == 1u);
    const auto wall = wall_pixel(ev[0], g);
    REQUIRE(wall);
    CHECK(wall->first == 6);
    CHECK(wall->second == 4);
}

TEST_CASE("an all-LOS empty scene reconstructs as all free") {
    Scene s = empty_scene(200.0);
    Rng rng(3);
    for (int i = 0; i < 30; ++i) s.ues.push_back({rng.uniform(0, 200), rng.uniform(0, 200)});
    for (int j = 0; j < 5; ++j) s.bss.push_back({rng.uniform(0, 200), rng.uniform(0, 200)});
    const auto r = reconstruct(observe(s, trace_scene(s, kTrace)), {64, 64, 200.0}, {});
    CHECK(r.map.count() == 0);
    CHECK(r.evidence.empty());
    CHECK(std::all_of(r.probability.begin(), r.probability.end(), [](double p) { return p == 0.0; }));
}

TEST_CASE("one-wall scene puts predicted walls along the wall") {
    const Scene s = one_wall_scene();
    const auto links = trace_scene(s, kTrace);
    const GridSpec g{20, 20, 20.0};
    const auto r = reconstruct(observe(s, links), g, {});
    REQUIRE(r.evidence.size() == 10);
    double lo = 20, hi = 0;
    for (const auto& e : r.evidence) {
        CHECK(e.position.y == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(e.normal == doctest::Approx(3 * std::numbers::pi / 2).epsilon(1e-9));
        lo = std::min(lo, e.position.x);
        hi = std::max(hi, e.position.x);
    }
    CHECK(r.map.count() > 0);
    for (int row = 0; row < 20; ++row) {
        for (int col = 0; col < 20; ++col) {
            if (!r.map.at(row, col)) continue;
            CHECK(row >= 2);
            CHECK(row <= 4);
            CHECK(col + 1 >= std::floor(lo) - 1);
            CHECK(col <= std::floor(hi) + 1);
        }
    }
    CHECK(r.map.at(3, static_cast<int>(std::floor(r.evidence[0].position.x))));
}

TEST_CASE("links without paths leave every pixel at the fill value") {
    ReconInputs in{200.0, {{10, 10}, {50, 50}}, {{100, 100}}, {{0, 0, {}}, {1, 0, {}}}};
    const GridSpec g{32, 32, 200.0};
    CHECK(reconstruct(in, g, {}).map.count() == 0);
    ReconConfig fill;
    fill.unknown_fill = UnknownFill::Building;
    const auto r = reconstruct(in, g, fill);
    CHECK(r.map.count() == 32u * 32u);
    CHECK(std::all_of(r.probability.begin(), r.probability.end(), [](double p) { return p == 0.5; }));
}

TEST_CASE("carving is sound and evidence lies on true walls for aligned scenes") {
    int evidence_total = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int px = seed % 2 ? 64 : 224;
        GenParams p;
        p.seed = seed;
        p.align_px = px;
        const Scene s = generate_scene(p);
        const auto links = trace_scene(s, kTrace);
        const GridSpec g{px, px, s.side_m};
        const auto r = reconstruct(observe(s, links), g, {});
        const BinaryMap gt = rasterize_scene(s, g);
        for (int row = 0; row < px; ++row)
            for (int col = 0; col < px; ++col)
                if (gt.at(row, col)) REQUIRE(r.votes.free_votes[r.votes.index(row, col)] == 0u);
        for (const auto& e : r.evidence) {
            ++evidence_total;
            const auto& link = links[static_cast<std::size_t>(e.ue_index * p.n_bss + e.bs_index)];
            const auto& truth = *link.paths[static_cast<std::size_t>(e.path_index)].truth;
            CHECK(truth.bounces == 1);
            CHECK(distance(truth.vertices[1], e.position) < 1e-6);
            const auto& building = s.buildings[static_cast<std::size_t>(truth.walls[0].first)];
            CHECK(point_segment_distance(e.position, building.edge(static_cast<std::size_t>(truth.walls[0].second))) < 1e-6);
            CHECK(e.residual <= ReconConfig{}.length_tol_m);
            CHECK(e.position.x >= 0.0);
            CHECK(e.position.x <= s.side_m);
        }
    }
    CHECK(evidence_total > 200);
}

TEST_CASE("adding links never removes free votes") {
    GenParams p;
    p.seed = 21;
    p.align_px = 64;
    const Scene s = generate_scene(p);
    auto in = observe(s, trace_scene(s, kTrace));
    const GridSpec g{64, 64, 200.0};
    const auto all_links = in.links;
    std::vector<std::uint32_t> prev(64 * 64, 0);
    for (std::size_t n = 0; n <= all_links.size(); n += 15) {
        in.links.assign(all_links.begin(), all_links.begin() + static_cast<std::ptrdiff_t>(n));
        const auto r = reconstruct(in, g, {});
        for (std::size_t k = 0; k < prev.size(); ++k) {
            CHECK(r.votes.free_votes[k] >= prev[k]);
            if (prev[k] > 0) CHECK_FALSE(r.map.at(static_cast<int>(k / 64), static_cast<int>(k % 64)));
        }
        prev = r.votes.free_votes;
    }
}

TEST_CASE("binary output is the probability map at 0.5") {
    for (std::uint64_t seed = 30; seed < 35; ++seed) {
        GenParams p;
        p.seed = seed;
        const Scene s = generate_scene(p);
        for (int m : {1, 2, 3}) {
            ReconConfig cfg;
            cfg.min_evidence = m;
            cfg.unknown_fill = seed % 2 ? UnknownFill::Building : UnknownFill::Free;
            const auto r = reconstruct(observe(s, trace_scene(s, kTrace)), {64, 64, 200.0}, cfg);
            for (int row = 0; row < 64; ++row) {
                for (int col = 0; col < 64; ++col) {
                    const double prob = r.probability[static_cast<std::size_t>(row) * 64 + col];
                    CHECK(prob >= 0.0);
                    CHECK(prob <= 1.0);
                    CHECK(r.map.at(row, col) == (prob >= 0.5));
                }
            }
        }
    }
}

TEST_CASE("link order does not change the result") {
    GenParams p;
    p.seed = 5;
    const Scene s = generate_scene(p);
    auto in = observe(s, trace_scene(s, kTrace));
    const GridSpec g{64, 64, 200.0};
    const auto base = reconstruct(in, g, {});
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        for (std::size_t i = in.links.size() - 1; i > 0; --i)
            std::swap(in.links[i], in.links[static_cast<std::size_t>(rng.uniform_int(0, i))]);
        const auto r = reconstruct(in, g, {});
        CHECK(r.map == base.map);
        CHECK(r.probability == base.probability);
        CHECK(r.votes == base.votes);
        REQUIRE(r.evidence.size() == base.evidence.size());
        for (std::size_t k = 0; k < r.evidence.size(); ++k) CHECK(r.evidence[k].position == base.evidence[k].position);
    }
}

TEST_CASE("a narrow gap with no devices in it is never carved") {
    Scene s = empty_scene(200.0);
    s.id = "gap";
    s.buildings.push_back(SimplePolygon::rectangle(50, 50, 100, 98));
    s.buildings.push_back(SimplePolygon::rectangle(50, 101, 100, 150));
    Rng rng(77);
    for (int i = 0; i < 30; ++i) s.ues.push_back({rng.uniform(0, 200), rng.uniform(0, 40)});
    for (int j = 0; j < 5; ++j) s.bss.push_back({rng.uniform(0, 200), rng.uniform(160, 200)});
    const GridSpec g{200, 200, 200.0};
    const auto r = reconstruct(observe(s, trace_scene(s, kTrace)), g, {});
    CHECK(std::count_if(r.votes.free_votes.begin(), r.votes.free_votes.end(), [](auto v) { return v > 0; }) > 1000);
    for (int row = 98; row < 101; ++row)
        for (int col = 55; col < 95; ++col) CHECK(r.votes.free_votes[r.votes.index(row, col)] == 0u);
}

TEST_CASE("inputs carrying tracer truth are rejected") {
    GenParams p;
    p.seed = 1;
    const Scene s = generate_scene(p);
    ReconInputs in{s.side_m, s.ues, s.bss, trace_scene(s, kTrace)};
    CHECK_THROWS_AS(reconstruct(in, {64, 64, 200.0}, {}), ValidationError);
}

TEST_CASE("grid and config validation") {
    ReconInputs in{200.0, {{1, 1}}, {{2, 2}}, {}};
    CHECK_THROWS_AS(reconstruct(in, {64, 64, 100.0}, {}), ExtentMismatchError);
    ReconConfig bad;
    bad.min_evidence = 0;
    CHECK_THROWS_AS(reconstruct(in, {64, 64, 200.0}, bad), ValidationError);
    bad = {};
    bad.length_tol_m = 0.0;
    CHECK_THROWS_AS(reconstruct(in, {64, 64, 200.0}, bad), ValidationError);
    in.links.push_back({0, 3, {}});
    CHECK_THROWS_AS(reconstruct(in, {64, 64, 200.0}, {}), ValidationError);
}

TEST_CASE("probability image quantization") {
    const auto img = probability_image({0.0, 0.5, 2.0 / 3.0, 1.0}, 2, 2);
    CHECK(img.pixels == std::vector<std::uint8_t>{0, 128, 170, 255});
}
