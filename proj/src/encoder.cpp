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

#include "rfrecon/encoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <regex>

#include <json.hpp>

#include "rfrecon/errors.hpp"

namespace rfrecon {

using ordered_json = nlohmann::ordered_json;

std::string ChannelLabel::str() const {
    std::string s = "ue" + std::to_string(ue);
    if (bs >= 0) s += "/bs" + std::to_string(bs);
    return s + (role == AngleRole::Aoa ? "/aoa" : "/aod");
}

ChannelLabel ChannelLabel::parse(const std::string& text) {
    static const std::regex pattern(R"(ue(\d+)(?:/bs(\d+))?/(aoa|aod))");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) throw CorruptFormatError("bad channel label '" + text + "'");
    ChannelLabel label;
    label.ue = std::stoi(m[1].str());
    label.bs = m[2].matched ? std::stoi(m[2].str()) : -1;
    label.role = m[3].str() == "aoa" ? AngleRole::Aoa : AngleRole::Aod;
    return label;
}

float path_ray_value(const PathDescriptor& path, double side_m, double c) {
    return static_cast<float>(std::min(1.0, path.delay * c / side_m));
}

void rasterize_path_ray(Point2 origin, double angle, float value, const GridSpec& grid, std::span<float> channel) {
    const int w = grid.width_px;
    const int h = grid.height_px;
    const double mpp = grid.meters_per_pixel();
    const Point2 o{origin.x / mpp, origin.y / mpp};
    const Point2 d = unit_vector(angle);
    constexpr double kHit = 0.5 + 1e-9;

    auto put = [&](int r, int c) {
        float& px = channel[static_cast<std::size_t>(r) * w + c];
        px = std::max(px, value);
    };
    put(std::clamp(static_cast<int>(std::floor(o.y)), 0, h - 1), std::clamp(static_cast<int>(std::floor(o.x)), 0, w - 1));

    // Half-pixel steps; every pixel within half a pixel of the ray has its
    // center within 0.75 px of some sample, i.e. in the sample's 3x3 block.
    for (double t = 0.0;; t += 0.5) {
        const Point2 p = o + t * d;
        if (p.x < -1.0 || p.y < -1.0 || p.x > w + 1.0 || p.y > h + 1.0) break;
        const int pc = static_cast<int>(std::floor(p.x));
        const int pr = static_cast<int>(std::floor(p.y));
        for (int r = std::max(0, pr - 1); r <= std::min(h - 1, pr + 1); ++r) {
            for (int c = std::max(0, pc - 1); c <= std::min(w - 1, pc + 1); ++c) {
                const Point2 v = Point2{c + 0.5, r + 0.5} - o;
                const double along = dot(v, d);
                const double dist = along < 0.0 ? norm(v) : std::fabs(cross(d, v));
                if (dist <= kHit) put(r, c);
            }
        }
    }
}

PairChannels encode_pair(double side_m, const RadioLink& link, Point2 ue, Point2 bs, const GridSpec& grid, double c) {
    const std::size_t n = static_cast<std::size_t>(grid.width_px) * grid.height_px;
    PairChannels out{std::vector<float>(n, 0.0f), std::vector<float>(n, 0.0f)};
    for (const auto& p : link.paths) {
        const float value = path_ray_value(p, side_m, c);
        rasterize_path_ray(bs, p.aoa, value, grid, out.aoa);
        rasterize_path_ray(ue, p.aod, value, grid, out.aod);
    }
    return out;
}

namespace {

void check_links(std::span<const Point2> ues, std::span<const Point2> bss, const std::vector<RadioLink>& links) {
    for (const auto& l : links) {
        if (l.ue_index < 0 || l.ue_index >= static_cast<int>(ues.size()) || l.bs_index < 0 ||
            l.bs_index >= static_cast<int>(bss.size())) {
            throw ValidationError("link (" + std::to_string(l.ue_index) + ", " + std::to_string(l.bs_index) +
                                  ") does not index the device lists");
        }
    }
}

RayImageTensor blank_tensor(const GridSpec& grid, std::vector<ChannelLabel> labels) {
    RayImageTensor t{grid, std::move(labels), {}};
    t.data.assign(t.channels() * t.plane_size(), 0.0f);
    return t;
}

} // namespace

RayImageTensor encode_scene_pairs(std::span<const Point2> ues, std::span<const Point2> bss,
                                  const std::vector<RadioLink>& links, const GridSpec& grid, double c) {
    grid.validate();
    check_links(ues, bss, links);
    std::vector<ChannelLabel> labels;
    for (int i = 0; i < static_cast<int>(ues.size()); ++i)
        for (int j = 0; j < static_cast<int>(bss.size()); ++j)
            for (AngleRole role : {AngleRole::Aoa, AngleRole::Aod}) labels.push_back({i, j, role});
    RayImageTensor t = blank_tensor(grid, std::move(labels));
    for (const auto& l : links) {
        const std::size_t k = 2 * (static_cast<std::size_t>(l.ue_index) * bss.size() + l.bs_index);
        for (const auto& p : l.paths) {
            const float value = path_ray_value(p, grid.side_m, c);
            rasterize_path_ray(bss[l.bs_index], p.aoa, value, grid, t.channel(k));
            rasterize_path_ray(ues[l.ue_index], p.aod, value, grid, t.channel(k + 1));
        }
    }
    return t;
}

RayImageTensor combine_max_per_bs(const RayImageTensor& pairs, int n_ues, int n_bss) {
    const std::size_t expected = 2 * static_cast<std::size_t>(n_ues) * n_bss;
    if (pairs.channels() != expected) {
        throw LabelMismatchError("expected " + std::to_string(expected) + " pair channels, got " +
                                 std::to_string(pairs.channels()));
    }
    std::vector<ChannelLabel> labels;
    for (int i = 0; i < n_ues; ++i)
        for (AngleRole role : {AngleRole::Aoa, AngleRole::Aod}) labels.push_back({i, -1, role});
    RayImageTensor out = blank_tensor(pairs.grid, std::move(labels));
    for (std::size_t k = 0; k < pairs.channels(); ++k) {
        const ChannelLabel& l = pairs.labels[k];
        const int i = static_cast<int>(k / (2 * n_bss));
        const int j = static_cast<int>((k / 2) % n_bss);
        const AngleRole role = k % 2 == 0 ? AngleRole::Aoa : AngleRole::Aod;
        if (l.ue != i || l.bs != j || l.role != role) {
            throw LabelMismatchError("channel " + std::to_string(k) + " is labelled " + l.str() + ", expected " +
                                     ChannelLabel{i, j, role}.str());
        }
        auto dst = out.channel(2 * static_cast<std::size_t>(i) + (role == AngleRole::Aoa ? 0 : 1));
        auto src = pairs.channel(k);
        std::transform(dst.begin(), dst.end(), src.begin(), dst.begin(), [](float a, float b) { return std::max(a, b); });
    }
    return out;
}

RayImageTensor encode_scene_combined(std::span<const Point2> ues, std::span<const Point2> bss,
                                     const std::vector<RadioLink>& links, const GridSpec& grid, double c) {
    grid.validate();
    check_links(ues, bss, links);
    std::vector<ChannelLabel> labels;
    for (int i = 0; i < static_cast<int>(ues.size()); ++i)
        for (AngleRole role : {AngleRole::Aoa, AngleRole::Aod}) labels.push_back({i, -1, role});
    RayImageTensor t = blank_tensor(grid, std::move(labels));
    for (const auto& l : links) {
        const std::size_t k = 2 * static_cast<std::size_t>(l.ue_index);
        for (const auto& p : l.paths) {
            const float value = path_ray_value(p, grid.side_m, c);
            rasterize_path_ray(bss[l.bs_index], p.aoa, value, grid, t.channel(k));
            rasterize_path_ray(ues[l.ue_index], p.aod, value, grid, t.channel(k + 1));
        }
    }
    return t;
}

LinkFeatureVector encode_link_features(const RadioLink& link, Point2 ue, Point2 bs, double side_m, double c) {
    std::vector<PathDescriptor> paths = link.paths;
    std::stable_sort(paths.begin(), paths.end(), [](const PathDescriptor& a, const PathDescriptor& b) {
        if (a.delay != b.delay) return a.delay < b.delay;
        if (a.aoa != b.aoa) return a.aoa < b.aoa;
        return a.aod < b.aod;
    });
    LinkFeatureVector f{};
    const std::size_t n = std::min<std::size_t>(kFeaturePaths, paths.size());
    for (std::size_t k = 0; k < n; ++k) {
        float* slot = f.data() + k * kFeaturesPerPath;
        slot[0] = static_cast<float>(ue.x / side_m);
        slot[1] = static_cast<float>(ue.y / side_m);
        slot[2] = static_cast<float>(bs.x / side_m);
        slot[3] = static_cast<float>(bs.y / side_m);
        slot[4] = static_cast<float>(paths[k].aoa / kTwoPi);
        slot[5] = static_cast<float>(paths[k].aod / kTwoPi);
        slot[6] = static_cast<float>(paths[k].delay * c / side_m);
    }
    return f;
}

namespace {

std::vector<bool> keep_random_half_or_more(int n, Rng& rng) {
    std::vector<bool> kept(static_cast<std::size_t>(n), false);
    if (n == 0) return kept;
    const auto count = rng.uniform_int((n + 1) / 2, n);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (std::int64_t k = 0; k < count; ++k) {
        const auto pick = rng.uniform_int(k, n - 1);
        std::swap(order[k], order[pick]);
        kept[order[k]] = true;
    }
    return kept;
}

} // namespace

SubsampleResult subsample_links(const std::vector<RadioLink>& links, int n_ues, int n_bss, Rng& rng) {
    SubsampleResult out;
    out.mask.ue_kept = keep_random_half_or_more(n_ues, rng);
    out.mask.bs_kept = keep_random_half_or_more(n_bss, rng);
    for (const auto& l : links) {
        if (l.ue_index < 0 || l.ue_index >= n_ues || l.bs_index < 0 || l.bs_index >= n_bss)
            throw ValidationError("link index outside device counts");
        if (out.mask.ue_kept[l.ue_index] && out.mask.bs_kept[l.bs_index]) out.links.push_back(l);
    }
    return out;
}

void apply_subsample_mask(RayImageTensor& tensor, const SubsampleMask& mask) {
    for (std::size_t k = 0; k < tensor.channels(); ++k) {
        const ChannelLabel& l = tensor.labels[k];
        if (l.ue < 0 || l.ue >= static_cast<int>(mask.ue_kept.size()) ||
            l.bs >= static_cast<int>(mask.bs_kept.size())) {
            throw LabelMismatchError("channel " + l.str() + " is outside the subsample mask");
        }
        const bool dropped = !mask.ue_kept[l.ue] || (l.bs >= 0 && !mask.bs_kept[l.bs]);
        if (dropped) std::ranges::fill(tensor.channel(k), 0.0f);
    }
}

namespace {

constexpr std::size_t kRftHeader = 16;

void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + k])) << (8 * k);
    return v;
}

} // namespace

std::string encode_rft(const RayImageTensor& tensor) {
    std::string out = "RFT1";
    put_u32(out, static_cast<std::uint32_t>(tensor.channels()));
    put_u32(out, static_cast<std::uint32_t>(tensor.grid.height_px));
    put_u32(out, static_cast<std::uint32_t>(tensor.grid.width_px));
    out.reserve(kRftHeader + 4 * tensor.data.size());
    for (float v : tensor.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

std::string tensor_sidecar_json(const RayImageTensor& tensor) {
    ordered_json j;
    j["channel_labels"] = ordered_json::array();
    for (const auto& l : tensor.labels) j["channel_labels"].push_back(l.str());
    j["grid"] = {{"width_px", tensor.grid.width_px}, {"height_px", tensor.grid.height_px}, {"side_m", tensor.grid.side_m}};
    return j.dump() + "\n";
}

RayImageTensor decode_rft(const std::string& bytes, const std::string& sidecar_json) {
    if (bytes.size() < kRftHeader) {
        throw CorruptFormatError("RFT1: expected at least " + std::to_string(kRftHeader) + " bytes, got " +
                                 std::to_string(bytes.size()));
    }
    if (bytes.compare(0, 4, "RFT1") != 0) throw CorruptFormatError("RFT1: bad magic");
    const std::uint64_t c = get_u32(bytes, 4);
    const std::uint64_t h = get_u32(bytes, 8);
    const std::uint64_t w = get_u32(bytes, 12);
    const std::uint64_t expected = kRftHeader + 4 * c * h * w;
    if (bytes.size() != expected) {
        throw CorruptFormatError("RFT1: expected " + std::to_string(expected) + " bytes, got " +
                                 std::to_string(bytes.size()));
    }

    RayImageTensor t;
    try {
        const auto j = ordered_json::parse(sidecar_json);
        const auto& g = j.at("grid");
        t.grid = {g.at("width_px").get<int>(), g.at("height_px").get<int>(), g.at("side_m").get<double>()};
        for (const auto& l : j.at("channel_labels")) t.labels.push_back(ChannelLabel::parse(l.get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFormatError(std::string("RFT1 sidecar: ") + e.what());
    }
    if (t.labels.size() != c || static_cast<std::uint64_t>(t.grid.height_px) != h ||
        static_cast<std::uint64_t>(t.grid.width_px) != w) {
        throw CorruptFormatError("RFT1: header dimensions disagree with sidecar manifest");
    }
    t.data.resize(c * h * w);
    for (std::size_t k = 0; k < t.data.size(); ++k) {
        const float v = std::bit_cast<float>(get_u32(bytes, kRftHeader + 4 * k));
        if (!(v >= 0.0f && v <= 1.0f)) throw CorruptFormatError("RFT1: value outside [0, 1]");
        t.data[k] = v;
    }
    return t;
}

void write_tensor(const std::filesystem::path& path, const RayImageTensor& tensor) {
    write_file(path, encode_rft(tensor));
    write_file(path.string() + ".json", tensor_sidecar_json(tensor));
}

RayImageTensor read_tensor(const std::filesystem::path& path) {
    return decode_rft(read_file(path), read_file(path.string() + ".json"));
}

} // namespace rfrecon
