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

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rfrecon/raster.hpp"
#include "rfrecon/raytracer.hpp"
#include "rfrecon/rng.hpp"

namespace rfrecon {

enum class AngleRole { Aoa, Aod };

/// Role of one tensor channel. bs == -1 marks a channel already max-combined
/// over all base stations.
struct ChannelLabel {
    int ue = 0;
    int bs = -1;
    AngleRole role = AngleRole::Aoa;

    std::string str() const;  // "ue3/bs1/aoa" or "ue3/aod"
    static ChannelLabel parse(const std::string& text);

    friend bool operator==(const ChannelLabel&, const ChannelLabel&) = default;
};

/// C x h x w floats in [0, 1], channel-major then row-major.
struct RayImageTensor {
    GridSpec grid;
    std::vector<ChannelLabel> labels;
    std::vector<float> data;

    std::size_t channels() const { return labels.size(); }
    std::size_t plane_size() const { return static_cast<std::size_t>(grid.width_px) * grid.height_px; }
    std::span<float> channel(std::size_t k) { return {data.data() + k * plane_size(), plane_size()}; }
    std::span<const float> channel(std::size_t k) const { return {data.data() + k * plane_size(), plane_size()}; }
    float at(std::size_t k, int row, int col) const {
        return data[k * plane_size() + static_cast<std::size_t>(row) * grid.width_px + col];
    }

    friend bool operator==(const RayImageTensor&, const RayImageTensor&) = default;
};

/// Ray pixel value: normalized path length delay·c / side_m, clamped to 1.
float path_ray_value(const PathDescriptor& path, double side_m, double c = kSpeedOfLight);

/// Max-writes `value` into every pixel whose center lies within half a pixel
/// of the ray, from the origin to the map boundary. The origin pixel is
/// always written.
void rasterize_path_ray(Point2 origin, double angle, float value, const GridSpec& grid, std::span<float> channel);

struct PairChannels {
    std::vector<float> aoa;  // rays from the BS along each path's AoA
    std::vector<float> aod;  // rays from the UE along each path's AoD
};

PairChannels encode_pair(double side_m, const RadioLink& link, Point2 ue, Point2 bs, const GridSpec& grid,
                         double c = kSpeedOfLight);

/// 2|V||W| channels ordered (ue, bs, [aoa, aod]).
RayImageTensor encode_scene_pairs(std::span<const Point2> ues, std::span<const Point2> bss,
                                  const std::vector<RadioLink>& links, const GridSpec& grid,
                                  double c = kSpeedOfLight);

/// Elementwise max over base stations: 2|V||W| pair channels -> 2|V| channels
/// ordered (ue, [aoa, aod]). Throws LabelMismatchError on an unexpected layout.
RayImageTensor combine_max_per_bs(const RayImageTensor& pairs, int n_ues, int n_bss);

/// Same result as combine_max_per_bs(encode_scene_pairs(...)) without
/// materializing the pair channels.
RayImageTensor encode_scene_combined(std::span<const Point2> ues, std::span<const Point2> bss,
                                     const std::vector<RadioLink>& links, const GridSpec& grid,
                                     double c = kSpeedOfLight);

inline constexpr int kFeaturePaths = 5;
inline constexpr int kFeaturesPerPath = 7;
using LinkFeatureVector = std::array<float, kFeaturePaths * kFeaturesPerPath>;

/// Five shortest paths, each (ue.x, ue.y, bs.x, bs.y, aoa, aod, length)
/// normalized by side_m or 2π; unused slots stay zero.
LinkFeatureVector encode_link_features(const RadioLink& link, Point2 ue, Point2 bs, double side_m,
                                       double c = kSpeedOfLight);

struct SubsampleMask {
    std::vector<bool> ue_kept;
    std::vector<bool> bs_kept;
};

struct SubsampleResult {
    std::vector<RadioLink> links;  // links whose UE and BS both survive
    SubsampleMask mask;
};

/// Keeps a uniform count in [ceil(n/2), n] of UEs and of BSs, chosen uniformly.
SubsampleResult subsample_links(const std::vector<RadioLink>& links, int n_ues, int n_bss, Rng& rng);

/// Zeroes every channel that belongs to a dropped UE or BS; channel count is unchanged.
void apply_subsample_mask(RayImageTensor& tensor, const SubsampleMask& mask);

// RFT1: "RFT1", u32 C, h, w (little-endian), then C·h·w little-endian f32.
std::string encode_rft(const RayImageTensor& tensor);
std::string tensor_sidecar_json(const RayImageTensor& tensor);
RayImageTensor decode_rft(const std::string& bytes, const std::string& sidecar_json);

/// Writes `path` and the sidecar `path` + ".json".
void write_tensor(const std::filesystem::path& path, const RayImageTensor& tensor);
RayImageTensor read_tensor(const std::filesystem::path& path);

} // namespace rfrecon
