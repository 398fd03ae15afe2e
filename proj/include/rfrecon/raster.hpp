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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rfrecon/geometry.hpp"

namespace rfrecon {

/// Square raster over a square scene of side `side_m`. Row r covers
/// y in [r·mpp, (r+1)·mpp), column c covers x in [c·mpp, (c+1)·mpp).
/// Raster files store row 0 first.
struct GridSpec {
    int width_px = 224;
    int height_px = 224;
    double side_m = 200.0;

    double meters_per_pixel() const { return side_m / width_px; }
    double diagonal_m() const { return std::sqrt(2.0) * side_m; }
    Point2 pixel_center(int row, int col) const {
        const double mpp = meters_per_pixel();
        return {(col + 0.5) * mpp, (row + 0.5) * mpp};
    }
    /// Throws ValidationError unless w = h >= 16 and side_m > 0.
    void validate() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class BinaryMap {
public:
    BinaryMap(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool value) { bits_[index(row, col)] = value ? 1 : 0; }
    std::size_t count() const;
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    BinaryMap transposed() const;

    friend bool operator==(const BinaryMap&, const BinaryMap&) = default;

private:
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * width_ + col; }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(Rgb, Rgb) = default;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;  // row-major

    Rgb at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
    void set(int row, int col, Rgb c) { pixels[static_cast<std::size_t>(row) * width + col] = c; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// Netpbm encodings. PBM is P4 (1 = building), PGM is P5 maxval 255, PPM is P6.
std::string encode_pbm(const BinaryMap& map);
BinaryMap decode_pbm(const std::string& bytes);
std::string encode_pgm(const GrayImage& image);
GrayImage decode_pgm(const std::string& bytes);
std::string encode_ppm(const RgbImage& image);
RgbImage decode_ppm(const std::string& bytes);

void write_pbm(const std::filesystem::path& path, const BinaryMap& map);
BinaryMap read_pbm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_pgm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_ppm(const std::filesystem::path& path);

// Whole-file helpers shared by every on-disk format. Parent directories are
// created on write.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

} // namespace rfrecon
