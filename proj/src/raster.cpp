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

#include "rfrecon/raster.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "rfrecon/errors.hpp"

namespace rfrecon {

void GridSpec::validate() const {
    if (width_px != height_px) throw ValidationError("grid must be square (width_px == height_px)");
    if (width_px < 16) throw ValidationError("grid must be at least 16 pixels wide");
    if (!(side_m > 0.0) || !std::isfinite(side_m)) throw ValidationError("grid side_m must be positive");
}

BinaryMap::BinaryMap(int width, int height, bool fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ValidationError("binary map dimensions must be >= 1");
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMap::count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
}

BinaryMap BinaryMap::transposed() const {
    BinaryMap out(height_, width_);
    for (int r = 0; r < height_; ++r)
        for (int c = 0; c < width_; ++c) out.set(c, r, at(r, c));
    return out;
}

namespace {

struct Header {
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 1;
    std::size_t data_offset = 0;
};

Header parse_header(const std::string& bytes, const char* magic, bool has_maxval) {
    Header h;
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto token = [&] {
        skip_space();
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return bytes.substr(start, pos - start);
    };
    auto number = [&](const char* what) {
        const std::string t = token();
        try {
            std::size_t used = 0;
            const int v = std::stoi(t, &used);
            if (used != t.size() || v < 1) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw CorruptFormatError(std::string("netpbm: invalid ") + what + " '" + t + "'");
        }
    };
    h.magic = token();
    if (h.magic != magic) throw CorruptFormatError(std::string("netpbm: expected magic ") + magic + ", got '" + h.magic + "'");
    h.width = number("width");
    h.height = number("height");
    if (has_maxval) {
        h.maxval = number("maxval");
        if (h.maxval != 255) throw CorruptFormatError("netpbm: only maxval 255 is supported");
    }
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw CorruptFormatError("netpbm: truncated header");
    }
    h.data_offset = pos + 1;
    return h;
}

void check_size(const std::string& bytes, const Header& h, std::size_t payload) {
    const std::size_t expected = h.data_offset + payload;
    if (bytes.size() != expected) {
        throw CorruptFormatError("netpbm " + h.magic + ": expected " + std::to_string(expected) + " bytes, got " +
                                 std::to_string(bytes.size()));
    }
}

std::string header(const char* magic, int w, int h, bool maxval) {
    std::string s = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n";
    if (maxval) s += "255\n";
    return s;
}

} // namespace

std::string encode_pbm(const BinaryMap& map) {
    std::string out = header("P4", map.width(), map.height(), false);
    const int row_bytes = (map.width() + 7) / 8;
    for (int r = 0; r < map.height(); ++r) {
        std::string row(static_cast<std::size_t>(row_bytes), '\0');
        for (int c = 0; c < map.width(); ++c) {
            if (map.at(r, c)) row[c / 8] = static_cast<char>(row[c / 8] | (0x80 >> (c % 8)));
        }
        out += row;
    }
    return out;
}

BinaryMap decode_pbm(const std::string& bytes) {
    const Header h = parse_header(bytes, "P4", false);
    const std::size_t row_bytes = (static_cast<std::size_t>(h.width) + 7) / 8;
    check_size(bytes, h, row_bytes * h.height);
    BinaryMap map(h.width, h.height);
    for (int r = 0; r < h.height; ++r) {
        for (int c = 0; c < h.width; ++c) {
            const auto byte = static_cast<unsigned char>(bytes[h.data_offset + r * row_bytes + c / 8]);
            map.set(r, c, (byte & (0x80 >> (c % 8))) != 0);
        }
    }
    return map;
}

std::string encode_pgm(const GrayImage& image) {
    std::string out = header("P5", image.width, image.height, true);
    out.append(image.pixels.begin(), image.pixels.end());
    return out;
}

GrayImage decode_pgm(const std::string& bytes) {
    const Header h = parse_header(bytes, "P5", true);
    check_size(bytes, h, static_cast<std::size_t>(h.width) * h.height);
    GrayImage img{h.width, h.height, {}};
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(h.data_offset), bytes.end());
    return img;
}

std::string encode_ppm(const RgbImage& image) {
    std::string out = header("P6", image.width, image.height, true);
    out.reserve(out.size() + image.pixels.size() * 3);
    for (const Rgb& p : image.pixels) {
        out.push_back(static_cast<char>(p.r));
        out.push_back(static_cast<char>(p.g));
        out.push_back(static_cast<char>(p.b));
    }
    return out;
}

RgbImage decode_ppm(const std::string& bytes) {
    const Header h = parse_header(bytes, "P6", true);
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    check_size(bytes, h, 3 * n);
    RgbImage img{h.width, h.height, std::vector<Rgb>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t o = h.data_offset + 3 * i;
        img.pixels[i] = {static_cast<std::uint8_t>(bytes[o]), static_cast<std::uint8_t>(bytes[o + 1]),
                         static_cast<std::uint8_t>(bytes[o + 2])};
    }
    return img;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void write_pbm(const std::filesystem::path& path, const BinaryMap& map) { write_file(path, encode_pbm(map)); }
BinaryMap read_pbm(const std::filesystem::path& path) { return decode_pbm(read_file(path)); }
void write_pgm(const std::filesystem::path& path, const GrayImage& image) { write_file(path, encode_pgm(image)); }
GrayImage read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }
void write_ppm(const std::filesystem::path& path, const RgbImage& image) { write_file(path, encode_ppm(image)); }
RgbImage read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

} // namespace rfrecon
