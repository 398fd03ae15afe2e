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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "rfrecon/cli.hpp"
#include "rfrecon/dataset.hpp"
#include "rfrecon/encoder.hpp"
#include "rfrecon/errors.hpp"
#include "rfrecon/metrics.hpp"
#include "rfrecon/reconstructor.hpp"

namespace py = pybind11;
using namespace rfrecon;

namespace {

using Xy = std::pair<double, double>;

std::vector<Xy> to_xy(const std::vector<Point2>& pts) {
    std::vector<Xy> out;
    for (const auto& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

std::vector<Point2> from_xy(const std::vector<Xy>& pts) {
    std::vector<Point2> out;
    for (const auto& [x, y] : pts) out.push_back({x, y});
    return out;
}

GridSpec square_grid(const Scene& s, int grid_px) { return {grid_px, grid_px, s.side_m}; }

py::array_t<bool> map_to_array(const BinaryMap& m) {
    py::array_t<bool> out({m.height(), m.width()});
    auto v = out.mutable_unchecked<2>();
    for (int r = 0; r < m.height(); ++r)
        for (int c = 0; c < m.width(); ++c) v(r, c) = m.at(r, c);
    return out;
}

BinaryMap array_to_map(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw DimensionMismatchError("expected a 2-D array");
    const auto v = a.unchecked<2>();
    BinaryMap m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    for (py::ssize_t r = 0; r < a.shape(0); ++r)
        for (py::ssize_t c = 0; c < a.shape(1); ++c) m.set(static_cast<int>(r), static_cast<int>(c), v(r, c));
    return m;
}

py::array_t<float> tensor_to_array(const RayImageTensor& t) {
    py::array_t<float> out({static_cast<py::ssize_t>(t.channels()), static_cast<py::ssize_t>(t.grid.height_px),
                            static_cast<py::ssize_t>(t.grid.width_px)});
    std::copy(t.data.begin(), t.data.end(), out.mutable_data());
    return out;
}

std::vector<std::string> label_strings(const RayImageTensor& t) {
    std::vector<std::string> out;
    for (const auto& l : t.labels) out.push_back(l.str());
    return out;
}

UnknownFill parse_fill(const std::string& s) {
    if (s == "free") return UnknownFill::Free;
    if (s == "building") return UnknownFill::Building;
    throw ValidationError("unknown_fill must be 'free' or 'building'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Radio-map scene generation, ray tracing, encoding, reconstruction and metrics";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Scene>(m, "Scene")
        .def_readonly("id", &Scene::id)
        .def_readonly("side_m", &Scene::side_m)
        .def_property_readonly("ues", [](const Scene& s) { return to_xy(s.ues); })
        .def_property_readonly("bss", [](const Scene& s) { return to_xy(s.bss); })
        .def_property_readonly("buildings",
                               [](const Scene& s) {
                                   std::vector<std::vector<Xy>> out;
                                   for (const auto& b : s.buildings) out.push_back(to_xy(b.vertices()));
                                   return out;
                               })
        .def("to_json", &scene_to_json)
        .def_static("from_json", &scene_from_json, py::arg("text"))
        .def("__eq__", [](const Scene& a, const Scene& b) { return a == b; })
        .def("__repr__", [](const Scene& s) {
            return "<Scene " + s.id + ": " + std::to_string(s.buildings.size()) + " buildings, " +
                   std::to_string(s.ues.size()) + " UEs, " + std::to_string(s.bss.size()) + " BSs>";
        });

    py::class_<PathDescriptor>(m, "Path")
        .def_readonly("aoa", &PathDescriptor::aoa)
        .def_readonly("aod", &PathDescriptor::aod)
        .def_readonly("delay", &PathDescriptor::delay)
        .def_property_readonly("length_m", [](const PathDescriptor& p) { return p.length_m(); })
        .def_property_readonly("bounces", [](const PathDescriptor& p) -> py::object {
            if (p.truth) return py::int_(p.truth->bounces);
            return py::none();
        });

    py::class_<RadioLink>(m, "Link")
        .def_readonly("ue_index", &RadioLink::ue_index)
        .def_readonly("bs_index", &RadioLink::bs_index)
        .def_readonly("paths", &RadioLink::paths);

    m.def(
        "generate_scene",
        [](std::uint64_t seed, int n_ues, int n_bss, double side_m, int align_px) {
            GenParams p;
            p.seed = seed;
            p.n_ues = n_ues;
            p.n_bss = n_bss;
            p.side_m = side_m;
            p.align_px = align_px;
            return generate_scene(p);
        },
        py::arg("seed"), py::arg("n_ues") = 30, py::arg("n_bss") = 5, py::arg("side_m") = 200.0,
        py::arg("align_px") = 224);

    m.def(
        "make_scene",
        [](double side_m, const std::vector<std::vector<Xy>>& buildings, const std::vector<Xy>& ues,
           const std::vector<Xy>& bss, const std::string& id) {
            Scene s;
            s.id = id;
            s.side_m = side_m;
            for (const auto& b : buildings) s.buildings.emplace_back(from_xy(b));
            s.ues = from_xy(ues);
            s.bss = from_xy(bss);
            validate_scene(s);
            return s;
        },
        py::arg("side_m"), py::arg("buildings"), py::arg("ues"), py::arg("bss"), py::arg("id") = "scene");

    m.def(
        "trace",
        [](const Scene& s, int max_bounces, int workers) {
            TraceConfig cfg;
            cfg.max_bounces = max_bounces;
            py::gil_scoped_release release;
            return trace_scene(s, cfg, workers);
        },
        py::arg("scene"), py::arg("max_bounces") = 2, py::arg("workers") = 1);

    m.def(
        "rasterize",
        [](const Scene& s, int grid_px) { return map_to_array(rasterize_scene(s, square_grid(s, grid_px))); },
        py::arg("scene"), py::arg("grid_px") = 64);

    m.def(
        "encode",
        [](const Scene& s, const std::vector<RadioLink>& links, int grid_px, bool per_pair) {
            const GridSpec g = square_grid(s, grid_px);
            const auto t = per_pair ? encode_scene_pairs(s.ues, s.bss, links, g)
                                    : encode_scene_combined(s.ues, s.bss, links, g);
            return py::make_tuple(tensor_to_array(t), label_strings(t));
        },
        py::arg("scene"), py::arg("links"), py::arg("grid_px") = 64, py::arg("per_pair") = false,
        "Ray-image tensor (channels, h, w) and its channel labels.");

    m.def(
        "link_features",
        [](const Scene& s, const RadioLink& link) {
            const auto f = encode_link_features(link, s.ues.at(link.ue_index), s.bss.at(link.bs_index), s.side_m);
            return std::vector<float>(f.begin(), f.end());
        },
        py::arg("scene"), py::arg("link"));

    m.def(
        "reconstruct",
        [](const Scene& s, const std::vector<RadioLink>& links, int grid_px, int min_evidence,
           const std::string& unknown_fill) {
            ReconConfig cfg;
            cfg.min_evidence = min_evidence;
            cfg.unknown_fill = parse_fill(unknown_fill);
            const GridSpec g = square_grid(s, grid_px);
            const auto r = reconstruct(observe(s, links), g, cfg);
            py::array_t<double> prob({g.height_px, g.width_px});
            std::copy(r.probability.begin(), r.probability.end(), prob.mutable_data());
            return py::make_tuple(map_to_array(r.map), prob, r.evidence.size());
        },
        py::arg("scene"), py::arg("links"), py::arg("grid_px") = 64, py::arg("min_evidence") = 1,
        py::arg("unknown_fill") = "free", "(map, probability, evidence count)");

    m.def(
        "score",
        [](py::array_t<bool, py::array::c_style | py::array::forcecast> gt,
           py::array_t<bool, py::array::c_style | py::array::forcecast> pred, double meters_per_pixel,
           const std::string& id) {
            const auto s = score_map(id, array_to_map(gt), array_to_map(pred), meters_per_pixel);
            py::dict d;
            d["id"] = s.id;
            d["recall"] = s.recall;
            d["precision"] = s.precision;
            d["iou"] = s.iou;
            d["hausdorff_m"] = s.hausdorff_m;
            d["chamfer_m"] = s.chamfer_m;
            return d;
        },
        py::arg("gt"), py::arg("pred"), py::arg("meters_per_pixel"), py::arg("id") = "map");

    m.def("read_pbm", [](const std::filesystem::path& p) { return map_to_array(read_pbm(p)); }, py::arg("path"));
    m.def(
        "write_pbm",
        [](const std::filesystem::path& p, py::array_t<bool, py::array::c_style | py::array::forcecast> a) {
            write_pbm(p, array_to_map(a));
        },
        py::arg("path"), py::arg("map"));

    m.def(
        "read_tensor",
        [](const std::filesystem::path& p) {
            const auto t = read_tensor(p);
            return py::make_tuple(tensor_to_array(t), label_strings(t), t.grid.side_m);
        },
        py::arg("path"), "(array (channels, h, w), labels, side_m)");
    m.def(
        "write_tensor",
        [](const std::filesystem::path& p, py::array_t<float, py::array::c_style | py::array::forcecast> a,
           const std::vector<std::string>& labels, double side_m) {
            if (a.ndim() != 3) throw DimensionMismatchError("expected a (channels, h, w) array");
            RayImageTensor t;
            t.grid = {static_cast<int>(a.shape(2)), static_cast<int>(a.shape(1)), side_m};
            for (const auto& l : labels) t.labels.push_back(ChannelLabel::parse(l));
            if (t.labels.size() != static_cast<std::size_t>(a.shape(0)))
                throw LabelMismatchError("one label per channel required");
            t.data.assign(a.data(), a.data() + a.size());
            write_tensor(p, t);
        },
        py::arg("path"), py::arg("array"), py::arg("labels"), py::arg("side_m"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the rfrecon command line in-process: (exit code, stdout, stderr).");

    m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;
}
