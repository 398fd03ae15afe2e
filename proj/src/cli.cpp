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

#include "rfrecon/cli.hpp"

#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "rfrecon/dataset.hpp"
#include "rfrecon/errors.hpp"
#include "rfrecon/pipeline.hpp"

namespace fs = std::filesystem;

namespace rfrecon::cli {
namespace {

struct Options {
    std::uint64_t seed = 0;
    int scenes = 100;
    int grid_px = 64;
    double side_m = 200.0;
    int ues = 30;
    int bss = 5;
    int max_bounces = 2;
    int workers = 1;
    std::string out;
    std::string split = "all";
    std::vector<double> ratios{0.93, 0.06, 0.01};
    std::string pred_dir;
    std::string gt_dir;
    int min_evidence = 1;
    std::string unknown_fill = "free";
    bool verbose = false;
};

class Runner {
public:
    Runner(const Options& opt, std::ostream& out, std::ostream& err) : opt_(opt), out_(out), err_(err) {}

    void generate() {
        GenParams params;
        params.n_ues = opt_.ues;
        params.n_bss = opt_.bss;
        params.side_m = opt_.side_m;
        params.align_px = opt_.grid_px;
        BuildOptions build;
        build.grid = {opt_.grid_px, opt_.grid_px, opt_.side_m};
        build.trace.max_bounces = opt_.max_bounces;
        build.workers = opt_.workers;
        const SplitRatios ratios = split_ratios();
        log("generating " + std::to_string(opt_.scenes) + " scenes");
        const auto m = build_dataset(params, opt_.scenes, ratios, opt_.seed, opt_.out, build);
        out_ << "generated " << m.scenes.size() << " scenes (train " << m.ids(Split::Train).size() << ", val "
             << m.ids(Split::Val).size() << ", test " << m.ids(Split::Test).size() << ") in " << opt_.out << "\n";
    }

    void trace(bool override_bounces) {
        auto m = load_manifest(opt_.out);
        if (override_bounces) m.trace.max_bounces = opt_.max_bounces;
        m.trace.validate();
        log("tracing " + std::to_string(m.scenes.size()) + " scenes");
        retrace_dataset(m, opt_.workers);
        if (override_bounces) write_file(DatasetPaths{m.root}.manifest(), manifest_to_json(m));
        out_ << "traced " << m.scenes.size() << " scenes\n";
    }

    void encode() {
        const auto m = load_manifest(opt_.out);
        log("encoding " + std::to_string(m.scenes.size()) + " scenes");
        encode_dataset(m, opt_.workers);
        out_ << "encoded " << m.scenes.size() << " scenes\n";
    }

    void reconstruct() {
        const auto m = load_manifest(opt_.out);
        ReconConfig cfg;
        cfg.min_evidence = opt_.min_evidence;
        cfg.unknown_fill = unknown_fill();
        cfg.c = m.trace.c;
        const auto split = selected_split();
        const fs::path dir = pred_dir();
        log("reconstructing into " + dir.string());
        reconstruct_dataset(m, split, cfg, dir, opt_.workers);
        out_ << "reconstructed " << m.ids(split).size() << " scenes into " << dir.string() << "\n";
    }

    void evaluate() {
        std::vector<std::string> ids;
        fs::path gt_dir = opt_.gt_dir;
        double side_m = opt_.side_m;
        std::error_code ec;
        const bool have_manifest = !opt_.out.empty() && fs::exists(DatasetPaths{opt_.out}.manifest(), ec);
        if (have_manifest) {
            const auto m = load_manifest(opt_.out);
            ids = m.ids(selected_split());
            if (gt_dir.empty()) gt_dir = DatasetPaths{m.root}.root / "gt";
            side_m = m.grid.side_m;
        } else {
            if (opt_.gt_dir.empty() || opt_.pred_dir.empty()) {
                throw ValidationError("evaluate needs a dataset (--out) or both --pred-dir and --gt-dir");
            }
            if (opt_.split != "all") throw ValidationError("--split requires a dataset manifest");
            ids = list_map_ids(gt_dir);
        }
        if (ids.empty()) throw ValidationError("no maps to evaluate");
        const auto report = evaluate_maps(ids, pred_dir(), gt_dir, side_m, opt_.workers);
        const std::string table = report_to_table(report);
        if (!opt_.out.empty()) {
            write_file(fs::path(opt_.out) / "eval.json", report_to_json(report, 2) + "\n");
            write_file(fs::path(opt_.out) / "eval.txt", table);
        }
        out_ << table << report_to_json(report, -1) << "\n";
    }

    void render() {
        const auto m = load_manifest(opt_.out);
        const fs::path dir = m.root / "renders";
        render_dataset(m, selected_split(), pred_dir(), dir, opt_.workers);
        out_ << "rendered " << m.ids(selected_split()).size() << " overlays into " << dir.string() << "\n";
    }

private:
    void log(const std::string& msg) const {
        if (opt_.verbose) err_ << "rfrecon: " << msg << "\n";
    }

    SplitRatios split_ratios() const {
        if (opt_.ratios.size() != 3) throw ValidationError("--ratios takes three values");
        return {opt_.ratios[0], opt_.ratios[1], opt_.ratios[2]};
    }

    std::optional<Split> selected_split() const {
        if (opt_.split == "all") return std::nullopt;
        return parse_split(opt_.split);
    }

    UnknownFill unknown_fill() const {
        if (opt_.unknown_fill == "free") return UnknownFill::Free;
        if (opt_.unknown_fill == "building") return UnknownFill::Building;
        throw ValidationError("--unknown-fill must be free or building");
    }

    fs::path pred_dir() const {
        if (!opt_.pred_dir.empty()) return opt_.pred_dir;
        return fs::path(opt_.out) / "predictions";
    }

    const Options& opt_;
    std::ostream& out_;
    std::ostream& err_;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Synthetic radio-map scenes, ray tracing and geometric map reconstruction", "rfrecon"};
    app.require_subcommand(1, 1);

    auto common = [&](CLI::App* sub, bool out_required) {
        auto* o = sub->add_option("--out", opt.out, "dataset root directory");
        if (out_required) o->required();
        sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--verbose", opt.verbose, "progress messages on stderr");
    };
    auto generation = [&](CLI::App* sub) {
        sub->add_option("--seed", opt.seed, "root seed for all randomness")->required();
        sub->add_option("--scenes", opt.scenes, "number of scenes")->check(CLI::PositiveNumber);
        sub->add_option("--grid-px", opt.grid_px, "raster width and height in pixels")->check(CLI::Range(16, 4096));
        sub->add_option("--side-m", opt.side_m, "scene side length in meters")->check(CLI::PositiveNumber);
        sub->add_option("--ues", opt.ues, "UEs per scene")->check(CLI::PositiveNumber);
        sub->add_option("--bss", opt.bss, "base stations per scene")->check(CLI::PositiveNumber);
        sub->add_option("--max-bounces", opt.max_bounces, "reflection order, 0 to 2")->check(CLI::Range(0, 2));
        sub->add_option("--ratios", opt.ratios, "train,val,test split ratios")->expected(3)->delimiter(',');
    };
    auto recon = [&](CLI::App* sub) {
        sub->add_option("--min-evidence", opt.min_evidence, "wall votes for probability 0.5")->check(CLI::PositiveNumber);
        sub->add_option("--unknown-fill", opt.unknown_fill, "label of unobserved pixels: free or building");
    };
    auto split = [&](CLI::App* sub) { sub->add_option("--split", opt.split, "train, val, test or all"); };
    auto pred = [&](CLI::App* sub) { sub->add_option("--pred-dir", opt.pred_dir, "prediction directory"); };

    auto* generate = app.add_subcommand("generate", "generate, trace and encode a dataset");
    common(generate, true);
    generation(generate);

    auto* trace = app.add_subcommand("trace", "re-trace all scenes of a dataset");
    common(trace, true);
    auto* bounces = trace->add_option("--max-bounces", opt.max_bounces, "reflection order, 0 to 2")->check(CLI::Range(0, 2));

    auto* encode = app.add_subcommand("encode", "write ray-image tensors and link features");
    common(encode, true);

    auto* reconstruct = app.add_subcommand("reconstruct", "run the geometric baseline");
    common(reconstruct, true);
    split(reconstruct);
    pred(reconstruct);
    recon(reconstruct);

    auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
    common(evaluate, false);
    split(evaluate);
    pred(evaluate);
    evaluate->add_option("--gt-dir", opt.gt_dir, "ground-truth directory");
    evaluate->add_option("--side-m", opt.side_m, "map side in meters when no manifest is given")
        ->check(CLI::PositiveNumber);

    auto* render = app.add_subcommand("render", "write confusion overlays");
    common(render, true);
    split(render);
    pred(render);

    auto* pipeline = app.add_subcommand("pipeline", "generate, trace, encode, reconstruct and evaluate");
    common(pipeline, true);
    generation(pipeline);
    split(pipeline);
    recon(pipeline);

    std::vector<const char*> argv{"rfrecon"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitValidation;
    }

    Runner runner(opt, out, err);
    try {
        if (generate->parsed()) runner.generate();
        if (trace->parsed()) runner.trace(bounces->count() > 0);
        if (encode->parsed()) runner.encode();
        if (reconstruct->parsed()) runner.reconstruct();
        if (evaluate->parsed()) runner.evaluate();
        if (render->parsed()) runner.render();
        if (pipeline->parsed()) {
            runner.generate();
            runner.trace(false);
            runner.encode();
            runner.reconstruct();
            runner.evaluate();
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

} // namespace rfrecon::cli
