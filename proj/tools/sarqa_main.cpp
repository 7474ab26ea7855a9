// sarqa: simulate speckled scenes, run reference despeckling filters, and
// score filtered results with the unassisted ratio-image measure M.
//
// Subcommands: simulate | filter | evaluate | metrics | tune
// Exit codes: 0 success, 2 usage, 3 data/validation, 4 no textureless area.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sarqa/errors.hpp"
#include "sarqa/filters.hpp"
#include "sarqa/metrics.hpp"
#include "sarqa/parallel.hpp"
#include "sarqa/quality.hpp"
#include "sarqa/raster.hpp"
#include "sarqa/rng.hpp"
#include "sarqa/simulate.hpp"
#include "sarqa/tune.hpp"
#include "sarqa/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sarqa;

namespace {

std::vector<std::string> g_argv; // full argv (minus program), for the manifest

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write: " + path.string());
}

void write_json(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

/// Every command records how to reproduce itself: replaying `argv` against
/// the same tool version yields bit-identical outputs.
void write_manifest(const fs::path& path, const std::string& command,
                    const json& inputs, const std::vector<std::string>& outputs,
                    uint64_t seed, double wall_time_s) {
    json m{{"tool", "sarqa"},
           {"version", SARQA_VERSION},
           {"command", command},
           {"argv", g_argv},
           {"inputs", inputs},
           {"outputs", outputs},
           {"seed", seed},
           {"wall_time_s", wall_time_s}};
    write_json(path, m);
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

struct SceneDesc {
    PhantomKind kind = PhantomKind::blocks_points;
    int side = 500;
    int rows = 0; // 0 = square
    double looks = 1.0;
    uint64_t seed = 1;
    std::string model = "multiplicative";
    double sigma = 1.0;
    // strips
    double low = 1.0, high = 20.0;
    std::vector<int> widths = {2, 4, 8, 16, 32};
    // step / textured_step
    double left = 11.0, right = 1.0;
    // sine
    double mean = 10.0, amplitude = 5.0, period = 0.0;

    static SceneDesc from_json(const json& j) {
        SceneDesc d;
        d.kind = phantom_kind_from_string(j.at("kind").get<std::string>());
        d.side = j.value("side", d.side);
        d.looks = j.value("looks", d.looks);
        d.seed = j.value("seed", d.seed);
        d.model = j.value("model", d.model);
        d.sigma = j.value("sigma", d.sigma);
        const json p = j.value("params", json::object());
        d.rows = p.value("rows", d.rows);
        d.low = p.value("low", d.low);
        d.high = p.value("high", d.high);
        if (p.contains("widths")) d.widths = p.at("widths").get<std::vector<int>>();
        d.left = p.value("left", d.left);
        d.right = p.value("right", d.right);
        d.mean = p.value("mean", d.mean);
        d.amplitude = p.value("amplitude", d.amplitude);
        d.period = p.value("period", d.period);
        return d;
    }

    json to_json() const {
        json p = json::object();
        if (rows > 0) p["rows"] = rows;
        switch (kind) {
            case PhantomKind::blocks_points: break;
            case PhantomKind::strips:
                p["low"] = low;
                p["high"] = high;
                p["widths"] = widths;
                break;
            case PhantomKind::step:
            case PhantomKind::textured_step:
                p["left"] = left;
                p["right"] = right;
                break;
            case PhantomKind::sine:
                p["mean"] = mean;
                p["amplitude"] = amplitude;
                p["period"] = period;
                break;
        }
        json j{{"kind", to_string(kind)}, {"side", side}, {"params", p},
               {"looks", looks}, {"seed", seed}};
        if (model != "multiplicative") {
            j["model"] = model;
            j["sigma"] = sigma;
        }
        return j;
    }

    Raster truth() const {
        switch (kind) {
            case PhantomKind::blocks_points: return phantom_blocks_points(side);
            case PhantomKind::strips: return phantom_strips(side, low, high, widths);
            case PhantomKind::step: return phantom_step(side, left, right, rows);
            case PhantomKind::textured_step:
                return phantom_textured_step(side, derive_seed(seed, 0x7e00), left,
                                             right, rows);
            case PhantomKind::sine:
                return phantom_sine(side, mean, amplitude, period, rows);
        }
        throw ValidationError("unreachable phantom kind");
    }
};

// ---------------------------------------------------------------------- //

int cmd_simulate(const SceneDesc& scene, const std::string& outdir) {
    const auto t0 = std::chrono::steady_clock::now();
    if (scene.model != "multiplicative" && scene.model != "additive")
        throw ValidationError("model must be multiplicative or additive");

    fs::create_directories(outdir);
    const Raster truth = scene.truth();
    Raster noisy;
    if (scene.model == "multiplicative") {
        const Raster speckle =
            gamma_speckle(truth.width, truth.height, SpeckleParams{scene.looks, scene.seed});
        noisy = apply_multiplicative(truth, speckle);
    } else {
        noisy = apply_additive(truth, scene.sigma, scene.seed);
    }

    const fs::path dir(outdir);
    save_raster(truth, dir / "truth.ras1");
    save_raster(noisy, dir / "noisy.ras1");
    std::vector<std::string> outputs = {"truth.ras1", "noisy.ras1"};

    if (scene.kind == PhantomKind::blocks_points) {
        const BlocksLayout lay = blocks_points_layout(scene.side);
        json rois = json::array();
        auto add = [&](const std::string& label, const Roi& r) {
            rois.push_back({{"label", label}, {"x0", r.x0}, {"y0", r.y0},
                            {"w", r.w}, {"h", r.h}});
        };
        add("background", lay.background_clear.at(0));
        const char* names[4] = {"square_tl", "square_tr", "square_bl", "square_br"};
        for (int i = 0; i < 4; ++i) add(names[i], lay.squares[i]);
        write_json(dir / "rois.json", rois);
        outputs.push_back("rois.json");
    }

    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "manifest.json", "simulate", scene.to_json(), outputs,
                   scene.seed, dt);
    std::printf("wrote %s/truth.ras1 and %s/noisy.ras1 (%dx%d)\n", outdir.c_str(),
                outdir.c_str(), truth.width, truth.height);
    return 0;
}

int cmd_filter(const std::string& input, const std::string& output,
               const FilterSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    const Raster z = load_raster(input);
    const Raster xhat = apply_filter(z, spec);
    save_raster(xhat, output);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(output + ".manifest.json", "filter",
                   json{{"input", input}, {"spec", spec.to_json()}}, {output}, 0, dt);
    std::printf("%s -> %s [%s]\n", input.c_str(), output.c_str(), spec.label().c_str());
    return 0;
}

int cmd_evaluate(const std::string& noisy_path, const std::string& filtered_path,
                 bool additive, double looks, double sigma, const EvalConfig& cfg,
                 const std::string& outdir, const std::string& label,
                 bool export_pngs) {
    const auto t0 = std::chrono::steady_clock::now();
    const Raster z = load_raster(noisy_path);
    const Raster xhat = load_raster(filtered_path);

    MReport rep = additive ? evaluate_m_additive(z, xhat, sigma, cfg)
                           : evaluate_m(z, xhat, looks, cfg);

    fs::create_directories(outdir);
    const fs::path dir(outdir);
    write_json(dir / "report.json", rep.to_json());
    write_text(dir / "report.csv",
               MReport::csv_header() + "\n" + rep.csv_row(label) + "\n");
    std::vector<std::string> outputs = {"report.json", "report.csv"};

    if (export_pngs) {
        Raster img = additive ? z : ratio_image(z, xhat, cfg.eps);
        if (additive)
            for (size_t i = 0; i < img.size(); ++i) img.data[i] -= xhat.data[i];
        export_png8(img, dir / "ratio.png", cfg.quant_low_pct, cfg.quant_high_pct);
        // overlay: paint selected window borders at the image maximum
        Raster overlay = img;
        const double peak = *std::max_element(overlay.data.begin(), overlay.data.end());
        for (const auto& w : rep.selection.at("windows")) {
            const int x0 = w.at("x0"), y0 = w.at("y0");
            const int ww = w.at("w"), wh = w.at("h");
            for (int x = x0; x < x0 + ww; ++x) {
                overlay.at(y0, x) = peak;
                overlay.at(y0 + wh - 1, x) = peak;
            }
            for (int y = y0; y < y0 + wh; ++y) {
                overlay.at(y, x0) = peak;
                overlay.at(y, x0 + ww - 1) = peak;
            }
        }
        export_png8(overlay, dir / "windows.png", cfg.quant_low_pct, cfg.quant_high_pct);
        outputs.push_back("ratio.png");
        outputs.push_back("windows.png");
    }

    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "manifest.json", "evaluate",
                   json{{"noisy", noisy_path}, {"filtered", filtered_path}},
                   outputs, cfg.seed, dt);
    std::printf("M = %.6g (r = %.6g, delta_h = %.6g, n = %d)\n", rep.m, rep.r,
                rep.delta_h, rep.n);
    return 0;
}

int cmd_metrics(const std::string& truth_path, const std::string& test_path,
                const std::string& noisy_path, const std::string& rois_path,
                double peak, const std::string& outdir) {
    const auto t0 = std::chrono::steady_clock::now();
    const Raster truth = load_raster(truth_path);
    const Raster test = load_raster(test_path);

    const double psnr_db = psnr(truth, test, peak);
    const double ssim = mssim(truth, test);
    const double beta = beta_edges(truth, test);

    fs::create_directories(outdir);
    const fs::path dir(outdir);
    json j{{"psnr_db", std::isfinite(psnr_db) ? json(psnr_db) : json()},
           {"mssim", ssim},
           {"beta", beta}};
    write_json(dir / "metrics.json", j);
    char csv[160];
    std::snprintf(csv, sizeof(csv), "psnr_db,mssim,beta\n%.6g,%.6g,%.6g\n", psnr_db,
                  ssim, beta);
    write_text(dir / "metrics.csv", csv);
    std::vector<std::string> outputs = {"metrics.json", "metrics.csv"};

    if (!rois_path.empty()) {
        if (noisy_path.empty())
            throw ValidationError("--rois requires --noisy for the three-way table");
        const Raster noisy = load_raster(noisy_path);
        std::vector<std::pair<std::string, Roi>> rois;
        for (const auto& r : load_json_file(rois_path))
            rois.emplace_back(r.at("label").get<std::string>(),
                              Roi{r.at("x0"), r.at("y0"), r.at("w"), r.at("h")});
        const auto rows = roi_table(truth, noisy, test, rois);
        write_text(dir / "roi_table.csv", roi_table_csv(rows));
        write_json(dir / "roi_table.json", roi_table_json(rows));
        outputs.push_back("roi_table.csv");
        outputs.push_back("roi_table.json");
    }

    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "manifest.json", "metrics",
                   json{{"truth", truth_path}, {"test", test_path},
                        {"noisy", noisy_path}, {"rois", rois_path}},
                   outputs, 0, dt);
    std::printf("psnr = %.6g dB, mssim = %.6g, beta = %.6g\n", psnr_db, ssim, beta);
    return 0;
}

int cmd_tune(const std::string& input, const std::string& grid_path, double looks,
             const EvalConfig& cfg, const std::string& outdir, bool timings) {
    const auto t0 = std::chrono::steady_clock::now();
    const Raster z = load_raster(input);
    const ParamGrid grid = ParamGrid::from_json(load_json_file(grid_path));
    const TuneTrace trace = grid_search(z, grid, looks, cfg);

    fs::create_directories(outdir);
    const fs::path dir(outdir);
    write_json(dir / "trace.json", trace.to_json(timings));
    write_text(dir / "trace.csv", trace.to_csv(timings));
    write_json(dir / "best.json", grid.spec_at(trace.best_index).to_json());

    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "manifest.json", "tune",
                   json{{"input", input}, {"grid", grid.to_json()}},
                   {"trace.json", "trace.csv", "best.json"}, cfg.seed, dt);
    std::printf("best: %s with M = %.6g\n",
                grid.spec_at(trace.best_index).label().c_str(),
                trace.best().report->m);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) g_argv.emplace_back(argv[i]);

    CLI::App app{"sarqa: unassisted quality assessment of despeckling filters"};
    app.set_version_flag("--version", std::string("sarqa ") + SARQA_VERSION);
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

    // simulate -------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "generate a phantom and speckle it");
    std::string phantom = "blocks", scene_path, sim_out = "out";
    std::string model = "multiplicative", widths_csv;
    SceneDesc scene;
    sim->add_option("--phantom", phantom, "blocks|strips|step|textured_step|sine");
    sim->add_option("--scene", scene_path, "JSON scene descriptor (overrides flags)");
    sim->add_option("--side", scene.side, "phantom side in pixels");
    sim->add_option("--rows", scene.rows, "override height (1 = single-row profile)");
    sim->add_option("--looks", scene.looks, "number of looks L");
    sim->add_option("--seed", scene.seed, "generator seed");
    sim->add_option("--model", model, "multiplicative|additive");
    sim->add_option("--sigma", scene.sigma, "noise std for the additive model");
    sim->add_option("--low", scene.low, "strips background level");
    sim->add_option("--high", scene.high, "strips strip level");
    sim->add_option("--widths", widths_csv, "strip widths, comma separated");
    sim->add_option("--left", scene.left, "step left level");
    sim->add_option("--right", scene.right, "step right level");
    sim->add_option("--mean", scene.mean, "sine mean");
    sim->add_option("--amplitude", scene.amplitude, "sine amplitude");
    sim->add_option("--period", scene.period, "sine period in pixels");
    sim->add_option("-o,--out", sim_out, "output directory")->required();

    // filter ---------------------------------------------------------------
    auto* flt = app.add_subcommand("filter", "apply a despeckling filter");
    std::string flt_in, flt_out, family = "boxcar", spec_path, ext_path;
    FilterSpec fspec;
    flt->add_option("-i,--input", flt_in, "input raster (.ras1)")->required();
    flt->add_option("-o,--out", flt_out, "output raster (.ras1)")->required();
    flt->add_option("--family", family, "identity|boxcar|elee|srad|external");
    flt->add_option("--spec", spec_path, "FilterSpec JSON (overrides flags)");
    auto* flt_w =
        flt->add_option("--w", fspec.window, "window side (boxcar 5, elee 9)");
    flt->add_option("--looks", fspec.looks, "looks L (elee)");
    flt->add_option("--k", fspec.damping, "damping (elee)");
    flt->add_option("--T", fspec.iterations, "iterations (srad)");
    flt->add_option("--dt", fspec.timestep, "timestep (srad)");
    flt->add_option("--q0-window", fspec.q0_window, "q0 estimation window (srad)");
    flt->add_option("--path", ext_path, "precomputed result (external)");

    // evaluate ---------------------------------------------------------------
    auto* ev = app.add_subcommand("evaluate", "score a filtered result with M");
    std::string ev_noisy, ev_filtered, ev_out = "out", ev_mode = "noisy", ev_label;
    bool ev_additive = false, ev_png = false;
    double ev_looks = 0.0, ev_sigma = 0.0;
    EvalConfig ecfg;
    ev->add_option("--noisy", ev_noisy, "observed raster")->required();
    ev->add_option("--filtered", ev_filtered, "filtered raster")->required();
    ev->add_option("--looks", ev_looks, "nominal number of looks");
    ev->add_flag("--additive", ev_additive, "use the additive residual model");
    ev->add_option("--sigma", ev_sigma, "noise std (additive model)");
    ev->add_option("--mode", ev_mode, "selection mode: noisy|paper");
    ev->add_option("--seed", ecfg.seed, "seed of the shuffling replicates");
    ev->add_option("--w", ecfg.window, "selection window side");
    ev->add_option("--tol", ecfg.tol, "selection tolerance");
    ev->add_option("--tol-detect", ecfg.tol_detect, "noisy-mode detection tolerance");
    ev->add_option("--p", ecfg.shuffles, "number of shuffled replicates");
    ev->add_option("--win", ecfg.glcm_window, "co-occurrence tile side");
    ev->add_option("--label", ev_label, "row label for the CSV output");
    ev->add_flag("--export-png", ev_png, "export ratio and window-overlay PNGs");
    ev->add_option("-o,--out", ev_out, "output directory")->required();

    // metrics ----------------------------------------------------------------
    auto* met = app.add_subcommand("metrics", "reference-based metrics (PSNR/MSSIM/beta)");
    std::string met_truth, met_test, met_noisy, met_rois, met_out = "out";
    double met_peak = 0.0;
    met->add_option("--truth", met_truth, "ground reference raster")->required();
    met->add_option("--test", met_test, "raster under test")->required();
    met->add_option("--noisy", met_noisy, "observed raster (for the ROI table)");
    met->add_option("--rois", met_rois, "labeled ROI list JSON");
    met->add_option("--peak", met_peak, "PSNR peak (default max of truth)");
    met->add_option("-o,--out", met_out, "output directory")->required();

    // tune ---------------------------------------------------------------
    auto* tn = app.add_subcommand("tune", "exhaustive grid search minimizing M");
    std::string tn_in, tn_grid, tn_out = "out", tn_mode = "noisy";
    double tn_looks = 0.0;
    bool tn_timings = false;
    EvalConfig tcfg;
    tn->add_option("-i,--input", tn_in, "observed raster")->required();
    tn->add_option("--grid", tn_grid, "parameter grid JSON")->required();
    tn->add_option("--looks", tn_looks, "nominal number of looks")->required();
    tn->add_option("--seed", tcfg.seed, "evaluation seed shared by all points");
    tn->add_option("--mode", tn_mode, "selection mode: noisy|paper");
    tn->add_option("--p", tcfg.shuffles, "number of shuffled replicates");
    tn->add_flag("--timings", tn_timings, "include wall times in trace outputs");
    tn->add_option("-o,--out", tn_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    set_max_threads(threads);

    try {
        if (sim->parsed()) {
            if (!scene_path.empty()) {
                scene = SceneDesc::from_json(load_json_file(scene_path));
            } else {
                scene.kind = phantom_kind_from_string(phantom);
                scene.model = model;
                if (!widths_csv.empty()) scene.widths = parse_int_list(widths_csv);
            }
            if (!(scene.looks > 0.0))
                throw ValidationError("--looks must be > 0");
            return cmd_simulate(scene, sim_out);
        }
        if (flt->parsed()) {
            if (!spec_path.empty()) {
                fspec = FilterSpec::from_json(load_json_file(spec_path));
            } else {
                fspec.family = filter_family_from_string(family);
                if (fspec.family == FilterFamily::elee && flt_w->count() == 0)
                    fspec.window = 9;
                fspec.path = ext_path;
                fspec.validate();
            }
            return cmd_filter(flt_in, flt_out, fspec);
        }
        if (ev->parsed()) {
            ecfg.mode = selection_mode_from_string(ev_mode);
            if (ev_additive) {
                if (!(ev_sigma > 0.0))
                    throw CLI::RequiredError("--sigma (additive model)");
            } else if (!(ev_looks > 0.0)) {
                throw CLI::RequiredError("--looks");
            }
            if (ev_label.empty())
                ev_label = fs::path(ev_filtered).stem().string();
            return cmd_evaluate(ev_noisy, ev_filtered, ev_additive, ev_looks, ev_sigma,
                                ecfg, ev_out, ev_label, ev_png);
        }
        if (met->parsed())
            return cmd_metrics(met_truth, met_test, met_noisy, met_rois, met_peak,
                               met_out);
        if (tn->parsed()) {
            tcfg.mode = selection_mode_from_string(tn_mode);
            return cmd_tune(tn_in, tn_grid, tn_looks, tcfg, tn_out, tn_timings);
        }
    } catch (const CLI::RequiredError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const NoTexturelessArea& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
