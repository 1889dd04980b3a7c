// Command-line front end for the gaze-contingent display power optimizer.
//
// Exit codes: 0 success, 1 usage error, 2 data/model error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "powershade/detail/csv.hpp"
#include "powershade/error.hpp"
#include "powershade/gaze.hpp"
#include "powershade/image_io.hpp"
#include "powershade/optimizer.hpp"
#include "powershade/perceptual.hpp"
#include "powershade/pipeline.hpp"
#include "powershade/power.hpp"
#include "powershade/rbfnn.hpp"
#include "powershade/rng.hpp"
#include "powershade/staircase.hpp"

namespace {

using namespace powershade;

struct GlobalOpts {
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    double fov_deg = 90.0;
    std::string gaze;  // "x,y" or empty for seeded random
    std::string threshold_model_path = "bundled/threshold_model.json";
    std::string power_model_path = "bundled/power_model.json";
};

int resolved_threads(const GlobalOpts& g) {
    if (g.threads > 0) return g.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::array<double, 3> parse_triple(const std::string& text) {
    std::array<double, 3> v{};
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &v[0], &v[1], &v[2], &extra) != 3) {
        throw DomainError("expected three comma-separated numbers, got '" + text + "'");
    }
    return v;
}

std::pair<double, double> parse_pair(const std::string& text) {
    double x = 0.0, y = 0.0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf%c", &x, &y, &extra) != 2) {
        throw DomainError("expected 'x,y', got '" + text + "'");
    }
    return {x, y};
}

GazeConfig gaze_for_image(const GlobalOpts& g, const Image8& img) {
    GazeConfig cfg;
    cfg.width = img.width;
    cfg.height = img.height;
    cfg.fov_h_deg = g.fov_deg;
    if (g.gaze.empty()) {
        return random_gaze(cfg, g.seed);
    }
    const auto [x, y] = parse_pair(g.gaze);
    cfg.gaze_x = x;
    cfg.gaze_y = y;
    validate(cfg);
    return cfg;
}

void print_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    std::cout << buf;
}

int cmd_colors(const std::string& from, const std::string& to, const std::string& value) {
    const auto v = parse_triple(value);
    // Normalize through linear sRGB.
    LinearRgb lin;
    if (from == "encoded") {
        if (v[0] < 0 || v[0] > 255 || v[1] < 0 || v[1] > 255 || v[2] < 0 || v[2] > 255) {
            throw DomainError("encoded channels must be in [0,255]");
        }
        lin = srgb_decode({static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]),
                           static_cast<std::uint8_t>(v[2])});
    } else if (from == "linear") {
        lin = {v[0], v[1], v[2]};
    } else if (from == "lms") {
        lin = lms_to_linear({v[0], v[1], v[2]});
    } else if (from == "idkl") {
        lin = idkl_to_linear({v[0], v[1], v[2]});
    } else {
        throw DomainError("unknown color space '" + from + "'");
    }

    std::array<double, 3> out{};
    if (to == "encoded") {
        const EncodedRgb e = srgb_encode(lin);
        std::printf("%d,%d,%d\n", e.r, e.g, e.b);
        return 0;
    } else if (to == "linear") {
        out = {lin.r, lin.g, lin.b};
    } else if (to == "lms") {
        const Lms l = linear_to_lms(lin);
        out = {l.l, l.m, l.s};
    } else if (to == "idkl") {
        const Idkl d = linear_to_idkl(lin);
        out = {d.lm, d.s, d.lum};
    } else {
        throw DomainError("unknown color space '" + to + "'");
    }
    std::printf("%.17g,%.17g,%.17g\n", out[0], out[1], out[2]);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perceptually constrained display power optimizer"};
    app.require_subcommand(1);
    app.fallthrough(true);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Seed for all randomized choices");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
    app.add_option("--fov-deg", g.fov_deg, "Horizontal field of view in degrees");
    app.add_option("--gaze", g.gaze, "Gaze point 'x,y' in pixels (default: seeded random)");
    app.add_option("--threshold-model", g.threshold_model_path, "Threshold model JSON");
    app.add_option("--power-model", g.power_model_path, "Power model JSON");

    // colors
    std::string from = "linear", to = "idkl", value;
    auto* colors = app.add_subcommand("colors", "Convert a color between spaces");
    colors->add_option("--from", from, "encoded|linear|lms|idkl")->required();
    colors->add_option("--to", to, "encoded|linear|lms|idkl")->required();
    colors->add_option("value", value, "Comma-separated channel values")->required();

    // fit-thresholds
    std::string records_path, samples_path, model_out, emit_samples;
    int nodes = 5, restarts = 32, iters = 2000;
    auto* fitth = app.add_subcommand("fit-thresholds", "Fit the threshold predictor");
    fitth->add_option("--records", records_path, "Raw staircase records CSV");
    fitth->add_option("--preprocessed", samples_path, "Already-reduced samples CSV");
    fitth->add_option("--out", model_out, "Output model JSON")->required();
    fitth->add_option("--emit-samples", emit_samples, "Also write the reduced samples CSV");
    fitth->add_option("--nodes", nodes, "RBF node count");
    fitth->add_option("--restarts", restarts, "Training restarts");
    fitth->add_option("--iters", iters, "Max gradient steps per restart");

    // eval-threshold
    std::string model_path;
    double q_klm = 0.0, q_ks = 0.0, q_ecc = 20.0;
    auto* evalth = app.add_subcommand("eval-threshold", "Query the threshold predictor");
    evalth->add_option("--model", model_path, "Model JSON (default: bundled)");
    evalth->add_option("--k-lm", q_klm, "Reference L-M contrast")->required();
    evalth->add_option("--k-s", q_ks, "Reference S contrast")->required();
    evalth->add_option("--ecc", q_ecc, "Eccentricity in degrees")->required();

    // simulate-study
    std::string study_out;
    std::uint64_t noise_seed = 7;
    auto* sim = app.add_subcommand("simulate-study", "Synthetic staircase study -> raw CSV");
    sim->add_option("--out", study_out, "Output raw records CSV")->required();
    sim->add_option("--noise-seed", noise_seed, "Observer threshold jitter seed");

    // fit-power
    std::string power_samples, trace_path, segments_path, power_out;
    auto* fitp = app.add_subcommand("fit-power", "Fit the display power model");
    fitp->add_option("--samples", power_samples, "Samples CSV: r,g,b,watts");
    fitp->add_option("--trace", trace_path, "Power trace CSV: t_seconds,watts");
    fitp->add_option("--segments", segments_path, "Segments CSV: r,g,b,start_s,end_s");
    fitp->add_option("--out", power_out, "Output model JSON")->required();

    // predict-power
    std::string pp_image;
    auto* predp = app.add_subcommand("predict-power", "Predict image power in watts");
    predp->add_option("--image", pp_image, "8-bit sRGB PNG")->required();

    // optimize
    std::string in_path, out_path, report_path;
    auto* opt = app.add_subcommand("optimize", "Power-optimize a single image");
    opt->add_option("--in", in_path, "Input PNG")->required();
    opt->add_option("--out", out_path, "Output PNG")->required();
    opt->add_option("--report", report_path, "Write the one-row report CSV here");

    // lum-baseline
    std::string lb_in, lb_out, lb_match_image;
    double lb_scale = 0.0, lb_match_watts = 0.0;
    auto* lum = app.add_subcommand("lum-baseline", "Peripheral luminance-scaling baseline");
    lum->add_option("--in", lb_in, "Input PNG")->required();
    lum->add_option("--out", lb_out, "Output PNG")->required();
    lum->add_option("--scale", lb_scale, "Fixed scale in (0,1]");
    lum->add_option("--match-watts", lb_match_watts, "Bisect scale to hit this power");
    lum->add_option("--match-image", lb_match_image, "Bisect scale to match this image's power");

    // batch
    std::string batch_dir, batch_csv, batch_save;
    auto* batch = app.add_subcommand("batch", "Analyze a directory of PNGs");
    batch->add_option("--dir", batch_dir, "Directory of PNG images")->required();
    batch->add_option("--out", batch_csv, "Report CSV path")->required();
    batch->add_option("--save-dir", batch_save, "Also write modulated images here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*colors) return cmd_colors(from, to, value);

        if (*fitth) {
            std::vector<ThresholdSample> data;
            if (!samples_path.empty()) {
                data = read_samples_file(samples_path);
            } else if (!records_path.empty()) {
                data = preprocess_thresholds(read_raw_records_file(records_path));
            } else {
                throw DomainError("fit-thresholds: need --records or --preprocessed");
            }
            if (!emit_samples.empty()) {
                std::ofstream out(emit_samples);
                if (!out) throw Error("cannot write " + emit_samples);
                write_samples_csv(out, data);
            }
            TrainConfig cfg;
            cfg.nodes = nodes;
            cfg.restarts = restarts;
            cfg.max_iters = iters;
            cfg.seed = g.seed;
            TrainReport rep;
            const RbfnnModel m = train_rbfnn(data, cfg, &rep);
            save_threshold_model(m, model_out);
            std::printf("samples: %zu\nsse: %.6g\nr_squared: %.4f\nadjusted_r_squared: %.4f\n",
                        data.size(), rep.sse, rep.r_squared, rep.adjusted_r_squared);
            return 0;
        }

        if (*evalth) {
            const RbfnnModel m = load_threshold_model(
                model_path.empty() ? g.threshold_model_path : model_path);
            const auto ecc = clamp_eccentricity(q_ecc);
            if (!ecc) {
                std::printf("no-modulation (eccentricity below %g deg)\n",
                            kEccentricityFloorDeg);
                return 0;
            }
            const auto alpha = rbfnn_eval(m, q_klm, q_ks, *ecc);
            std::printf("alpha_lm,alpha_s\n%.9g,%.9g\n", alpha[0], alpha[1]);
            return 0;
        }

        if (*sim) {
            const BundledStudy study = bundled_study(noise_seed);
            const auto records = generate_study(study.observers, study.design, g.seed);
            std::ofstream out(study_out);
            if (!out) throw Error("cannot write " + study_out);
            write_raw_records_csv(out, records);
            std::printf("wrote %zu records to %s\n", records.size(), study_out.c_str());
            return 0;
        }

        if (*fitp) {
            std::vector<PowerSample> samples;
            if (!power_samples.empty()) {
                std::ifstream in(power_samples);
                if (!in) throw ParseError("cannot open " + power_samples);
                std::string line;
                int line_no = 0;
                if (!detail::next_row(in, line, line_no) ||
                    detail::trim(line) != "r,g,b,watts") {
                    throw ParseError("samples line 1: expected header 'r,g,b,watts'");
                }
                while (detail::next_row(in, line, line_no)) {
                    const auto f = detail::split_fields(line);
                    if (f.size() != 4) {
                        throw ParseError("samples line " + std::to_string(line_no) +
                                         ": expected 4 fields");
                    }
                    PowerSample s;
                    s.color.r = detail::parse_double(f[0], line_no, "r");
                    s.color.g = detail::parse_double(f[1], line_no, "g");
                    s.color.b = detail::parse_double(f[2], line_no, "b");
                    s.watts = detail::parse_double(f[3], line_no, "watts");
                    samples.push_back(s);
                }
            } else if (!trace_path.empty() && !segments_path.empty()) {
                samples = trace_to_samples(parse_power_trace_files(trace_path, segments_path));
            } else {
                throw DomainError("fit-power: need --samples or --trace with --segments");
            }
            PowerFitReport rep;
            const PowerModel m = fit_power_model(samples, &rep);
            save_power_model(m, power_out);
            std::printf("samples: %d\nmean_relative_error: %.6g\nmax_relative_error: %.6g\n"
                        "p_srgb: %.9g,%.9g,%.9g\np_circ: %.9g\n",
                        rep.sample_count, rep.mean_relative_error, rep.max_relative_error,
                        m.p_srgb[0], m.p_srgb[1], m.p_srgb[2], m.p_circ);
            return 0;
        }

        if (*predp) {
            const PowerModel m = load_power_model(g.power_model_path);
            const Image8 img = read_png(pp_image);
            print_value(image_power(m, decode_image(img)));
            std::cout << "\n";
            return 0;
        }

        if (*opt) {
            const RbfnnModel tm = load_threshold_model(g.threshold_model_path);
            const PowerModel pm = load_power_model(g.power_model_path);
            const Modulator mod(tm, pm);
            const Image8 img = read_png(in_path);
            const GazeConfig cfg = gaze_for_image(g, img);
            auto [out_img, row] = optimize_image(img, cfg, mod, resolved_threads(g));
            row.file = in_path;
            write_png(out_img, out_path);
            RunReport rep;
            rep.rows.push_back(row);
            write_report_csv(std::cout, rep);
            std::printf("savings_dynamic: %.6g\n", row.savings_dynamic);
            if (!report_path.empty()) {
                std::ofstream rout(report_path);
                if (!rout) throw Error("cannot write " + report_path);
                write_report_csv(rout, rep);
            }
            return 0;
        }

        if (*lum) {
            const Image8 img = read_png(lb_in);
            const GazeConfig cfg = gaze_for_image(g, img);
            double scale = lb_scale;
            if (scale <= 0.0) {
                const PowerModel pm = load_power_model(g.power_model_path);
                double target = lb_match_watts;
                if (!lb_match_image.empty()) {
                    target = image_power(pm, decode_image(read_png(lb_match_image)));
                }
                if (target <= 0.0) {
                    throw DomainError(
                        "lum-baseline: need --scale, --match-watts, or --match-image");
                }
                scale = match_lum_scale(img, cfg, pm, target);
            }
            write_png(lum_baseline(img, cfg, scale), lb_out);
            std::printf("scale: %.9g\n", scale);
            return 0;
        }

        if (*batch) {
            const RbfnnModel tm = load_threshold_model(g.threshold_model_path);
            const PowerModel pm = load_power_model(g.power_model_path);
            const Modulator mod(tm, pm);
            BatchOptions opts;
            opts.fov_h_deg = g.fov_deg;
            opts.seed = g.seed;
            opts.threads = resolved_threads(g);
            opts.save_dir = batch_save;
            const RunReport rep = batch_analyze(batch_dir, mod, opts);
            std::ofstream out(batch_csv);
            if (!out) throw Error("cannot write " + batch_csv);
            write_report_csv(out, rep);
            write_report_summary(std::cout, rep);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
