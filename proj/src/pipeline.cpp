#include "powershade/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <ostream>
#include <thread>

#include "powershade/error.hpp"
#include "powershade/rng.hpp"

namespace powershade {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct RowStats {
    std::array<double, 3> sum_in{0.0, 0.0, 0.0};
    std::array<double, 3> sum_out{0.0, 0.0, 0.0};
    std::int64_t modulated = 0;
    std::int64_t clamped = 0;
};

void run_rows(int height, int threads, const std::function<void(int)>& row_fn) {
    threads = std::max(1, threads);
    if (threads == 1 || height < 2) {
        for (int y = 0; y < height; ++y) row_fn(y);
        return;
    }
    threads = std::min(threads, height);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const int y0 = static_cast<int>(static_cast<std::int64_t>(height) * t / threads);
        const int y1 = static_cast<int>(static_cast<std::int64_t>(height) * (t + 1) / threads);
        pool.emplace_back([y0, y1, &row_fn] {
            for (int y = y0; y < y1; ++y) row_fn(y);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::pair<Image8, ReportRow> optimize_image(const Image8& img, const GazeConfig& gaze,
                                            const Modulator& mod, int threads) {
    if (img.width != gaze.width || img.height != gaze.height) {
        throw DomainError("optimize_image: gaze config does not match image size");
    }
    validate(gaze);
    if (img.rgb.size() != img.pixel_count() * 3) {
        throw DomainError("optimize_image: malformed image buffer");
    }

    Image8 out;
    out.width = img.width;
    out.height = img.height;
    out.rgb.resize(img.rgb.size());

    // Per-row accumulation slots keep the reduction order fixed regardless
    // of the thread count.
    std::vector<RowStats> stats(img.height);

    const double f = (gaze.width / 2.0) / std::tan(gaze.fov_h_deg * kPi / 360.0);
    const double cx = gaze.width / 2.0, cy = gaze.height / 2.0;
    const double bx = gaze.gaze_x - cx, by = gaze.gaze_y - cy;
    const double nb = std::sqrt(bx * bx + by * by + f * f);
    // Pixels whose view ray is this close to the gaze ray are inside the
    // no-modulation zone; the acos is skipped for them.
    const double cos_floor = std::cos(kEccentricityFloorDeg * kPi / 180.0);
    const double cos_ceiling = std::cos(kEccentricityCeilingDeg * kPi / 180.0);

    const auto process_row = [&](int y) {
        RowStats& rs = stats[y];
        const double ay = y - cy;
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* src = img.pixel(x, y);
            std::uint8_t* dst = out.pixel(x, y);
            const LinearRgb in = srgb_decode({src[0], src[1], src[2]});
            rs.sum_in[0] += in.r;
            rs.sum_in[1] += in.g;
            rs.sum_in[2] += in.b;

            const double ax = x - cx;
            const double dot = ax * bx + ay * by + f * f;
            const double na = std::sqrt(ax * ax + ay * ay + f * f);
            const double cosang = std::clamp(dot / (na * nb), -1.0, 1.0);

            if (cosang > cos_floor) {  // eccentricity below the gate
                dst[0] = src[0];
                dst[1] = src[1];
                dst[2] = src[2];
                rs.sum_out[0] += in.r;
                rs.sum_out[1] += in.g;
                rs.sum_out[2] += in.b;
                continue;
            }
            const double ecc = cosang <= cos_ceiling ? kEccentricityCeilingDeg
                                                     : std::acos(cosang) * 180.0 / kPi;

            const ModulationResult res = mod(in, ecc);
            if (res.skipped) {
                dst[0] = src[0];
                dst[1] = src[1];
                dst[2] = src[2];
                rs.sum_out[0] += in.r;
                rs.sum_out[1] += in.g;
                rs.sum_out[2] += in.b;
                continue;
            }
            const LinearRgb lin_out = idkl_to_linear(res.output);
            const EncodedRgb code = srgb_encode(lin_out);
            dst[0] = code.r;
            dst[1] = code.g;
            dst[2] = code.b;
            rs.sum_out[0] += lin_out.r;
            rs.sum_out[1] += lin_out.g;
            rs.sum_out[2] += lin_out.b;
            rs.modulated += 1;
            if (res.clamped) rs.clamped += 1;
        }
    };
    run_rows(img.height, threads, process_row);

    std::array<double, 3> sum_in{0.0, 0.0, 0.0}, sum_out{0.0, 0.0, 0.0};
    std::int64_t modulated = 0, clamped = 0;
    for (const auto& rs : stats) {
        for (int c = 0; c < 3; ++c) {
            sum_in[c] += rs.sum_in[c];
            sum_out[c] += rs.sum_out[c];
        }
        modulated += rs.modulated;
        clamped += rs.clamped;
    }
    const double n = static_cast<double>(img.pixel_count());
    const LinearRgb mean_in{sum_in[0] / n, sum_in[1] / n, sum_in[2] / n};
    const LinearRgb mean_out{sum_out[0] / n, sum_out[1] / n, sum_out[2] / n};
    const PowerModel& pm = mod.power_model();

    ReportRow row;
    row.gaze_x = gaze.gaze_x;
    row.gaze_y = gaze.gaze_y;
    row.p_orig_w = predict_power(pm, mean_in);
    row.p_mod_w = predict_power(pm, mean_out);
    row.savings = row.p_orig_w > 0.0
                      ? std::max(0.0, (row.p_orig_w - row.p_mod_w) / row.p_orig_w)
                      : 0.0;
    const double dyn_orig = dynamic_power(pm, mean_in);
    row.savings_dynamic =
        dyn_orig > 0.0 ? std::max(0.0, (dyn_orig - dynamic_power(pm, mean_out)) / dyn_orig) : 0.0;
    row.pct_modulated = 100.0 * static_cast<double>(modulated) / n;
    row.pct_clamped = 100.0 * static_cast<double>(clamped) / n;
    return {std::move(out), row};
}

Image8 lum_baseline(const Image8& img, const GazeConfig& gaze, double scale) {
    if (!(scale > 0.0) || scale > 1.0) {
        throw DomainError("lum_baseline: scale must be in (0, 1]");
    }
    if (img.width != gaze.width || img.height != gaze.height) {
        throw DomainError("lum_baseline: gaze config does not match image size");
    }
    validate(gaze);

    Image8 out;
    out.width = img.width;
    out.height = img.height;
    out.rgb.resize(img.rgb.size());
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* src = img.pixel(x, y);
            std::uint8_t* dst = out.pixel(x, y);
            const double ecc = eccentricity_deg(gaze, x, y);
            if (ecc > kEccentricityFloorDeg && scale < 1.0) {
                const LinearRgb in = srgb_decode({src[0], src[1], src[2]});
                const EncodedRgb code =
                    srgb_encode({in.r * scale, in.g * scale, in.b * scale});
                dst[0] = code.r;
                dst[1] = code.g;
                dst[2] = code.b;
            } else {
                dst[0] = src[0];
                dst[1] = src[1];
                dst[2] = src[2];
            }
        }
    }
    return out;
}

std::vector<LinearRgb> decode_image(const Image8& img) {
    std::vector<LinearRgb> out;
    out.reserve(img.pixel_count());
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        const std::uint8_t* p = img.rgb.data() + 3 * i;
        out.push_back(srgb_decode({p[0], p[1], p[2]}));
    }
    return out;
}

double match_lum_scale(const Image8& img, const GazeConfig& gaze, const PowerModel& power,
                       double target_watts) {
    constexpr double kRelTol = 1e-3;  // within 0.1% of the target
    const auto power_at = [&](double scale) {
        return image_power(power, decode_image(lum_baseline(img, gaze, scale)));
    };
    const double p_full = power_at(1.0);
    if (std::abs(p_full - target_watts) <= kRelTol * target_watts) return 1.0;
    const double p_floor = image_power(power, [&] {
        // scale -> 0+ limit: peripheral pixels go black
        std::vector<LinearRgb> px = decode_image(img);
        size_t i = 0;
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x, ++i) {
                if (eccentricity_deg(gaze, x, y) > kEccentricityFloorDeg) {
                    px[i] = {0.0, 0.0, 0.0};
                }
            }
        }
        return px;
    }());
    if (target_watts < p_floor - kRelTol * target_watts) {
        throw DomainError("match_lum_scale: target below the reachable minimum");
    }
    if (target_watts > p_full) {
        throw DomainError("match_lum_scale: target above the unscaled power");
    }

    double lo = 0.0, hi = 1.0;  // power_at is non-decreasing in scale
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double p = power_at(mid);
        if (std::abs(p - target_watts) <= kRelTol * target_watts) return mid;
        if (p > target_watts) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    throw DomainError("match_lum_scale: bisection did not converge to 0.1%");
}

RunReport batch_analyze(const std::string& image_dir, const Modulator& mod,
                        const BatchOptions& opts) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    {
        std::error_code ec;
        fs::directory_iterator it(image_dir, ec);
        if (ec) throw DomainError("batch: cannot read directory " + image_dir);
        for (const auto& entry : fs::directory_iterator(image_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".png") {
                files.push_back(entry.path().string());
            }
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DomainError("batch: no .png files in " + image_dir);

    RunReport report;
    report.rows.reserve(files.size());
    for (size_t i = 0; i < files.size(); ++i) {
        Image8 img;
        try {
            img = read_png(files[i]);
        } catch (const ParseError& e) {
            std::cerr << "warning: skipping " << files[i] << ": " << e.what() << "\n";
            ++report.images_skipped;
            continue;
        }
        GazeConfig cfg;
        cfg.width = img.width;
        cfg.height = img.height;
        cfg.fov_h_deg = opts.fov_h_deg;
        cfg = random_gaze(cfg, derive_seed(opts.seed, 0x626174u /* "bat" */, i));
        auto [out_img, row] = optimize_image(img, cfg, mod, opts.threads);
        row.file = fs::path(files[i]).filename().string();
        if (!opts.save_dir.empty()) {
            fs::create_directories(opts.save_dir);
            write_png(out_img, (fs::path(opts.save_dir) / row.file).string());
        }
        report.rows.push_back(std::move(row));
        ++report.images_processed;
    }
    if (report.rows.empty()) {
        throw DomainError("batch: no decodable images in " + image_dir);
    }

    std::vector<double> savings;
    savings.reserve(report.rows.size());
    for (const auto& r : report.rows) savings.push_back(r.savings);
    report.max_savings = *std::max_element(savings.begin(), savings.end());
    double sum = 0.0;
    for (double s : savings) sum += s;
    report.mean_savings = sum / static_cast<double>(savings.size());

    std::vector<double> sorted = savings;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    report.p5 = quantile(0.05);
    report.p50 = quantile(0.50);
    report.p95 = quantile(0.95);
    for (double s : savings) {
        const int bin = std::clamp(static_cast<int>(s * kSavingsHistogramBins), 0,
                                   kSavingsHistogramBins - 1);
        report.histogram[bin] += 1;
    }
    return report;
}

namespace {
void print_csv_value(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out << buf;
}
}  // namespace

void write_report_csv(std::ostream& out, const RunReport& report) {
    out << "file,gaze_x,gaze_y,p_orig_w,p_mod_w,savings,pct_modulated,pct_clamped\n";
    for (const auto& r : report.rows) {
        out << r.file << ',';
        print_csv_value(out, r.gaze_x);
        out << ',';
        print_csv_value(out, r.gaze_y);
        out << ',';
        print_csv_value(out, r.p_orig_w);
        out << ',';
        print_csv_value(out, r.p_mod_w);
        out << ',';
        print_csv_value(out, r.savings);
        out << ',';
        print_csv_value(out, r.pct_modulated);
        out << ',';
        print_csv_value(out, r.pct_clamped);
        out << '\n';
    }
}

void write_report_summary(std::ostream& out, const RunReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "images: %d processed, %d skipped\n"
                  "savings (total power): mean %.4f  max %.4f  P5 %.4f  P50 %.4f  P95 %.4f\n",
                  report.images_processed, report.images_skipped, report.mean_savings,
                  report.max_savings, report.p5, report.p50, report.p95);
    out << buf;
    double mean_dyn = 0.0;
    for (const auto& r : report.rows) mean_dyn += r.savings_dynamic;
    if (!report.rows.empty()) mean_dyn /= static_cast<double>(report.rows.size());
    std::snprintf(buf, sizeof(buf), "savings (dynamic-only): mean %.4f\n", mean_dyn);
    out << buf;
    out << "histogram of savings, " << kSavingsHistogramBins << " bins over [0,1):\n";
    for (int b = 0; b < kSavingsHistogramBins; ++b) {
        std::snprintf(buf, sizeof(buf), "  [%.2f,%.2f) %d\n",
                      static_cast<double>(b) / kSavingsHistogramBins,
                      static_cast<double>(b + 1) / kSavingsHistogramBins, report.histogram[b]);
        out << buf;
    }
}

}  // namespace powershade
