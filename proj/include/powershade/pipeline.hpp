#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "powershade/gaze.hpp"
#include "powershade/image_io.hpp"
#include "powershade/optimizer.hpp"

namespace powershade {

/// Per-image processing outcome. `savings` fractions are of total predicted
/// power (static share included); the dynamic-only figure is reported
/// separately and is not part of the fixed CSV columns.
struct ReportRow {
    std::string file;
    double gaze_x = 0.0;
    double gaze_y = 0.0;
    double p_orig_w = 0.0;
    double p_mod_w = 0.0;
    double savings = 0.0;
    double pct_modulated = 0.0;  // percent of pixels shifted
    double pct_clamped = 0.0;    // percent of pixels whose shift hit the gamut
    double savings_dynamic = 0.0;
};

inline constexpr int kSavingsHistogramBins = 20;  // [0,1) in 0.05 steps

struct RunReport {
    std::vector<ReportRow> rows;
    double mean_savings = 0.0;
    double max_savings = 0.0;
    double p5 = 0.0, p50 = 0.0, p95 = 0.0;
    std::array<int, kSavingsHistogramBins> histogram{};
    int images_processed = 0;
    int images_skipped = 0;  // undecodable files in batch mode
};

/// Applies the per-pixel modulation over the eccentricity map and re-encodes
/// to 8 bits. Skipped pixels keep their exact input bytes. Deterministic for
/// any thread count.
std::pair<Image8, ReportRow> optimize_image(const Image8& img, const GazeConfig& gaze,
                                            const Modulator& mod, int threads = 1);

/// Luminance-scaling comparison condition: linear-space channel scaling on
/// pixels with eccentricity > 10 degrees. scale must be in (0, 1].
Image8 lum_baseline(const Image8& img, const GazeConfig& gaze, double scale);

/// Bisection on the scale until the baseline image's predicted power is
/// within 0.1% of target_watts. Throws DomainError when the target is below
/// what full peripheral black-out can reach.
double match_lum_scale(const Image8& img, const GazeConfig& gaze, const PowerModel& power,
                       double target_watts);

/// Decoded linear pixels of an image, row-major (for power prediction).
std::vector<LinearRgb> decode_image(const Image8& img);

struct BatchOptions {
    double fov_h_deg = 90.0;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string save_dir;  // when set, modulated images are written here
};

/// Runs optimize_image over every *.png under image_dir (sorted order) with
/// a seeded random gaze per image. Undecodable files are skipped with a
/// warning on stderr.
RunReport batch_analyze(const std::string& image_dir, const Modulator& mod,
                        const BatchOptions& opts);

/// Fixed CSV columns: file,gaze_x,gaze_y,p_orig_w,p_mod_w,savings,
/// pct_modulated,pct_clamped
void write_report_csv(std::ostream& out, const RunReport& report);
void write_report_summary(std::ostream& out, const RunReport& report);

}  // namespace powershade
