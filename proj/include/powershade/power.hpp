#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "powershade/colorspace.hpp"

namespace powershade {

/// Affine display power model: watts = p_srgb . x + p_circ, with x the
/// pixel color in linear sRGB. p_circ is the static (circuitry) share.
struct PowerModel {
    std::array<double, 3> p_srgb{0.0, 0.0, 0.0};
    double p_circ = 0.0;
};

struct PowerSample {
    LinearRgb color;
    double watts = 0.0;
};

struct TraceSegment {
    LinearRgb color;
    double start_s = 0.0;
    double end_s = 0.0;
};

/// Timestamped power readings plus the solid-color display schedule.
struct PowerTrace {
    std::vector<double> t_seconds;
    std::vector<double> watts;
    std::vector<TraceSegment> segments;
};

struct PowerFitReport {
    double mean_relative_error = 0.0;
    double max_relative_error = 0.0;
    int sample_count = 0;
};

/// Reads `t_seconds,watts` rows (header required) and a sidecar segments
/// stream `r,g,b,start_s,end_s`. Throws ParseError with a line number on
/// malformed rows or non-increasing timestamps.
PowerTrace parse_power_trace(std::istream& trace_csv, std::istream& segments_csv);
PowerTrace parse_power_trace_files(const std::string& trace_path,
                                   const std::string& segments_path);

/// Arithmetic mean power per segment (readings with start <= t <= end).
/// Throws DomainError if a segment contains no readings.
std::vector<PowerSample> trace_to_samples(const PowerTrace& trace);

/// The 8 sRGB cube vertices followed by n-8 uniform random in-gamut colors,
/// deterministic per seed. Requires n >= 8.
std::vector<LinearRgb> sample_palette(int n, std::uint64_t seed);

/// Linear least squares on the design [x | 1]. Requires >= 5 samples and a
/// full-rank design; throws FitError otherwise.
PowerModel fit_power_model(const std::vector<PowerSample>& samples,
                           PowerFitReport* report = nullptr);

double predict_power(const PowerModel& m, const LinearRgb& c);

/// Power of the model's "dynamic" term only (excludes p_circ).
double dynamic_power(const PowerModel& m, const LinearRgb& c);

/// Mean-pixel power: exact under the affine model. Throws DomainError on an
/// empty image. Pixels are linear sRGB triples, row-major.
double image_power(const PowerModel& m, const std::vector<LinearRgb>& pixels);

/// The power gradient pulled back to i-DKL: q^T = p_srgb^T M_idkl2srgb, so
/// watts = q . x_idkl + p_circ for any color.
std::array<double, 3> power_gradient_idkl(const PowerModel& m);

PowerModel load_power_model(const std::string& path);
void save_power_model(const PowerModel& m, const std::string& path);
std::string power_model_to_json(const PowerModel& m);
PowerModel power_model_from_json(const std::string& json_text);

}  // namespace powershade
