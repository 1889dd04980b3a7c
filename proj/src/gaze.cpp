#include "powershade/gaze.hpp"

#include <cmath>

#include "powershade/error.hpp"
#include "powershade/rng.hpp"

namespace powershade {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double focal_px(const GazeConfig& cfg) {
    return (cfg.width / 2.0) / std::tan(cfg.fov_h_deg * kPi / 360.0);
}
}  // namespace

void validate(const GazeConfig& cfg) {
    if (cfg.width <= 0 || cfg.height <= 0) {
        throw DomainError("gaze: image dimensions must be positive");
    }
    if (!(cfg.fov_h_deg > 0.0 && cfg.fov_h_deg < 180.0)) {
        throw DomainError("gaze: fov_h_deg must be in (0, 180)");
    }
    if (cfg.gaze_x < 0.0 || cfg.gaze_x > cfg.width - 1 || cfg.gaze_y < 0.0 ||
        cfg.gaze_y > cfg.height - 1) {
        throw DomainError("gaze: gaze point outside the image");
    }
}

double eccentricity_deg(const GazeConfig& cfg, double px, double py) {
    const double f = focal_px(cfg);
    const double cx = cfg.width / 2.0;
    const double cy = cfg.height / 2.0;
    const double ax = px - cx, ay = py - cy;
    const double bx = cfg.gaze_x - cx, by = cfg.gaze_y - cy;
    const double dot = ax * bx + ay * by + f * f;
    const double na = std::sqrt(ax * ax + ay * ay + f * f);
    const double nb = std::sqrt(bx * bx + by * by + f * f);
    double c = dot / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c) * 180.0 / kPi;
}

std::vector<double> eccentricity_map(const GazeConfig& cfg) {
    validate(cfg);
    std::vector<double> out(static_cast<size_t>(cfg.width) * cfg.height);
    const double f = focal_px(cfg);
    const double cx = cfg.width / 2.0;
    const double cy = cfg.height / 2.0;
    const double bx = cfg.gaze_x - cx, by = cfg.gaze_y - cy;
    const double nb = std::sqrt(bx * bx + by * by + f * f);
    for (int j = 0; j < cfg.height; ++j) {
        const double ay = j - cy;
        double* row = out.data() + static_cast<size_t>(j) * cfg.width;
        for (int i = 0; i < cfg.width; ++i) {
            const double ax = i - cx;
            const double dot = ax * bx + ay * by + f * f;
            const double na = std::sqrt(ax * ax + ay * ay + f * f);
            double c = dot / (na * nb);
            if (c > 1.0) c = 1.0;
            if (c < -1.0) c = -1.0;
            row[i] = std::acos(c) * 180.0 / kPi;
        }
    }
    return out;
}

GazeConfig random_gaze(const GazeConfig& cfg_template, std::uint64_t seed) {
    GazeConfig cfg = cfg_template;
    cfg.gaze_x = 0.0;
    cfg.gaze_y = 0.0;
    validate(cfg);
    std::mt19937_64 rng(derive_seed(seed, 0x6761u /* "ga" */));
    cfg.gaze_x = static_cast<double>(uniform_below(rng, static_cast<std::uint64_t>(cfg.width)));
    cfg.gaze_y = static_cast<double>(uniform_below(rng, static_cast<std::uint64_t>(cfg.height)));
    return cfg;
}

}  // namespace powershade
