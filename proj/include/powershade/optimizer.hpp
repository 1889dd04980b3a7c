#pragma once

#include <array>

#include "powershade/colorspace.hpp"
#include "powershade/perceptual.hpp"
#include "powershade/power.hpp"
#include "powershade/rbfnn.hpp"

namespace powershade {

/// Per-pixel modulation outcome.
struct ModulationResult {
    Idkl output;
    bool clamped = false;  // gamut clamp shortened the shift
    bool skipped = false;  // eccentricity gate or degenerate pixel
    double power_delta = 0.0;  // predicted watts, always <= 0
};

/// Power-minimizing point on the discrimination ellipse: luminance is held
/// at t, and the chromatic components move against the power gradient,
///   x_i = t_i - q_i a_i^2 / sqrt(q1^2 a1^2 + q2^2 a2^2),  i in {lm, s}.
/// A zero chromatic gradient has no preference and returns t unchanged.
/// Requires positive axes.
Idkl optimal_on_ellipse(const Idkl& t, const EllipseAxes& a, const std::array<double, 3>& q);

/// Largest in-gamut point on the segment from t (which must be in gamut)
/// toward x_star, found by binary search to lambda resolution 1e-6. The
/// result stays inside-or-on the ellipse by convexity, and its power is
/// never above t's.
Idkl gamut_clamp(const Idkl& t, const Idkl& x_star, const EllipseAxes& a);

/// Precomputes everything modulate_pixel needs from the two models so the
/// per-pixel path stays cheap. Holds references; keep the models alive.
class Modulator {
public:
    Modulator(const RbfnnModel& threshold_model, const PowerModel& power_model);

    /// The full per-pixel procedure: eccentricity gate, i-DKL conversion,
    /// D65 adaptation at the pixel's luminance, predicted ellipse, closed-form
    /// optimum, gamut clamp. Input must be in gamut (throws GamutError).
    ModulationResult operator()(const LinearRgb& c, double ecc_deg) const;

    const PowerModel& power_model() const { return power_; }
    const RbfnnModel& threshold_model() const { return threshold_; }
    const std::array<double, 3>& gradient_idkl() const { return q_; }

private:
    const RbfnnModel& threshold_;
    const PowerModel& power_;
    std::array<double, 3> q_;
};

/// Convenience wrapper constructing a Modulator per call.
ModulationResult modulate_pixel(const LinearRgb& c, double ecc_deg,
                                const RbfnnModel& threshold_model,
                                const PowerModel& power_model);

}  // namespace powershade
