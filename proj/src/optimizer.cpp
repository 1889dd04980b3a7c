#include "powershade/optimizer.hpp"

#include <cmath>

#include "powershade/error.hpp"

namespace powershade {

Idkl optimal_on_ellipse(const Idkl& t, const EllipseAxes& a, const std::array<double, 3>& q) {
    if (!(a.a_lm > 0.0) || !(a.a_s > 0.0)) {
        throw DomainError("optimal_on_ellipse: semi-axes must be positive");
    }
    const double q1 = q[0], q2 = q[1];
    const double s1 = q1 * a.a_lm, s2 = q2 * a.a_s;
    const double norm = std::sqrt(s1 * s1 + s2 * s2);
    if (norm == 0.0) return t;  // no chromatic preference
    return {t.lm - q1 * a.a_lm * a.a_lm / norm, t.s - q2 * a.a_s * a.a_s / norm, t.lum};
}

Idkl gamut_clamp(const Idkl& t, const Idkl& x_star, const EllipseAxes& a) {
    (void)a;  // membership is guaranteed by convexity of the segment from the center
    const LinearRgb rgb_t = idkl_to_linear(t);
    const LinearRgb rgb_x = idkl_to_linear(x_star);
    if (in_gamut(rgb_x)) return x_star;

    const auto lerp_in_gamut = [&](double lambda) {
        const LinearRgb c{rgb_t.r + lambda * (rgb_x.r - rgb_t.r),
                          rgb_t.g + lambda * (rgb_x.g - rgb_t.g),
                          rgb_t.b + lambda * (rgb_x.b - rgb_t.b)};
        return in_gamut(c);
    };

    double lo = 0.0, hi = 1.0;  // lo in gamut, hi out
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (lerp_in_gamut(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {t.lm + lo * (x_star.lm - t.lm), t.s + lo * (x_star.s - t.s),
            t.lum + lo * (x_star.lum - t.lum)};
}

Modulator::Modulator(const RbfnnModel& threshold_model, const PowerModel& power_model)
    : threshold_(threshold_model), power_(power_model), q_(power_gradient_idkl(power_model)) {
    threshold_model.validate();
}

ModulationResult Modulator::operator()(const LinearRgb& c, double ecc_deg) const {
    if (!in_gamut(c)) throw GamutError("modulate_pixel: input out of gamut");

    const Idkl t = linear_to_idkl(c);
    ModulationResult res;
    res.output = t;

    const auto ecc = clamp_eccentricity(ecc_deg);
    if (!ecc) {
        res.skipped = true;
        return res;
    }

    const Idkl b = adaptation_for(t);
    if (t.lum <= 0.0 || b.lm == 0.0 || b.s == 0.0) {
        res.skipped = true;
        return res;
    }

    const EllipseAxes axes = ellipse_axes(threshold_, t, b, *ecc);
    if (!(axes.a_lm > 0.0) || !(axes.a_s > 0.0)) {
        res.skipped = true;  // threshold model degenerate at this point
        return res;
    }

    const Idkl x_star = optimal_on_ellipse(t, axes, q_);
    const Idkl x = gamut_clamp(t, x_star, axes);
    if (x.lm != x_star.lm || x.s != x_star.s) res.clamped = true;
    res.output = x;
    res.power_delta = q_[0] * (x.lm - t.lm) + q_[1] * (x.s - t.s) + q_[2] * (x.lum - t.lum);
    return res;
}

ModulationResult modulate_pixel(const LinearRgb& c, double ecc_deg,
                                const RbfnnModel& threshold_model,
                                const PowerModel& power_model) {
    return Modulator(threshold_model, power_model)(c, ecc_deg);
}

}  // namespace powershade
