#pragma once

#include <cstdint>

#include "powershade/color_constants.hpp"

namespace powershade {

/// 8-bit sRGB display codes.
struct EncodedRgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const EncodedRgb&, const EncodedRgb&) = default;
};

/// Linear-light sRGB. Nominally in [0,1]; values outside are legal as
/// intermediate math and flagged by in_gamut().
struct LinearRgb {
    double r = 0.0, g = 0.0, b = 0.0;
    friend bool operator==(const LinearRgb&, const LinearRgb&) = default;
};

/// Smith-Pokorny cone excitations, normalized so l + m equals CIE Y.
struct Lms {
    double l = 0.0, m = 0.0, s = 0.0;
};

/// Cone-opponent basis: lm = L-M, s = S-(L+M), lum = L+M (== CIE Y).
struct Idkl {
    double lm = 0.0, s = 0.0, lum = 0.0;
};

/// Dimensionless contrasts kappa_i = (t_i - b_i) / b_i.
struct ContrastVec {
    double lm = 0.0, s = 0.0, lum = 0.0;
};

/// Piecewise sRGB gamma expansion of an 8-bit code triple.
LinearRgb srgb_decode(EncodedRgb c);

/// Inverse transfer function followed by round-to-nearest code. Inputs must
/// be in gamut (within kGamutEps); throws GamutError otherwise.
EncodedRgb srgb_encode(const LinearRgb& c);

/// Continuous transfer function on one channel, exposed for cross-checks.
double srgb_decode_channel(double code01);
double srgb_encode_channel(double linear);

Lms linear_to_lms(const LinearRgb& c);
LinearRgb lms_to_linear(const Lms& c);
Idkl lms_to_idkl(const Lms& c);
Lms idkl_to_lms(const Idkl& c);

Idkl linear_to_idkl(const LinearRgb& c);
LinearRgb idkl_to_linear(const Idkl& c);

/// CIE luminance Y of a linear sRGB color.
double luminance(const LinearRgb& c);

bool in_gamut(const LinearRgb& c, double eps = constants::kGamutEps);

/// kappa_i = (t_i - b_i)/b_i. Throws DomainError if any b_i is zero.
ContrastVec contrast(const Idkl& t, const Idkl& b);

/// The D65-chromaticity color at the luminance of t. Zero luminance yields
/// the zero vector, which callers must treat as degenerate.
Idkl adaptation_for(const Idkl& t);

}  // namespace powershade
