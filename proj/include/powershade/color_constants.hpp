#pragma once

#include <array>

namespace powershade {

// All color-space constants used by the library live in this file and its
// .cpp. Row-major 3x3 matrices; y = M * x with x, y column vectors.
using Mat3 = std::array<std::array<double, 3>, 3>;

namespace constants {

// Linear sRGB -> CIE 1931 XYZ. Rec. 709 primaries with the D65 white point
// (IEC 61966-2-1), column-scaled so that RGB (1,1,1) maps exactly to D65 at
// Y = 1. Full double precision of that derivation, not the 4-digit values
// printed in the standard.
extern const Mat3 kSrgbToXyz;
extern const Mat3 kXyzToSrgb;

// CIE XYZ -> Smith & Pokorny cone excitations. Base values are the classic
// tabulation (L and M rows sum to 0.99996 * Y); both rows are jointly
// rescaled by 1/0.99996 so that l + m equals luminance Y exactly, which the
// rest of the library treats as a hard invariant. The S row is untouched.
// Variant note: this is the Smith-Pokorny matrix as tabulated for Judd-Vos
// corrected XYZ, applied here to CIE 1931 XYZ.
extern const Mat3 kXyzToLms;
extern const Mat3 kLmsToXyz;

// Fused products, precomputed once: linear sRGB <-> LMS and the
// cone-opponent basis LMS <-> i-DKL (L-M, S-(L+M), L+M).
extern const Mat3 kSrgbToLms;
extern const Mat3 kLmsToSrgb;
extern const Mat3 kLmsToIdkl;
extern const Mat3 kIdklToLms;
extern const Mat3 kSrgbToIdkl;
extern const Mat3 kIdklToSrgb;

// sRGB transfer function (IEC 61966-2-1):
//   decode: u <= kDecodeKnee ? u / kLinearSlope : ((u + kOffset)/(1 + kOffset))^kGamma
//   encode: exact inverse, then round to the nearest 8-bit code.
inline constexpr double kGamma = 2.4;
inline constexpr double kOffset = 0.055;
inline constexpr double kLinearSlope = 12.92;
inline constexpr double kDecodeKnee = 0.04045;
inline constexpr double kEncodeKnee = 0.0031308;

// Gamut membership tolerance for linear sRGB channels.
inline constexpr double kGamutEps = 1e-9;

// i-DKL coordinates of the color with D65 chromaticity at luminance 1
// (equivalently, of linear sRGB white). Adaptation colors are this vector
// scaled by the pixel luminance.
extern const std::array<double, 3> kD65IdklUnit;

}  // namespace constants

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    return r;
}

inline std::array<double, 3> mat_apply(const Mat3& m, const std::array<double, 3>& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

}  // namespace powershade
