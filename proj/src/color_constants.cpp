#include "powershade/color_constants.hpp"

namespace powershade {
namespace constants {

namespace {

Mat3 invert3(const Mat3& m) {
    const double a = m[0][0], b = m[0][1], c = m[0][2];
    const double d = m[1][0], e = m[1][1], f = m[1][2];
    const double g = m[2][0], h = m[2][1], i = m[2][2];
    const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    const double inv = 1.0 / det;
    return {{{(e * i - f * h) * inv, (c * h - b * i) * inv, (b * f - c * e) * inv},
             {(f * g - d * i) * inv, (a * i - c * g) * inv, (c * d - a * f) * inv},
             {(d * h - e * g) * inv, (b * g - a * h) * inv, (a * e - b * d) * inv}}};
}

}  // namespace

// Derivation: columns are the XYZ of the Rec. 709 primaries
// R (0.64, 0.33), G (0.30, 0.60), B (0.15, 0.06), each scaled so the row
// sums hit D65 (0.3127, 0.3290) at Y = 1. The Y row sums to 1 to the last
// ulp, so Y of linear sRGB white is exactly 1.
const Mat3 kSrgbToXyz = {{{0.4123907992659594, 0.35758433938387796, 0.18048078840183429},
                          {0.2126390058715103, 0.71516867876775592, 0.072192315360733714},
                          {0.019330818715591825, 0.11919477979462596, 0.9505321522496607}}};

const Mat3 kXyzToSrgb = invert3(kSrgbToXyz);

// Smith & Pokorny (1975) cone fundamentals:
//   L =  0.15514 X + 0.54312 Y - 0.03286 Z
//   M = -0.15514 X + 0.45684 Y + 0.03286 Z
//   S =  0.00801 Z
// L + M = 0.99996 Y, so L and M are divided by 0.99996 to make l + m == Y
// an exact identity.
const Mat3 kXyzToLms = {{{0.15514 / 0.99996, 0.54312 / 0.99996, -0.03286 / 0.99996},
                         {-0.15514 / 0.99996, 0.45684 / 0.99996, 0.03286 / 0.99996},
                         {0.0, 0.0, 0.00801}}};

const Mat3 kLmsToXyz = invert3(kXyzToLms);

const Mat3 kSrgbToLms = mat_mul(kXyzToLms, kSrgbToXyz);
const Mat3 kLmsToSrgb = invert3(kSrgbToLms);

// Cone-opponent basis: (L-M, S-(L+M), L+M). The inverse is exact in
// rationals: l = (lum+lm)/2, m = (lum-lm)/2, s = d_s + lum.
const Mat3 kLmsToIdkl = {{{1.0, -1.0, 0.0}, {-1.0, -1.0, 1.0}, {1.0, 1.0, 0.0}}};
const Mat3 kIdklToLms = {{{0.5, 0.0, 0.5}, {-0.5, 0.0, 0.5}, {0.0, 1.0, 1.0}}};

const Mat3 kSrgbToIdkl = mat_mul(kLmsToIdkl, kSrgbToLms);
const Mat3 kIdklToSrgb = mat_mul(kLmsToSrgb, kIdklToLms);

const std::array<double, 3> kD65IdklUnit =
    mat_apply(kLmsToIdkl, mat_apply(kSrgbToLms, {1.0, 1.0, 1.0}));

}  // namespace constants
}  // namespace powershade
