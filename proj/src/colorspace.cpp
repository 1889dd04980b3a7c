#include "powershade/colorspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "powershade/error.hpp"

namespace powershade {

using namespace constants;

double srgb_decode_channel(double u) {
    if (u <= kDecodeKnee) return u / kLinearSlope;
    return std::pow((u + kOffset) / (1.0 + kOffset), kGamma);
}

double srgb_encode_channel(double v) {
    if (v <= kEncodeKnee) return v * kLinearSlope;
    return (1.0 + kOffset) * std::pow(v, 1.0 / kGamma) - kOffset;
}

namespace {

struct DecodeTables {
    // lut[c] = linear value of code c.
    std::array<double, 256> lut;
    // boundary[k] = linear value whose continuous encode lands exactly on
    // code k + 0.5; round-to-nearest in code space is then a binary search.
    std::array<double, 255> boundary;
};

const DecodeTables& tables() {
    static const DecodeTables t = [] {
        DecodeTables t;
        for (int c = 0; c < 256; ++c) t.lut[c] = srgb_decode_channel(c / 255.0);
        for (int k = 0; k < 255; ++k) t.boundary[k] = srgb_decode_channel((k + 0.5) / 255.0);
        return t;
    }();
    return t;
}

std::uint8_t encode_channel_to_code(double v) {
    const auto& b = tables().boundary;
    // Count of boundaries <= v; round() in code space is half-away-from-zero,
    // so a value exactly on a boundary goes to the upper code.
    const auto it = std::upper_bound(b.begin(), b.end(), v);
    return static_cast<std::uint8_t>(it - b.begin());
}

}  // namespace

LinearRgb srgb_decode(EncodedRgb c) {
    const auto& lut = tables().lut;
    return {lut[c.r], lut[c.g], lut[c.b]};
}

EncodedRgb srgb_encode(const LinearRgb& c) {
    if (!in_gamut(c)) {
        throw GamutError("srgb_encode: color out of gamut");
    }
    const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    return {encode_channel_to_code(clamp01(c.r)), encode_channel_to_code(clamp01(c.g)),
            encode_channel_to_code(clamp01(c.b))};
}

Lms linear_to_lms(const LinearRgb& c) {
    const auto v = mat_apply(kSrgbToLms, {c.r, c.g, c.b});
    return {v[0], v[1], v[2]};
}

LinearRgb lms_to_linear(const Lms& c) {
    const auto v = mat_apply(kLmsToSrgb, {c.l, c.m, c.s});
    return {v[0], v[1], v[2]};
}

Idkl lms_to_idkl(const Lms& c) {
    return {c.l - c.m, c.s - (c.l + c.m), c.l + c.m};
}

Lms idkl_to_lms(const Idkl& c) {
    return {0.5 * (c.lum + c.lm), 0.5 * (c.lum - c.lm), c.s + c.lum};
}

Idkl linear_to_idkl(const LinearRgb& c) {
    const auto v = mat_apply(kSrgbToIdkl, {c.r, c.g, c.b});
    return {v[0], v[1], v[2]};
}

LinearRgb idkl_to_linear(const Idkl& c) {
    const auto v = mat_apply(kIdklToSrgb, {c.lm, c.s, c.lum});
    return {v[0], v[1], v[2]};
}

double luminance(const LinearRgb& c) {
    const auto& y = kSrgbToXyz[1];
    return y[0] * c.r + y[1] * c.g + y[2] * c.b;
}

bool in_gamut(const LinearRgb& c, double eps) {
    return c.r >= -eps && c.r <= 1.0 + eps && c.g >= -eps && c.g <= 1.0 + eps &&
           c.b >= -eps && c.b <= 1.0 + eps;
}

ContrastVec contrast(const Idkl& t, const Idkl& b) {
    if (b.lm == 0.0 || b.s == 0.0 || b.lum == 0.0) {
        throw DomainError("contrast: adaptation coordinate is zero");
    }
    return {(t.lm - b.lm) / b.lm, (t.s - b.s) / b.s, (t.lum - b.lum) / b.lum};
}

Idkl adaptation_for(const Idkl& t) {
    const auto& w = kD65IdklUnit;
    return {w[0] * t.lum, w[1] * t.lum, w[2] * t.lum};
}

}  // namespace powershade
