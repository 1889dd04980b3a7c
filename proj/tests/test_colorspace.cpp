#include <doctest.h>

#include <cmath>
#include <random>

#include "powershade/colorspace.hpp"
#include "powershade/error.hpp"
#include "powershade/rng.hpp"

using namespace powershade;

namespace {

// Independent derivation of the sRGB -> XYZ matrix from the Rec. 709
// primaries and D65 white, used as an oracle against the frozen constants.
Mat3 derive_srgb_to_xyz() {
    const double px[3] = {0.64, 0.30, 0.15};
    const double py[3] = {0.33, 0.60, 0.06};
    const double wx = 0.3127, wy = 0.3290;
    double cols[3][3];
    for (int c = 0; c < 3; ++c) {
        cols[0][c] = px[c] / py[c];
        cols[1][c] = 1.0;
        cols[2][c] = (1.0 - px[c] - py[c]) / py[c];
    }
    const double w[3] = {wx / wy, 1.0, (1.0 - wx - wy) / wy};
    // Solve cols * s = w by Cramer's rule.
    const auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double det = det3(cols);
    double s[3];
    for (int k = 0; k < 3; ++k) {
        double m[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = (j == k) ? w[i] : cols[i][j];
        s[k] = det3(m) / det;
    }
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = cols[i][j] * s[j];
    return out;
}

LinearRgb random_color(std::mt19937_64& rng) {
    return {uniform01(rng), uniform01(rng), uniform01(rng)};
}

}  // namespace

TEST_CASE("srgb transfer function fixed points and mid-gray") {
    CHECK(srgb_decode({0, 0, 0}) == LinearRgb{0.0, 0.0, 0.0});
    CHECK(srgb_decode({255, 255, 255}) == LinearRgb{1.0, 1.0, 1.0});
    // ((128/255 + 0.055) / 1.055)^2.4, evaluated independently
    const double g = srgb_decode({128, 128, 128}).r;
    CHECK(g == doctest::Approx(0.21586050011389926).epsilon(1e-13));
    CHECK(srgb_encode({1.0, 1.0, 1.0}) == EncodedRgb{255, 255, 255});
    CHECK(srgb_encode({0.0, 0.0, 0.0}) == EncodedRgb{0, 0, 0});
}

TEST_CASE("encode/decode round-trip is exact on the 17^3 code lattice") {
    for (int r = 0; r < 256; r += 16) {
        for (int g = 0; g < 256; g += 16) {
            for (int b = 0; b < 256; b += 16) {
                const EncodedRgb c{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                   static_cast<std::uint8_t>(b)};
                CHECK(srgb_encode(srgb_decode(c)) == c);
            }
        }
    }
    // all single-channel codes too; cheap and catches table edges
    for (int v = 0; v < 256; ++v) {
        const auto u = static_cast<std::uint8_t>(v);
        CHECK(srgb_encode(srgb_decode({u, u, u})) == EncodedRgb{u, u, u});
    }
}

TEST_CASE("table encode agrees with the continuous formula") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20000; ++i) {
        const double v = uniform01(rng);
        const double code = srgb_encode_channel(v) * 255.0;
        // skip knife-edge values where round() itself is ill-conditioned
        if (std::abs(code - std::floor(code) - 0.5) < 1e-9) continue;
        const EncodedRgb e = srgb_encode({v, v, v});
        CHECK(e.r == static_cast<std::uint8_t>(std::lround(code)));
    }
}

TEST_CASE("encode rejects out-of-gamut input") {
    CHECK_THROWS_AS(srgb_encode({1.1, 0.0, 0.0}), GamutError);
    CHECK_THROWS_AS(srgb_encode({0.0, -0.01, 0.0}), GamutError);
    // within-eps overshoot is accepted and clamped
    CHECK(srgb_encode({1.0 + 5e-10, 0.0, 0.0}) == EncodedRgb{255, 0, 0});
}

TEST_CASE("frozen sRGB->XYZ matches an independent derivation") {
    const Mat3 derived = derive_srgb_to_xyz();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(constants::kSrgbToXyz[i][j] == doctest::Approx(derived[i][j]).epsilon(1e-14));
        }
    }
}

TEST_CASE("linear_to_lms: white point and luminance identity") {
    CHECK(linear_to_lms({0, 0, 0}).l == 0.0);
    const Lms white = linear_to_lms({1, 1, 1});
    CHECK(white.l + white.m == doctest::Approx(1.0).epsilon(1e-12));
    // S of white equals the S-row sum of the combined matrix
    const auto& m = constants::kSrgbToLms;
    CHECK(white.s == doctest::Approx(m[2][0] + m[2][1] + m[2][2]).epsilon(1e-15));

    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        const LinearRgb c = random_color(rng);
        const Lms lms = linear_to_lms(c);
        const Idkl d = lms_to_idkl(lms);
        CHECK(std::abs(d.lum - luminance(c)) <= 1e-12);
    }
}

TEST_CASE("lms <-> linear round trip") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const LinearRgb c = random_color(rng);
        const LinearRgb back = lms_to_linear(linear_to_lms(c));
        CHECK(std::abs(back.r - c.r) <= 1e-12);
        CHECK(std::abs(back.g - c.g) <= 1e-12);
        CHECK(std::abs(back.b - c.b) <= 1e-12);
    }
    const LinearRgb white = lms_to_linear(linear_to_lms({1, 1, 1}));
    CHECK(std::abs(white.r - 1.0) <= 1e-9);
    CHECK(std::abs(white.g - 1.0) <= 1e-9);
    CHECK(std::abs(white.b - 1.0) <= 1e-9);
}

TEST_CASE("i-DKL basis arithmetic") {
    const Idkl d = lms_to_idkl({0.6, 0.3, 0.1});
    CHECK(d.lm == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.s == doctest::Approx(-0.8).epsilon(1e-15));
    CHECK(d.lum == doctest::Approx(0.9).epsilon(1e-15));

    const Lms back = idkl_to_lms({0.3, -0.8, 0.9});
    CHECK(back.l == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(back.m == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(back.s == doctest::Approx(0.1).epsilon(1e-15));

    const Lms achroma = idkl_to_lms({0.0, 0.0, 1.0});
    CHECK(achroma.l == 0.5);
    CHECK(achroma.m == 0.5);
    CHECK(achroma.s == 1.0);

    CHECK(lms_to_idkl({0.4, 0.4, 0.2}).lm == 0.0);
    CHECK(lms_to_idkl({0, 0, 0}).lum == 0.0);
}

TEST_CASE("full round trip rgb->lms->idkl->lms->rgb over 1e5 colors") {
    std::mt19937_64 rng(1234);
    double max_err = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const LinearRgb c = random_color(rng);
        const Lms lms = linear_to_lms(c);
        const Idkl d = lms_to_idkl(lms);
        const Lms lms2 = idkl_to_lms(d);
        const LinearRgb back = lms_to_linear(lms2);
        max_err = std::max({max_err, std::abs(back.r - c.r), std::abs(back.g - c.g),
                            std::abs(back.b - c.b)});
    }
    CHECK(max_err <= 1e-9);
}

TEST_CASE("conversions are linear maps") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        const LinearRgb x = random_color(rng);
        const LinearRgb y = random_color(rng);
        const double a = 2.0 * uniform01(rng) - 0.5;
        const double b = 2.0 * uniform01(rng) - 0.5;
        const LinearRgb mix{a * x.r + b * y.r, a * x.g + b * y.g, a * x.b + b * y.b};
        const Lms lx = linear_to_lms(x), ly = linear_to_lms(y), lm = linear_to_lms(mix);
        CHECK(std::abs(lm.l - (a * lx.l + b * ly.l)) <= 1e-12);
        CHECK(std::abs(lm.m - (a * lx.m + b * ly.m)) <= 1e-12);
        CHECK(std::abs(lm.s - (a * lx.s + b * ly.s)) <= 1e-12);
        const Idkl dx = linear_to_idkl(x), dy = linear_to_idkl(y), dm = linear_to_idkl(mix);
        CHECK(std::abs(dm.lm - (a * dx.lm + b * dy.lm)) <= 1e-12);
        CHECK(std::abs(dm.s - (a * dx.s + b * dy.s)) <= 1e-12);
        CHECK(std::abs(dm.lum - (a * dx.lum + b * dy.lum)) <= 1e-12);
    }
}

TEST_CASE("contrast basics") {
    const Idkl b{0.2, -0.4, 0.5};
    const ContrastVec zero = contrast(b, b);
    CHECK(zero.lm == 0.0);
    CHECK(zero.s == 0.0);
    CHECK(zero.lum == 0.0);

    const Idkl t{0.3, -0.6, 0.75};
    const ContrastVec k = contrast(t, b);
    CHECK(k.lm == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(k.s == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(k.lum == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(contrast(t, Idkl{0.0, -0.4, 0.5}), DomainError);
}

TEST_CASE("adaptation_for scales the D65 axis with luminance") {
    CHECK(adaptation_for({0.1, 0.1, 0.0}).lum == 0.0);
    CHECK(adaptation_for({0.1, 0.1, 0.0}).lm == 0.0);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Idkl t{uniform01(rng) - 0.5, uniform01(rng) - 0.5, uniform01(rng)};
        CHECK(adaptation_for(t).lum == doctest::Approx(t.lum).epsilon(1e-15));
    }

    const Idkl white = linear_to_idkl({1.0, 1.0, 1.0});
    const Idkl adapted = adaptation_for(white);
    CHECK(std::abs(adapted.lm - white.lm) <= 1e-9);
    CHECK(std::abs(adapted.s - white.s) <= 1e-9);
    CHECK(std::abs(adapted.lum - white.lum) <= 1e-9);
}

TEST_CASE("in_gamut predicate") {
    CHECK(in_gamut({0.0, 0.5, 1.0}));
    CHECK(in_gamut({-5e-10, 0.5, 1.0 + 5e-10}));
    CHECK_FALSE(in_gamut({-1e-6, 0.5, 0.5}));
    CHECK_FALSE(in_gamut({0.5, 0.5, 1.0001}));
}
