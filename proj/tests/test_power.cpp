#include <doctest.h>

#include <cmath>
#include <sstream>

#include "powershade/error.hpp"
#include "powershade/power.hpp"
#include "powershade/rng.hpp"

using namespace powershade;

namespace {

const PowerModel kPlanted{{1.0, 2.0, 3.0}, 0.5};

std::vector<PowerSample> planted_samples(int n, std::uint64_t seed, double noise_frac) {
    const auto palette = sample_palette(n, seed);
    std::mt19937_64 rng(derive_seed(seed, 0xABCDu));
    std::vector<PowerSample> out;
    out.reserve(palette.size());
    for (const auto& c : palette) {
        double w = predict_power(kPlanted, c);
        if (noise_frac > 0.0) w *= 1.0 + noise_frac * normal01(rng);
        out.push_back({c, w});
    }
    return out;
}

}  // namespace

TEST_CASE("trace parsing") {
    std::istringstream trace("t_seconds,watts\n0.0,1.0\n0.068,1.2\n");
    std::istringstream segs("r,g,b,start_s,end_s\n1,1,1,0.0,0.1\n");
    const PowerTrace t = parse_power_trace(trace, segs);
    CHECK(t.t_seconds.size() == 2);
    CHECK(t.segments.size() == 1);

    std::istringstream bad("t_seconds,watts\n0.0,1.0\n0.0,1.2\n");
    std::istringstream segs2("r,g,b,start_s,end_s\n");
    CHECK_THROWS_AS(parse_power_trace(bad, segs2), ParseError);

    std::istringstream bad2("t_seconds,watts\n0.0,1.0\nxyz,1.2\n");
    std::istringstream segs3("r,g,b,start_s,end_s\n");
    CHECK_THROWS_WITH_AS(parse_power_trace(bad2, segs3),
                         doctest::Contains("line 3"), ParseError);
}

TEST_CASE("trace segment means") {
    PowerTrace t;
    for (int i = 0; i < 80; ++i) {
        t.t_seconds.push_back(0.068 * i);
        t.watts.push_back(1.0);
    }
    t.segments.push_back({{0.5, 0.5, 0.5}, 0.0, 5.0});
    auto samples = trace_to_samples(t);
    CHECK(samples.size() == 1);
    CHECK(samples[0].watts == doctest::Approx(1.0));

    t.watts.assign(80, 0.0);
    t.watts[0] = 1.0;
    t.watts[1] = 3.0;
    t.segments[0] = {{0, 0, 0}, 0.0, 0.07};
    samples = trace_to_samples(t);
    CHECK(samples[0].watts == doctest::Approx(2.0));

    t.segments[0] = {{0, 0, 0}, 100.0, 101.0};
    CHECK_THROWS_AS(trace_to_samples(t), DomainError);

    // single reading
    PowerTrace one;
    one.t_seconds = {1.0};
    one.watts = {2.5};
    one.segments.push_back({{0, 0, 0}, 0.9, 1.1});
    CHECK(trace_to_samples(one)[0].watts == 2.5);
}

TEST_CASE("synthetic trace from a planted model averages within noise bounds") {
    PowerTrace t;
    std::mt19937_64 rng(17);
    const LinearRgb colors[3] = {{1, 0, 0}, {0, 1, 0}, {0.2, 0.4, 0.8}};
    int idx = 0;
    for (int s = 0; s < 3; ++s) {
        const double start = s * 5.0;
        for (int i = 0; i < 73; ++i) {
            t.t_seconds.push_back(start + 0.068 * i);
            t.watts.push_back(predict_power(kPlanted, colors[s]) *
                              (1.0 + 0.01 * normal01(rng)));
            ++idx;
        }
        t.segments.push_back({colors[s], start, start + 4.95});
    }
    const auto samples = trace_to_samples(t);
    for (int s = 0; s < 3; ++s) {
        const double truth = predict_power(kPlanted, colors[s]);
        // sigma of the mean: 1% / sqrt(73) ~ 0.12%; allow 5 sigma
        CHECK(std::abs(samples[s].watts - truth) / truth < 0.006);
    }
}

TEST_CASE("sample_palette") {
    const auto v8 = sample_palette(8, 1);
    CHECK(v8.size() == 8);
    CHECK(v8[0] == LinearRgb{0, 0, 0});
    CHECK(v8[7] == LinearRgb{1, 1, 1});

    const auto a = sample_palette(52, 5);
    const auto b = sample_palette(52, 5);
    CHECK(a.size() == 52);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    const auto c = sample_palette(52, 6);
    for (int i = 0; i < 8; ++i) CHECK(a[i] == c[i]);
    bool tail_differs = false;
    for (size_t i = 8; i < a.size(); ++i) tail_differs |= !(a[i] == c[i]);
    CHECK(tail_differs);

    CHECK_THROWS_AS(sample_palette(7, 1), DomainError);
}

TEST_CASE("noiseless planted fit recovers exactly") {
    const auto samples = planted_samples(52, 3, 0.0);
    PowerFitReport rep;
    const PowerModel m = fit_power_model(samples, &rep);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(m.p_srgb[i] - kPlanted.p_srgb[i]) /
                  std::abs(kPlanted.p_srgb[i]) <= 1e-9);
    }
    CHECK(std::abs(m.p_circ - kPlanted.p_circ) <= 1e-10);
    CHECK(rep.mean_relative_error <= 1e-10);
}

TEST_CASE("noisy planted fit stays under the paper-scale error bound") {
    const auto samples = planted_samples(52, 11, 0.005);
    PowerFitReport rep;
    const PowerModel m = fit_power_model(samples, &rep);
    CHECK(rep.mean_relative_error <= 0.01);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(m.p_srgb[i] - kPlanted.p_srgb[i]) / kPlanted.p_srgb[i] < 0.02);
    }
}

TEST_CASE("fit errors") {
    std::vector<PowerSample> three = {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 2.0}, {{0, 1, 0}, 3.0}};
    CHECK_THROWS_AS(fit_power_model(three), FitError);

    // 6 samples all on a gray line: rank deficient
    std::vector<PowerSample> gray;
    for (int i = 0; i < 6; ++i) {
        const double v = i / 5.0;
        gray.push_back({{v, v, v}, 1.0 + v});
    }
    CHECK_THROWS_AS(fit_power_model(gray), FitError);
}

TEST_CASE("predict_power basics and affinity") {
    CHECK(predict_power(kPlanted, {1, 1, 1}) == doctest::Approx(6.5));
    CHECK(predict_power(kPlanted, {0, 0, 0}) == doctest::Approx(0.5));

    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const LinearRgb c1{uniform01(rng), uniform01(rng), uniform01(rng)};
        const LinearRgb c2{uniform01(rng), uniform01(rng), uniform01(rng)};
        const double a = uniform01(rng), b = uniform01(rng);
        const LinearRgb mix{a * c1.r + b * c2.r, a * c1.g + b * c2.g, a * c1.b + b * c2.b};
        const double lhs = predict_power(kPlanted, mix) - kPlanted.p_circ;
        const double rhs = a * (predict_power(kPlanted, c1) - kPlanted.p_circ) +
                           b * (predict_power(kPlanted, c2) - kPlanted.p_circ);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        // second differences vanish along any color line
        const auto at = [&](double s) {
            return predict_power(kPlanted, {c1.r + s * (c2.r - c1.r), c1.g + s * (c2.g - c1.g),
                                            c1.b + s * (c2.b - c1.b)});
        };
        CHECK(std::abs(at(0.0) - 2.0 * at(0.5) + at(1.0)) <= 1e-12);
    }
}

TEST_CASE("image_power equals the per-pixel average") {
    std::mt19937_64 rng(31);
    std::vector<LinearRgb> img;
    double acc = 0.0;
    for (int i = 0; i < 977; ++i) {
        img.push_back({uniform01(rng), uniform01(rng), uniform01(rng)});
        acc += predict_power(kPlanted, img.back());
    }
    CHECK(image_power(kPlanted, img) ==
          doctest::Approx(acc / static_cast<double>(img.size())).epsilon(1e-12));

    const std::vector<LinearRgb> uniform(64, LinearRgb{0.3, 0.6, 0.1});
    CHECK(image_power(kPlanted, uniform) ==
          doctest::Approx(predict_power(kPlanted, {0.3, 0.6, 0.1})).epsilon(1e-14));

    std::vector<LinearRgb> half(10, LinearRgb{0, 0, 0});
    half.insert(half.end(), 10, LinearRgb{1, 1, 1});
    const double mid = 0.5 * (predict_power(kPlanted, {0, 0, 0}) +
                              predict_power(kPlanted, {1, 1, 1}));
    CHECK(image_power(kPlanted, half) == doctest::Approx(mid).epsilon(1e-14));

    CHECK_THROWS_AS(image_power(kPlanted, {}), DomainError);
}

TEST_CASE("power gradient in i-DKL against finite differences") {
    const auto q = power_gradient_idkl(kPlanted);

    // chain consistency on random points
    std::mt19937_64 rng(37);
    for (int i = 0; i < 200; ++i) {
        const Idkl x{uniform01(rng) - 0.5, uniform01(rng) - 0.5, uniform01(rng)};
        const double via_q = q[0] * x.lm + q[1] * x.s + q[2] * x.lum + kPlanted.p_circ;
        const double direct = predict_power(kPlanted, idkl_to_linear(x));
        CHECK(via_q == doctest::Approx(direct).epsilon(1e-9));
    }

    // finite differences through idkl -> lms -> linear; the function is
    // affine, so the central difference has no truncation term and h can be
    // large enough to kill cancellation noise
    const Idkl base{0.05, -0.3, 0.4};
    const double h = 1e-5;
    const auto power_at = [&](const Idkl& v) {
        return predict_power(kPlanted, lms_to_linear(idkl_to_lms(v)));
    };
    const double d_lm = (power_at({base.lm + h, base.s, base.lum}) -
                         power_at({base.lm - h, base.s, base.lum})) /
                        (2 * h);
    const double d_s =
        (power_at({base.lm, base.s + h, base.lum}) - power_at({base.lm, base.s - h, base.lum})) /
        (2 * h);
    const double d_lum = (power_at({base.lm, base.s, base.lum + h}) -
                          power_at({base.lm, base.s, base.lum - h})) /
                         (2 * h);
    CHECK(std::abs(d_lm - q[0]) <= 1e-9);
    CHECK(std::abs(d_s - q[1]) <= 1e-9);
    CHECK(std::abs(d_lum - q[2]) <= 1e-9);

    CHECK(power_gradient_idkl({{0, 0, 0}, 1.0}) == std::array<double, 3>{0, 0, 0});
}

TEST_CASE("model JSON round trip") {
    const std::string text = power_model_to_json(kPlanted);
    const PowerModel back = power_model_from_json(text);
    CHECK(back.p_srgb == kPlanted.p_srgb);
    CHECK(back.p_circ == kPlanted.p_circ);
    CHECK_THROWS_AS(power_model_from_json("{\"type\":\"rbfnn\"}"), ParseError);
    CHECK_THROWS_AS(power_model_from_json("not json"), ParseError);
}
