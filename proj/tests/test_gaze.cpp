#include <doctest.h>

#include <cmath>
#include <map>

#include "powershade/error.hpp"
#include "powershade/gaze.hpp"
#include "powershade/rng.hpp"

using namespace powershade;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Independent oracle: build the two view rays as 3-vectors and measure the
// angle via atan2 of the cross-product norm (the implementation uses acos of
// the normalized dot).
double angle_oracle(const GazeConfig& cfg, double px, double py) {
    const double f = (cfg.width / 2.0) / std::tan(cfg.fov_h_deg * kPi / 360.0);
    const double a[3] = {px - cfg.width / 2.0, py - cfg.height / 2.0, f};
    const double b[3] = {cfg.gaze_x - cfg.width / 2.0, cfg.gaze_y - cfg.height / 2.0, f};
    const double cx = a[1] * b[2] - a[2] * b[1];
    const double cy = a[2] * b[0] - a[0] * b[2];
    const double cz = a[0] * b[1] - a[1] * b[0];
    const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    return std::atan2(cross, dot) * 180.0 / kPi;
}

}  // namespace

TEST_CASE("eccentricity is zero at the gaze and half-FOV at the edge") {
    GazeConfig cfg{640, 480, 90.0, 320.0, 240.0};
    CHECK(eccentricity_deg(cfg, 320.0, 240.0) == doctest::Approx(0.0).epsilon(1e-12));
    // horizontal image edge on the center row: half the horizontal FOV
    CHECK(eccentricity_deg(cfg, 640.0, 240.0) == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(eccentricity_deg(cfg, 0.0, 240.0) == doctest::Approx(45.0).epsilon(1e-12));

    const auto map = eccentricity_map(cfg);
    CHECK(map[240 * 640 + 320] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("matches the vector-angle oracle") {
    GazeConfig cfg{321, 200, 75.0, 40.0, 151.0};
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double px = uniform01(rng) * (cfg.width - 1);
        const double py = uniform01(rng) * (cfg.height - 1);
        const double got = eccentricity_deg(cfg, px, py);
        CHECK(std::abs(got - angle_oracle(cfg, px, py)) <= 1e-9);
    }
}

TEST_CASE("symmetry: swapping pixel and gaze") {
    GazeConfig a{512, 512, 100.0, 100.0, 400.0};
    GazeConfig b = a;
    b.gaze_x = 31.0;
    b.gaze_y = 77.0;
    CHECK(eccentricity_deg(a, 31.0, 77.0) ==
          doctest::Approx(eccentricity_deg(b, 100.0, 400.0)).epsilon(1e-12));
}

TEST_CASE("monotone along rows and columns through the gaze") {
    GazeConfig cfg{301, 301, 90.0, 150.0, 150.0};
    const auto map = eccentricity_map(cfg);
    for (int x = 151; x < 301; ++x) {
        CHECK(map[150 * 301 + x] > map[150 * 301 + x - 1]);
    }
    for (int y = 149; y >= 0; --y) {
        CHECK(map[y * 301 + 150] > map[(y + 1) * 301 + 150]);
    }
}

TEST_CASE("random_gaze determinism and bounds") {
    GazeConfig tmpl{640, 480, 90.0, 0.0, 0.0};
    const GazeConfig a = random_gaze(tmpl, 42);
    const GazeConfig b = random_gaze(tmpl, 42);
    CHECK(a.gaze_x == b.gaze_x);
    CHECK(a.gaze_y == b.gaze_y);
    const GazeConfig c = random_gaze(tmpl, 43);
    CHECK((a.gaze_x != c.gaze_x || a.gaze_y != c.gaze_y));

    GazeConfig tiny{1, 1, 90.0, 0.0, 0.0};
    const GazeConfig t = random_gaze(tiny, 1);
    CHECK(t.gaze_x == 0.0);
    CHECK(t.gaze_y == 0.0);
}

TEST_CASE("random_gaze marginals are roughly uniform") {
    GazeConfig tmpl{8, 8, 90.0, 0.0, 0.0};
    std::map<int, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const GazeConfig g = random_gaze(tmpl, 1000 + i);
        counts[static_cast<int>(g.gaze_y) * 8 + static_cast<int>(g.gaze_x)] += 1;
    }
    // chi-square over 64 cells, expected 156.25 each; reject only below
    // p ~ 0.001 (critical value ~ 110 at 63 dof)
    double chi2 = 0.0;
    const double expected = static_cast<double>(draws) / 64.0;
    for (int cell = 0; cell < 64; ++cell) {
        const double d = counts[cell] - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 110.0);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate(GazeConfig{0, 10, 90.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(GazeConfig{10, 10, 180.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(GazeConfig{10, 10, 90.0, 10.0, 0.0}), DomainError);
}
