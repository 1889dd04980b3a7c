#include <doctest.h>

#include <cmath>
#include <sstream>

#include "powershade/error.hpp"
#include "powershade/rng.hpp"
#include "powershade/staircase.hpp"

using namespace powershade;

namespace {

SyntheticObserver fixed_observer(double tau, double beta = 3.5, double lapse = 0.01) {
    SyntheticObserver obs;
    obs.id = "test";
    obs.threshold = [tau](double, double, double, Direction) { return tau; };
    obs.beta = beta;
    obs.lapse_rate = lapse;
    return obs;
}

// Analytic offset where p(correct) equals the 1-up-2-down convergence point
// sqrt(0.5): invert gamma + (1-gamma-delta) * (1 - 2^-(x/tau)^beta).
double analytic_707_offset(const SyntheticObserver& obs, double tau) {
    const double w = (std::sqrt(0.5) - obs.guess_rate) / (1.0 - obs.guess_rate - obs.lapse_rate);
    return tau * std::pow(std::log2(1.0 / (1.0 - w)), 1.0 / obs.beta);
}

}  // namespace

TEST_CASE("response probability endpoints") {
    const SyntheticObserver obs = fixed_observer(0.02);
    CHECK(response_probability(obs, 0.02, 0.0) == doctest::Approx(0.25));
    CHECK(response_probability(obs, 0.02, 10.0) == doctest::Approx(1.0 - obs.lapse_rate));
    // at offset = tau the Weibull passes the midpoint of its range
    const double mid = obs.guess_rate + (1.0 - obs.guess_rate - obs.lapse_rate) * 0.5;
    CHECK(response_probability(obs, 0.02, 0.02) == doctest::Approx(mid).epsilon(1e-12));
    CHECK_THROWS_AS(response_probability(obs, 0.02, -1.0), DomainError);
}

TEST_CASE("staircase determinism and caps") {
    const SyntheticObserver obs = fixed_observer(0.02);
    const StaircaseConfig cfg;
    const StaircaseResult a = run_staircase(obs, cfg, 0.0, 0.0, 25.0, Direction::PosLm, 0.02, 7);
    const StaircaseResult b = run_staircase(obs, cfg, 0.0, 0.0, 25.0, Direction::PosLm, 0.02, 7);
    REQUIRE(a.log.size() == b.log.size());
    for (size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].offset == b.log[i].offset);
        CHECK(a.log[i].correct == b.log[i].correct);
        CHECK(a.log[i].reversal == b.log[i].reversal);
    }
    CHECK(a.estimate == b.estimate);
    CHECK(static_cast<int>(a.log.size()) <= cfg.max_trials);
    CHECK(a.reversal_count <= cfg.reversal_target);
    CHECK(a.estimate > 0.0);
}

TEST_CASE("reversal bookkeeping: moves flip exactly at flagged trials") {
    const SyntheticObserver obs = fixed_observer(0.015);
    const StaircaseConfig cfg;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const StaircaseResult r =
            run_staircase(obs, cfg, 0.0, 0.0, 25.0, Direction::NegS, 0.02, seed);
        // reconstruct moves from the offsets: +1 when offset grew, -1 shrank
        int last_move = 0;
        int reversals_seen = 0;
        for (size_t i = 0; i + 1 < r.log.size(); ++i) {
            const double now = r.log[i].offset;
            const double next = r.log[i + 1].offset;
            int move = 0;
            if (next > now) move = +1;
            if (next < now) move = -1;
            if (move != 0) {
                const bool flipped = last_move != 0 && move != last_move;
                CHECK(r.log[i].reversal == flipped);
                last_move = move;
            } else {
                CHECK_FALSE(r.log[i].reversal);
            }
        }
        CHECK(reversals_seen <= cfg.reversal_target);
        // estimates bounded by the initial offset times maximal growth
        const double initial = 0.02 * cfg.initial_offset_factor;
        double max_growth = 1.0;
        for (size_t i = 0; i < r.log.size(); ++i) max_growth *= cfg.step_factor;
        CHECK(r.estimate <= initial * max_growth);
        CHECK(r.estimate > 0.0);
    }
}

TEST_CASE("near-deterministic observer oscillates around tau") {
    SyntheticObserver obs = fixed_observer(0.02, std::numeric_limits<double>::infinity(), 0.0);
    const StaircaseConfig cfg;
    const StaircaseResult r = run_staircase(obs, cfg, 0.0, 0.0, 25.0, Direction::PosLm, 0.02, 3);
    CHECK(r.converged);
    // final annealed step factor is at most the initial one; within one step
    CHECK(r.estimate <= 0.02 * cfg.step_factor * 1.001);
    CHECK(r.estimate >= 0.02 / (cfg.step_factor * 1.001));
}

TEST_CASE("mean estimate lands near the 70.7% point") {
    const SyntheticObserver obs = fixed_observer(0.02);
    const StaircaseConfig cfg;
    const double target = analytic_707_offset(obs, 0.02);
    double sum = 0.0;
    const int runs = 500;
    for (int i = 0; i < runs; ++i) {
        sum += run_staircase(obs, cfg, 0.0, 0.0, 25.0, Direction::PosLm, 0.02,
                             1000 + static_cast<std::uint64_t>(i))
                   .estimate;
    }
    const double mean = sum / runs;
    CHECK(std::abs(mean - target) / target <= 0.15);
}

TEST_CASE("generate_study shape and determinism") {
    const BundledStudy study = bundled_study();
    const auto records = generate_study(study.observers, study.design, 11);
    CHECK(records.size() == 5u * 5u * 3u * 4u);

    const auto again = generate_study(study.observers, study.design, 11);
    std::ostringstream csv_a, csv_b;
    write_raw_records_csv(csv_a, records);
    write_raw_records_csv(csv_b, again);
    CHECK(csv_a.str() == csv_b.str());

    CHECK(generate_study({}, study.design, 11).empty());

    // thresholds grow with eccentricity on average (the planted shape)
    double sum10 = 0.0, sum35 = 0.0;
    int n10 = 0, n35 = 0;
    for (const auto& r : records) {
        if (r.ecc_deg == 10.0) {
            sum10 += r.threshold;
            ++n10;
        } else if (r.ecc_deg == 35.0) {
            sum35 += r.threshold;
            ++n35;
        }
    }
    CHECK(sum35 / n35 > 1.5 * (sum10 / n10));
}

TEST_CASE("study feeds preprocessing cleanly") {
    const BundledStudy study = bundled_study();
    const auto records = generate_study(study.observers, study.design, 11);
    const auto samples = preprocess_thresholds(records);
    CHECK(samples.size() == 15);  // 5 references x 3 eccentricities
    for (const auto& s : samples) {
        CHECK(s.alpha_lm > 0.0);
        CHECK(s.alpha_s > 0.0);
    }
}

TEST_CASE("config validation") {
    StaircaseConfig bad;
    bad.reversal_target = 3;
    CHECK_THROWS_AS(validate(bad), DomainError);
    StaircaseConfig bad2;
    bad2.step_factor_floor = 2.0;  // above the step factor
    CHECK_THROWS_AS(validate(bad2), DomainError);
}
