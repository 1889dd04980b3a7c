#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "powershade/perceptual.hpp"

namespace powershade {

/// Simulated participant. The true threshold function tau maps (reference
/// contrasts, eccentricity, direction) to a contrast-magnitude threshold.
/// Responses follow a Weibull psychometric function
///   p(correct | offset) = guess + (1 - guess - lapse) * (1 - 2^-(offset/tau)^beta)
/// so performance passes the midpoint of its range exactly at offset = tau.
/// An infinite beta makes the curve a step at tau.
struct SyntheticObserver {
    std::string id;
    std::function<double(double k_lm, double k_s, double ecc_deg, Direction d)> threshold;
    double beta = 3.5;
    double guess_rate = 0.25;  // 4AFC chance level
    double lapse_rate = 0.01;
};

/// Probability of a correct response at the given offset.
double response_probability(const SyntheticObserver& obs, double tau, double offset);

/// One Bernoulli trial. offset must be >= 0.
bool trial_response(const SyntheticObserver& obs, double tau, double offset,
                    std::mt19937_64& rng);

struct StaircaseConfig {
    int reversal_target = 6;   // stop after this many reversals...
    int max_trials = 50;       // ...or this many trials, whichever first
    int reversals_to_average = 3;
    double initial_offset_factor = 4.0;  // times the rough threshold guess
    double step_factor = 1.5;            // multiplicative step
    double step_factor_floor = 1.2;      // annealed toward after each reversal
};

void validate(const StaircaseConfig& cfg);

struct StaircaseTrial {
    double offset = 0.0;
    bool correct = false;
    bool reversal = false;
};

struct StaircaseResult {
    double estimate = 0.0;       // mean offset over the last averaged reversals
    bool converged = false;      // reached the reversal target before max trials
    int reversal_count = 0;
    std::vector<StaircaseTrial> log;
};

/// 1-up-2-down staircase against the observer's threshold at the given
/// stimulus. Deterministic per seed.
StaircaseResult run_staircase(const SyntheticObserver& obs, const StaircaseConfig& cfg,
                              double k_lm, double k_s, double ecc_deg, Direction dir,
                              double rough_threshold_guess, std::uint64_t seed);

/// Reference stimulus grid for a full study.
struct StudyDesign {
    std::vector<std::pair<double, double>> references;  // (k_lm, k_s)
    std::vector<double> eccentricities_deg;
    StaircaseConfig staircase;
    double rough_threshold_guess = 0.02;
};

/// One staircase per (observer, reference, eccentricity, direction).
/// Record order and sub-seeds are fixed, so a given seed yields a
/// byte-identical CSV.
std::vector<RawThresholdRecord> generate_study(const std::vector<SyntheticObserver>& observers,
                                               const StudyDesign& design, std::uint64_t seed);

/// The bundled paper-shaped synthetic study: 5 observers, 5 reference
/// colors, 3 eccentricities, 4 directions. Thresholds grow with eccentricity
/// and carry mild reference dependence, per-observer scale factors, a small
/// directional asymmetry, and 5% multiplicative sequence noise.
struct BundledStudy {
    std::vector<SyntheticObserver> observers;
    StudyDesign design;
};
BundledStudy bundled_study(std::uint64_t noise_seed = 7);

/// Ground truth of the bundled study's base (most sensitive) observer,
/// exposed for closure tests against trained models.
double bundled_true_threshold(double k_lm, double k_s, double ecc_deg, Direction d);

}  // namespace powershade
