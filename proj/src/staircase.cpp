#include "powershade/staircase.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "powershade/error.hpp"
#include "powershade/rng.hpp"

namespace powershade {

namespace {

double weibull(double offset, double tau, double beta) {
    if (std::isinf(beta)) {
        if (offset < tau) return 0.0;
        return offset == tau ? 0.5 : 1.0;
    }
    return 1.0 - std::exp2(-std::pow(offset / tau, beta));
}

}  // namespace

double response_probability(const SyntheticObserver& obs, double tau, double offset) {
    if (offset < 0.0) throw DomainError("trial_response: negative offset");
    if (!(tau > 0.0)) throw DomainError("trial_response: non-positive threshold");
    const double w = offset == 0.0 ? 0.0 : weibull(offset, tau, obs.beta);
    return obs.guess_rate + (1.0 - obs.guess_rate - obs.lapse_rate) * w;
}

bool trial_response(const SyntheticObserver& obs, double tau, double offset,
                    std::mt19937_64& rng) {
    return uniform01(rng) < response_probability(obs, tau, offset);
}

void validate(const StaircaseConfig& cfg) {
    if (cfg.reversal_target < 4) {
        throw DomainError("staircase: reversal target must be >= 4");
    }
    if (cfg.max_trials < 1) throw DomainError("staircase: max_trials must be >= 1");
    if (cfg.reversals_to_average < 1 || cfg.reversals_to_average > cfg.reversal_target) {
        throw DomainError("staircase: reversals_to_average out of range");
    }
    if (!(cfg.initial_offset_factor > 0.0)) {
        throw DomainError("staircase: initial offset factor must be positive");
    }
    if (!(cfg.step_factor > 1.0) || !(cfg.step_factor_floor > 1.0) ||
        cfg.step_factor_floor > cfg.step_factor) {
        throw DomainError("staircase: step factors must satisfy 1 < floor <= factor");
    }
}

StaircaseResult run_staircase(const SyntheticObserver& obs, const StaircaseConfig& cfg,
                              double k_lm, double k_s, double ecc_deg, Direction dir,
                              double rough_threshold_guess, std::uint64_t seed) {
    validate(cfg);
    if (!(rough_threshold_guess > 0.0)) {
        throw DomainError("staircase: rough threshold guess must be positive");
    }
    const double tau = obs.threshold(k_lm, k_s, ecc_deg, dir);
    std::mt19937_64 rng(derive_seed(seed, 0x737463u /* "stc" */));

    StaircaseResult res;
    double offset = rough_threshold_guess * cfg.initial_offset_factor;
    double factor = cfg.step_factor;
    int consecutive_correct = 0;
    int last_move = 0;  // +1 harder->easier (up), -1 easier->harder (down)
    std::vector<double> reversal_offsets;

    while (static_cast<int>(res.log.size()) < cfg.max_trials &&
           res.reversal_count < cfg.reversal_target) {
        StaircaseTrial trial;
        trial.offset = offset;
        trial.correct = trial_response(obs, tau, offset, rng);

        int move = 0;
        if (trial.correct) {
            if (++consecutive_correct == 2) {
                move = -1;
                consecutive_correct = 0;
            }
        } else {
            consecutive_correct = 0;
            move = +1;
        }

        if (move != 0) {
            if (last_move != 0 && move != last_move) {
                trial.reversal = true;
                ++res.reversal_count;
                reversal_offsets.push_back(offset);
                // anneal the step toward the floor after each reversal
                factor = cfg.step_factor_floor + 0.5 * (factor - cfg.step_factor_floor);
            }
            last_move = move;
            offset = move > 0 ? offset * factor : offset / factor;
        }
        res.log.push_back(trial);
    }

    res.converged = res.reversal_count >= cfg.reversal_target;
    if (!reversal_offsets.empty()) {
        const int take = std::min<int>(cfg.reversals_to_average,
                                       static_cast<int>(reversal_offsets.size()));
        double sum = 0.0;
        for (int i = 0; i < take; ++i) {
            sum += reversal_offsets[reversal_offsets.size() - 1 - i];
        }
        res.estimate = sum / take;
    } else {
        res.estimate = offset;  // never reversed: best available level
    }
    return res;
}

std::vector<RawThresholdRecord> generate_study(const std::vector<SyntheticObserver>& observers,
                                               const StudyDesign& design, std::uint64_t seed) {
    validate(design.staircase);
    std::vector<RawThresholdRecord> out;
    constexpr Direction kDirs[4] = {Direction::PosLm, Direction::NegLm, Direction::PosS,
                                    Direction::NegS};
    for (size_t o = 0; o < observers.size(); ++o) {
        for (size_t r = 0; r < design.references.size(); ++r) {
            for (size_t e = 0; e < design.eccentricities_deg.size(); ++e) {
                for (int d = 0; d < 4; ++d) {
                    const auto [k_lm, k_s] = design.references[r];
                    const double ecc = design.eccentricities_deg[e];
                    const auto sub_seed = derive_seed(seed, o, r * 64 + e, d);
                    const StaircaseResult sc =
                        run_staircase(observers[o], design.staircase, k_lm, k_s, ecc,
                                      kDirs[d], design.rough_threshold_guess, sub_seed);
                    RawThresholdRecord rec;
                    rec.participant = observers[o].id;
                    rec.direction = kDirs[d];
                    rec.ecc_deg = ecc;
                    rec.k_lm = k_lm;
                    rec.k_s = k_s;
                    rec.threshold = sc.estimate;
                    out.push_back(std::move(rec));
                }
            }
        }
    }
    return out;
}

namespace {

// Frozen standard-normal jitter keyed by the stimulus cell, so an observer's
// effective threshold is reproducible without generate_study carrying state.
double cell_noise(std::uint64_t noise_seed, std::uint64_t obs_idx, double k_lm, double k_s,
                  double ecc, Direction d) {
    std::uint64_t bits[3];
    std::memcpy(&bits[0], &k_lm, 8);
    std::memcpy(&bits[1], &k_s, 8);
    std::memcpy(&bits[2], &ecc, 8);
    std::uint64_t h = derive_seed(noise_seed, obs_idx, bits[0] ^ (bits[1] << 1),
                                  bits[2] ^ static_cast<std::uint64_t>(d));
    std::mt19937_64 rng(h);
    return normal01(rng);
}

double direction_asymmetry(Direction d) {
    switch (d) {
        case Direction::PosLm: return 1.10;
        case Direction::NegLm: return 0.95;
        case Direction::PosS: return 1.08;
        case Direction::NegS: return 0.96;
    }
    return 1.0;
}

}  // namespace

double bundled_true_threshold(double k_lm, double k_s, double ecc_deg, Direction d) {
    const double base = (d == Direction::PosLm || d == Direction::NegLm) ? 0.010 : 0.008;
    const double ecc_gain = 1.0 + 0.06 * (ecc_deg - 10.0);
    const double ref_gain = 1.0 + 0.8 * std::sqrt(k_lm * k_lm + k_s * k_s);
    return base * ecc_gain * ref_gain * direction_asymmetry(d);
}

BundledStudy bundled_study(std::uint64_t noise_seed) {
    BundledStudy study;
    const double multipliers[5] = {1.0, 1.06, 1.13, 1.21, 1.30};
    for (int o = 0; o < 5; ++o) {
        SyntheticObserver obs;
        char id[16];
        std::snprintf(id, sizeof(id), "obs%02d", o + 1);
        obs.id = id;
        const double mult = multipliers[o];
        const auto obs_idx = static_cast<std::uint64_t>(o);
        obs.threshold = [mult, obs_idx, noise_seed](double k_lm, double k_s, double ecc,
                                                    Direction d) {
            const double tau = mult * bundled_true_threshold(k_lm, k_s, ecc, d);
            const double jitter = 1.0 + 0.05 * cell_noise(noise_seed, obs_idx, k_lm, k_s, ecc, d);
            return tau * std::max(jitter, 0.5);
        };
        study.observers.push_back(std::move(obs));
    }
    study.design.references = {{0.0, 0.0},
                               {0.12, 0.015},
                               {-0.12, -0.015},
                               {0.06, -0.03},
                               {-0.06, 0.03}};
    study.design.eccentricities_deg = {10.0, 25.0, 35.0};
    study.design.rough_threshold_guess = 0.02;
    return study;
}

}  // namespace powershade
