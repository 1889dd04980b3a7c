#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace powershade {

/// One fitted threshold observation: reference-color contrasts, eccentricity,
/// and the measured ellipse semi-axes in contrast units.
struct ThresholdSample {
    double k_lm = 0.0;
    double k_s = 0.0;
    double ecc_deg = 0.0;
    double alpha_lm = 0.0;
    double alpha_s = 0.0;
};

/// Gaussian RBF network with a sigmoid output layer scaled by eta:
///   alpha = eta .* sigmoid( sum_j lambda_j * exp(-|u - c_j|^2 / (2 sigma_j^2)) + bias )
/// with u = (k_lm, k_s, ecc_deg). Output is strictly inside (0, eta).
/// The per-node biases of the formulation collapse to their sum, stored as
/// the single 2-vector `bias`.
struct RbfnnModel {
    std::vector<std::array<double, 3>> centers;   // N x (k_lm, k_s, ecc)
    std::vector<double> sigmas;                   // N, all > 0
    std::vector<std::array<double, 2>> weights;   // N x (lm, s) output weights
    std::array<double, 2> bias{0.0, 0.0};
    std::array<double, 2> eta{1.0, 1.0};          // positive output scale

    int node_count() const { return static_cast<int>(centers.size()); }
    void validate() const;  // throws DomainError on malformed parameters
};

/// eta per its defining rule: the componentwise max |kappa| over the sRGB
/// cube vertices, each against the D65 adaptation color at its own
/// luminance (the black vertex is degenerate and skipped).
std::array<double, 2> display_contrast_limit();

/// Predicted semi-axes (alpha_lm, alpha_s). Callers clamp eccentricity first.
std::array<double, 2> rbfnn_eval(const RbfnnModel& m, double k_lm, double k_s,
                                 double ecc_deg);

/// Analytic Jacobians of both outputs w.r.t. every trainable parameter and
/// the input point.
struct RbfnnGradient {
    // [k] indexes the output component: 0 = lm, 1 = s.
    std::array<std::vector<std::array<double, 3>>, 2> d_centers;  // N x 3 each
    std::array<std::vector<double>, 2> d_sigmas;                  // N each
    std::array<std::vector<double>, 2> d_weights;                 // d alpha_k / d lambda_{j,k}
    std::array<double, 2> d_bias{};                               // d alpha_k / d bias_k
    std::array<std::array<double, 3>, 2> d_input{};               // d alpha_k / d u
};
RbfnnGradient rbfnn_grad(const RbfnnModel& m, double k_lm, double k_s, double ecc_deg);

struct TrainConfig {
    int nodes = 5;
    int restarts = 32;
    int max_iters = 2000;
    double grad_tol = 1e-10;      // stop when the gradient norm falls below
    double initial_step = 0.05;
    std::uint64_t seed = 1;
};

struct TrainReport {
    double sse = 0.0;           // sum of squared residuals over both outputs
    double r_squared = 0.0;
    double adjusted_r_squared = 0.0;
    int best_restart = -1;
    std::vector<double> loss_history;  // accepted-step losses of the best restart
};

/// Full-batch gradient descent with backtracking on the least-squares loss,
/// restarted from `restarts` random initializations (centers sampled from the
/// training inputs, sigmas from the median pairwise distance, output layer
/// seeded by a linear solve in logit space). Returns the best model found.
RbfnnModel train_rbfnn(const std::vector<ThresholdSample>& data, const TrainConfig& cfg,
                       TrainReport* report = nullptr);

RbfnnModel load_threshold_model(const std::string& path);
void save_threshold_model(const RbfnnModel& m, const std::string& path);
std::string threshold_model_to_json(const RbfnnModel& m);
RbfnnModel threshold_model_from_json(const std::string& json_text);

}  // namespace powershade
