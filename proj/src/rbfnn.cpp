#include "powershade/rbfnn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "powershade/colorspace.hpp"
#include "powershade/error.hpp"
#include "powershade/rng.hpp"

namespace powershade {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

void RbfnnModel::validate() const {
    const size_t n = centers.size();
    if (n == 0) throw DomainError("rbfnn: model has no nodes");
    if (sigmas.size() != n || weights.size() != n) {
        throw DomainError("rbfnn: inconsistent parameter shapes");
    }
    for (double s : sigmas) {
        if (!(s > 0.0)) throw DomainError("rbfnn: sigmas must be positive");
    }
    if (!(eta[0] > 0.0 && eta[1] > 0.0)) {
        throw DomainError("rbfnn: eta must be positive");
    }
}

std::array<double, 2> display_contrast_limit() {
    std::array<double, 2> limit{0.0, 0.0};
    for (int i = 0; i < 8; ++i) {
        const LinearRgb vertex{static_cast<double>((i >> 2) & 1),
                               static_cast<double>((i >> 1) & 1),
                               static_cast<double>(i & 1)};
        const Idkl t = linear_to_idkl(vertex);
        if (t.lum <= 0.0) continue;  // black: degenerate adaptation
        const ContrastVec k = contrast(t, adaptation_for(t));
        limit[0] = std::max(limit[0], std::abs(k.lm));
        limit[1] = std::max(limit[1], std::abs(k.s));
    }
    return limit;
}

std::array<double, 2> rbfnn_eval(const RbfnnModel& m, double k_lm, double k_s,
                                 double ecc_deg) {
    const int n = m.node_count();
    double z0 = m.bias[0], z1 = m.bias[1];
    for (int j = 0; j < n; ++j) {
        const double d0 = k_lm - m.centers[j][0];
        const double d1 = k_s - m.centers[j][1];
        const double d2 = ecc_deg - m.centers[j][2];
        const double d2sum = d0 * d0 + d1 * d1 + d2 * d2;
        const double rho = std::exp(-d2sum / (2.0 * m.sigmas[j] * m.sigmas[j]));
        z0 += m.weights[j][0] * rho;
        z1 += m.weights[j][1] * rho;
    }
    return {m.eta[0] * sigmoid(z0), m.eta[1] * sigmoid(z1)};
}

RbfnnGradient rbfnn_grad(const RbfnnModel& m, double k_lm, double k_s, double ecc_deg) {
    const int n = m.node_count();
    const std::array<double, 3> u{k_lm, k_s, ecc_deg};

    std::vector<double> rho(n);
    std::vector<std::array<double, 3>> diff(n);
    std::array<double, 2> z{m.bias[0], m.bias[1]};
    for (int j = 0; j < n; ++j) {
        for (int d = 0; d < 3; ++d) diff[j][d] = u[d] - m.centers[j][d];
        const double d2 = diff[j][0] * diff[j][0] + diff[j][1] * diff[j][1] +
                          diff[j][2] * diff[j][2];
        rho[j] = std::exp(-d2 / (2.0 * m.sigmas[j] * m.sigmas[j]));
        z[0] += m.weights[j][0] * rho[j];
        z[1] += m.weights[j][1] * rho[j];
    }

    RbfnnGradient g;
    for (int k = 0; k < 2; ++k) {
        const double s = sigmoid(z[k]);
        const double outer = m.eta[k] * s * (1.0 - s);  // d alpha_k / d z_k
        g.d_bias[k] = outer;
        g.d_weights[k].resize(n);
        g.d_sigmas[k].resize(n);
        g.d_centers[k].assign(n, {0.0, 0.0, 0.0});
        g.d_input[k] = {0.0, 0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            const double sig = m.sigmas[j];
            const double lam = m.weights[j][k];
            g.d_weights[k][j] = outer * rho[j];
            const double d2 = diff[j][0] * diff[j][0] + diff[j][1] * diff[j][1] +
                              diff[j][2] * diff[j][2];
            g.d_sigmas[k][j] = outer * lam * rho[j] * d2 / (sig * sig * sig);
            const double common = outer * lam * rho[j] / (sig * sig);
            for (int d = 0; d < 3; ++d) {
                g.d_centers[k][j][d] = common * diff[j][d];
                g.d_input[k][d] += -common * diff[j][d];
            }
        }
    }
    return g;
}

namespace {

// Flat parameter layout for the optimizer: centers (N*3), log-sigmas (N),
// weights (N*2), bias (2). Sigmas are optimized in log space so positivity
// is structural.
struct Packed {
    int n = 0;
    Eigen::VectorXd theta;

    static Packed from_model(const RbfnnModel& m) {
        Packed p;
        p.n = m.node_count();
        p.theta.resize(6 * p.n + 2);
        int at = 0;
        for (int j = 0; j < p.n; ++j)
            for (int d = 0; d < 3; ++d) p.theta(at++) = m.centers[j][d];
        for (int j = 0; j < p.n; ++j) p.theta(at++) = std::log(m.sigmas[j]);
        for (int j = 0; j < p.n; ++j)
            for (int k = 0; k < 2; ++k) p.theta(at++) = m.weights[j][k];
        p.theta(at++) = m.bias[0];
        p.theta(at++) = m.bias[1];
        return p;
    }

    void write_into(RbfnnModel& m) const {
        int at = 0;
        m.centers.resize(n);
        m.sigmas.resize(n);
        m.weights.resize(n);
        for (int j = 0; j < n; ++j)
            for (int d = 0; d < 3; ++d) m.centers[j][d] = theta(at++);
        for (int j = 0; j < n; ++j) m.sigmas[j] = std::exp(theta(at++));
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < 2; ++k) m.weights[j][k] = theta(at++);
        m.bias[0] = theta(at++);
        m.bias[1] = theta(at++);
    }
};

double sse_loss(const RbfnnModel& m, const std::vector<ThresholdSample>& data) {
    double sse = 0.0;
    for (const auto& s : data) {
        const auto pred = rbfnn_eval(m, s.k_lm, s.k_s, s.ecc_deg);
        const double r0 = pred[0] - s.alpha_lm;
        const double r1 = pred[1] - s.alpha_s;
        sse += r0 * r0 + r1 * r1;
    }
    return sse;
}

// Fused loss gradient in the packed layout (sigma entries are d/d log-sigma).
// Inlines the per-sample Jacobian to avoid allocating RbfnnGradient in the
// training hot loop.
Eigen::VectorXd sse_gradient(const RbfnnModel& m, const std::vector<ThresholdSample>& data,
                             std::vector<double>& rho_buf,
                             std::vector<std::array<double, 3>>& diff_buf) {
    const int n = m.node_count();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(6 * n + 2);
    rho_buf.resize(n);
    diff_buf.resize(n);
    for (const auto& s : data) {
        const std::array<double, 3> u{s.k_lm, s.k_s, s.ecc_deg};
        std::array<double, 2> z{m.bias[0], m.bias[1]};
        for (int j = 0; j < n; ++j) {
            for (int d = 0; d < 3; ++d) diff_buf[j][d] = u[d] - m.centers[j][d];
            const double d2 = diff_buf[j][0] * diff_buf[j][0] +
                              diff_buf[j][1] * diff_buf[j][1] +
                              diff_buf[j][2] * diff_buf[j][2];
            rho_buf[j] = std::exp(-d2 / (2.0 * m.sigmas[j] * m.sigmas[j]));
            z[0] += m.weights[j][0] * rho_buf[j];
            z[1] += m.weights[j][1] * rho_buf[j];
        }
        const std::array<double, 2> target{s.alpha_lm, s.alpha_s};
        for (int k = 0; k < 2; ++k) {
            const double sk = sigmoid(z[k]);
            const double pred = m.eta[k] * sk;
            const double outer = 2.0 * (pred - target[k]) * m.eta[k] * sk * (1.0 - sk);
            g(6 * n + k) += outer;
            for (int j = 0; j < n; ++j) {
                const double sig = m.sigmas[j];
                const double lam = m.weights[j][k];
                g(4 * n + 2 * j + k) += outer * rho_buf[j];
                const double d2 = diff_buf[j][0] * diff_buf[j][0] +
                                  diff_buf[j][1] * diff_buf[j][1] +
                                  diff_buf[j][2] * diff_buf[j][2];
                // d/d log-sigma = sigma * d/d sigma
                g(3 * n + j) += outer * lam * rho_buf[j] * d2 / (sig * sig);
                const double common = outer * lam * rho_buf[j] / (sig * sig);
                for (int d = 0; d < 3; ++d) {
                    g(3 * j + d) += common * diff_buf[j][d];
                }
            }
        }
    }
    return g;
}

double median_pairwise_distance(const std::vector<ThresholdSample>& data) {
    std::vector<double> dists;
    dists.reserve(data.size() * (data.size() - 1) / 2);
    for (size_t i = 0; i < data.size(); ++i) {
        for (size_t j = i + 1; j < data.size(); ++j) {
            const double d0 = data[i].k_lm - data[j].k_lm;
            const double d1 = data[i].k_s - data[j].k_s;
            const double d2 = data[i].ecc_deg - data[j].ecc_deg;
            dists.push_back(std::sqrt(d0 * d0 + d1 * d1 + d2 * d2));
        }
    }
    std::sort(dists.begin(), dists.end());
    return dists.empty() ? 1.0 : dists[dists.size() / 2];
}

// Linear least squares for the output layer in logit space, centers and
// sigmas held fixed. Good starting point; the true loss is then refined by
// gradient descent.
void solve_output_layer(RbfnnModel& m, const std::vector<ThresholdSample>& data) {
    const int n = m.node_count();
    const auto rows = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd design(rows, n + 1);
    Eigen::MatrixXd target(rows, 2);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& s = data[i];
        for (int j = 0; j < n; ++j) {
            const double d0 = s.k_lm - m.centers[j][0];
            const double d1 = s.k_s - m.centers[j][1];
            const double d2 = s.ecc_deg - m.centers[j][2];
            design(i, j) = std::exp(-(d0 * d0 + d1 * d1 + d2 * d2) /
                                    (2.0 * m.sigmas[j] * m.sigmas[j]));
        }
        design(i, n) = 1.0;
        const double y0 = std::clamp(s.alpha_lm / m.eta[0], 1e-4, 1.0 - 1e-4);
        const double y1 = std::clamp(s.alpha_s / m.eta[1], 1e-4, 1.0 - 1e-4);
        target(i, 0) = logit(y0);
        target(i, 1) = logit(y1);
    }
    const Eigen::MatrixXd sol = design.colPivHouseholderQr().solve(target);
    for (int j = 0; j < n; ++j) {
        m.weights[j][0] = sol(j, 0);
        m.weights[j][1] = sol(j, 1);
    }
    m.bias[0] = sol(n, 0);
    m.bias[1] = sol(n, 1);
}

}  // namespace

RbfnnModel train_rbfnn(const std::vector<ThresholdSample>& data, const TrainConfig& cfg,
                       TrainReport* report) {
    if (cfg.nodes < 1) throw DomainError("train_rbfnn: nodes must be >= 1");
    if (static_cast<int>(data.size()) < cfg.nodes + 1) {
        throw FitError("train_rbfnn: need at least nodes+1 samples, got " +
                       std::to_string(data.size()));
    }
    bool all_same = true;
    for (const auto& s : data) {
        if (s.k_lm != data[0].k_lm || s.k_s != data[0].k_s || s.ecc_deg != data[0].ecc_deg) {
            all_same = false;
            break;
        }
    }
    if (all_same) {
        throw FitError("train_rbfnn: degenerate data, all inputs identical");
    }

    const std::array<double, 2> eta = display_contrast_limit();
    const double med_dist = std::max(median_pairwise_distance(data), 1e-6);

    RbfnnModel best;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> best_history;
    int best_restart = -1;

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 0x726266u /* "rbf" */, restart));

        RbfnnModel m;
        m.eta = eta;
        m.centers.resize(cfg.nodes);
        m.sigmas.resize(cfg.nodes);
        m.weights.assign(cfg.nodes, {0.0, 0.0});

        // Centers: sample distinct training inputs, lightly jittered.
        std::vector<size_t> idx(data.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        for (int j = 0; j < cfg.nodes; ++j) {
            const size_t pick = j + uniform_below(rng, idx.size() - j);
            std::swap(idx[j], idx[pick]);
            const auto& s = data[idx[j]];
            m.centers[j] = {s.k_lm + 0.05 * med_dist * normal01(rng),
                            s.k_s + 0.05 * med_dist * normal01(rng),
                            s.ecc_deg + 0.05 * med_dist * normal01(rng)};
        }
        for (int j = 0; j < cfg.nodes; ++j) {
            m.sigmas[j] = med_dist * (0.5 + uniform01(rng));
        }
        solve_output_layer(m, data);

        // Backtracking gradient descent on the full parameter vector.
        Packed p = Packed::from_model(m);
        double loss = sse_loss(m, data);
        double step = cfg.initial_step;
        std::vector<double> history{loss};
        std::vector<double> rho_buf;
        std::vector<std::array<double, 3>> diff_buf;
        for (int it = 0; it < cfg.max_iters; ++it) {
            const Eigen::VectorXd g = sse_gradient(m, data, rho_buf, diff_buf);
            const double gnorm = g.norm();
            if (gnorm < cfg.grad_tol) break;
            bool accepted = false;
            for (int bt = 0; bt < 48; ++bt) {
                Packed trial = p;
                trial.theta -= step * g;
                RbfnnModel tm = m;
                trial.write_into(tm);
                const double tl = sse_loss(tm, data);
                if (tl < loss) {
                    p = trial;
                    m = tm;
                    loss = tl;
                    history.push_back(loss);
                    step *= 1.3;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;  // no descent direction at machine precision
        }

        if (loss < best_loss) {
            best_loss = loss;
            best = m;
            best_history = std::move(history);
            best_restart = restart;
        }
    }

    if (report) {
        report->sse = best_loss;
        report->best_restart = best_restart;
        report->loss_history = std::move(best_history);
        double mean0 = 0.0, mean1 = 0.0;
        for (const auto& s : data) {
            mean0 += s.alpha_lm;
            mean1 += s.alpha_s;
        }
        mean0 /= static_cast<double>(data.size());
        mean1 /= static_cast<double>(data.size());
        double ss_tot = 0.0;
        for (const auto& s : data) {
            ss_tot += (s.alpha_lm - mean0) * (s.alpha_lm - mean0);
            ss_tot += (s.alpha_s - mean1) * (s.alpha_s - mean1);
        }
        report->r_squared = ss_tot > 0.0 ? 1.0 - best_loss / ss_tot
                                         : std::numeric_limits<double>::quiet_NaN();
        // Adjusted for the 3 input features, pooled over both outputs.
        const double n_obs = 2.0 * static_cast<double>(data.size());
        const double denom = n_obs - 3.0 - 1.0;
        report->adjusted_r_squared =
            denom > 0.0 ? 1.0 - (1.0 - report->r_squared) * (n_obs - 1.0) / denom
                        : std::numeric_limits<double>::quiet_NaN();
    }
    return best;
}

std::string threshold_model_to_json(const RbfnnModel& m) {
    nlohmann::json j;
    j["type"] = "rbfnn";
    j["nodes"] = m.node_count();
    j["centers"] = m.centers;
    j["sigmas"] = m.sigmas;
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    j["eta"] = m.eta;
    return j.dump(2) + "\n";
}

RbfnnModel threshold_model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("threshold model JSON: ") + e.what());
    }
    try {
        if (j.at("type").get<std::string>() != "rbfnn") {
            throw ParseError("threshold model JSON: wrong 'type'");
        }
        RbfnnModel m;
        m.centers = j.at("centers").get<std::vector<std::array<double, 3>>>();
        m.sigmas = j.at("sigmas").get<std::vector<double>>();
        m.weights = j.at("weights").get<std::vector<std::array<double, 2>>>();
        m.bias = j.at("bias").get<std::array<double, 2>>();
        m.eta = j.at("eta").get<std::array<double, 2>>();
        if (j.at("nodes").get<int>() != m.node_count()) {
            throw ParseError("threshold model JSON: 'nodes' disagrees with parameter shapes");
        }
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("threshold model JSON: ") + e.what());
    }
}

RbfnnModel load_threshold_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open threshold model: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return threshold_model_from_json(ss.str());
}

void save_threshold_model(const RbfnnModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write threshold model: " + path);
    out << threshold_model_to_json(m);
}

}  // namespace powershade
