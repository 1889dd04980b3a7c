#include "powershade/power.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "powershade/detail/csv.hpp"
#include "powershade/error.hpp"
#include "powershade/rng.hpp"

namespace powershade {

using detail::next_row;
using detail::parse_double;
using detail::split_fields;
using detail::trim;

PowerTrace parse_power_trace(std::istream& trace_csv, std::istream& segments_csv) {
    PowerTrace trace;
    std::string line;
    int line_no = 0;
    if (!next_row(trace_csv, line, line_no)) {
        throw ParseError("trace: empty file");
    }
    if (trim(line) != "t_seconds,watts") {
        throw ParseError("trace line 1: expected header 't_seconds,watts'");
    }
    while (next_row(trace_csv, line, line_no)) {
        const auto fields = split_fields(line);
        if (fields.size() != 2) {
            throw ParseError("trace line " + std::to_string(line_no) + ": expected 2 fields");
        }
        const double t = parse_double(fields[0], line_no, "t_seconds");
        const double w = parse_double(fields[1], line_no, "watts");
        if (!std::isfinite(t) || !std::isfinite(w)) {
            throw ParseError("trace line " + std::to_string(line_no) + ": non-finite value");
        }
        if (!trace.t_seconds.empty() && t <= trace.t_seconds.back()) {
            throw ParseError("trace line " + std::to_string(line_no) +
                             ": timestamps must be strictly increasing");
        }
        trace.t_seconds.push_back(t);
        trace.watts.push_back(w);
    }

    line_no = 0;
    if (!next_row(segments_csv, line, line_no)) {
        throw ParseError("segments: empty file");
    }
    if (trim(line) != "r,g,b,start_s,end_s") {
        throw ParseError("segments line 1: expected header 'r,g,b,start_s,end_s'");
    }
    while (next_row(segments_csv, line, line_no)) {
        const auto fields = split_fields(line);
        if (fields.size() != 5) {
            throw ParseError("segments line " + std::to_string(line_no) + ": expected 5 fields");
        }
        TraceSegment seg;
        seg.color.r = parse_double(fields[0], line_no, "r");
        seg.color.g = parse_double(fields[1], line_no, "g");
        seg.color.b = parse_double(fields[2], line_no, "b");
        seg.start_s = parse_double(fields[3], line_no, "start_s");
        seg.end_s = parse_double(fields[4], line_no, "end_s");
        if (seg.end_s < seg.start_s) {
            throw ParseError("segments line " + std::to_string(line_no) + ": end_s < start_s");
        }
        trace.segments.push_back(seg);
    }
    return trace;
}

PowerTrace parse_power_trace_files(const std::string& trace_path,
                                   const std::string& segments_path) {
    std::ifstream trace_in(trace_path);
    if (!trace_in) throw ParseError("cannot open trace file: " + trace_path);
    std::ifstream seg_in(segments_path);
    if (!seg_in) throw ParseError("cannot open segments file: " + segments_path);
    return parse_power_trace(trace_in, seg_in);
}

std::vector<PowerSample> trace_to_samples(const PowerTrace& trace) {
    std::vector<PowerSample> samples;
    samples.reserve(trace.segments.size());
    for (size_t s = 0; s < trace.segments.size(); ++s) {
        const auto& seg = trace.segments[s];
        double sum = 0.0;
        int n = 0;
        for (size_t i = 0; i < trace.t_seconds.size(); ++i) {
            if (trace.t_seconds[i] >= seg.start_s && trace.t_seconds[i] <= seg.end_s) {
                sum += trace.watts[i];
                ++n;
            }
        }
        if (n == 0) {
            throw DomainError("trace segment " + std::to_string(s) + " has no readings");
        }
        samples.push_back({seg.color, sum / n});
    }
    return samples;
}

std::vector<LinearRgb> sample_palette(int n, std::uint64_t seed) {
    if (n < 8) throw DomainError("sample_palette: n must be >= 8");
    std::vector<LinearRgb> out;
    out.reserve(n);
    for (int i = 0; i < 8; ++i) {
        out.push_back({static_cast<double>((i >> 2) & 1), static_cast<double>((i >> 1) & 1),
                       static_cast<double>(i & 1)});
    }
    std::mt19937_64 rng(derive_seed(seed, 0x70616cu /* "pal" */));
    for (int i = 8; i < n; ++i) {
        out.push_back({uniform01(rng), uniform01(rng), uniform01(rng)});
    }
    return out;
}

PowerModel fit_power_model(const std::vector<PowerSample>& samples, PowerFitReport* report) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    if (n < 5) {
        throw FitError("fit_power_model: need at least 5 samples, got " + std::to_string(n));
    }
    Eigen::MatrixXd design(n, 4);
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[i];
        design(i, 0) = s.color.r;
        design(i, 1) = s.color.g;
        design(i, 2) = s.color.b;
        design(i, 3) = 1.0;
        target(i) = s.watts;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4) {
        throw FitError("fit_power_model: rank-deficient design (rank " +
                       std::to_string(qr.rank()) + ")");
    }
    const Eigen::Vector4d beta = qr.solve(target);
    PowerModel m;
    m.p_srgb = {beta(0), beta(1), beta(2)};
    m.p_circ = beta(3);
    if (report) {
        double sum_rel = 0.0, max_rel = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double pred = predict_power(m, samples[i].color);
            const double rel = std::abs(pred - samples[i].watts) / samples[i].watts;
            sum_rel += rel;
            max_rel = std::max(max_rel, rel);
        }
        report->mean_relative_error = sum_rel / static_cast<double>(n);
        report->max_relative_error = max_rel;
        report->sample_count = static_cast<int>(n);
    }
    return m;
}

double predict_power(const PowerModel& m, const LinearRgb& c) {
    return m.p_srgb[0] * c.r + m.p_srgb[1] * c.g + m.p_srgb[2] * c.b + m.p_circ;
}

double dynamic_power(const PowerModel& m, const LinearRgb& c) {
    return m.p_srgb[0] * c.r + m.p_srgb[1] * c.g + m.p_srgb[2] * c.b;
}

double image_power(const PowerModel& m, const std::vector<LinearRgb>& pixels) {
    if (pixels.empty()) throw DomainError("image_power: empty image");
    double sr = 0.0, sg = 0.0, sb = 0.0;
    for (const auto& p : pixels) {
        sr += p.r;
        sg += p.g;
        sb += p.b;
    }
    const double n = static_cast<double>(pixels.size());
    return predict_power(m, {sr / n, sg / n, sb / n});
}

std::array<double, 3> power_gradient_idkl(const PowerModel& m) {
    const auto& M = constants::kIdklToSrgb;
    std::array<double, 3> q{};
    for (int j = 0; j < 3; ++j) {
        q[j] = m.p_srgb[0] * M[0][j] + m.p_srgb[1] * M[1][j] + m.p_srgb[2] * M[2][j];
    }
    return q;
}

std::string power_model_to_json(const PowerModel& m) {
    nlohmann::json j;
    j["type"] = "power";
    j["p_srgb"] = m.p_srgb;
    j["p_circ"] = m.p_circ;
    return j.dump(2) + "\n";
}

PowerModel power_model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("power model JSON: ") + e.what());
    }
    try {
        if (j.at("type").get<std::string>() != "power") {
            throw ParseError("power model JSON: wrong 'type'");
        }
        PowerModel m;
        const auto p = j.at("p_srgb");
        if (!p.is_array() || p.size() != 3) {
            throw ParseError("power model JSON: p_srgb must have 3 entries");
        }
        for (int i = 0; i < 3; ++i) m.p_srgb[i] = p[i].get<double>();
        m.p_circ = j.at("p_circ").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("power model JSON: ") + e.what());
    }
}

PowerModel load_power_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open power model: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return power_model_from_json(ss.str());
}

void save_power_model(const PowerModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write power model: " + path);
    out << power_model_to_json(m);
}

}  // namespace powershade
