#include "powershade/perceptual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include "powershade/detail/csv.hpp"
#include "powershade/error.hpp"

namespace powershade {

using detail::next_row;
using detail::parse_double;
using detail::split_fields;
using detail::trim;

const char* to_string(Direction d) {
    switch (d) {
        case Direction::PosLm: return "+LM";
        case Direction::NegLm: return "-LM";
        case Direction::PosS: return "+S";
        case Direction::NegS: return "-S";
    }
    return "?";
}

Direction direction_from_string(const std::string& s) {
    if (s == "+LM") return Direction::PosLm;
    if (s == "-LM") return Direction::NegLm;
    if (s == "+S") return Direction::PosS;
    if (s == "-S") return Direction::NegS;
    throw ParseError("unknown direction '" + s + "' (expected +LM, -LM, +S, -S)");
}

std::vector<ThresholdSample> preprocess_thresholds(
    const std::vector<RawThresholdRecord>& records) {
    // Group by exact (k_lm, k_s, ecc). Generators and CSV round-trips
    // reproduce reference coordinates bit-exactly, so float keys are safe.
    using Key = std::tuple<double, double, double>;
    struct Group {
        // per-direction minima across all records (participants included);
        // min over participants of min(a+, a-) equals the plain min.
        std::array<double, 4> min_threshold{
            std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        std::array<int, 4> count{0, 0, 0, 0};
    };
    std::map<Key, Group> groups;
    for (const auto& r : records) {
        if (!(r.threshold > 0.0)) {
            throw DomainError("preprocess_thresholds: non-positive threshold for participant " +
                              r.participant);
        }
        if (r.ecc_deg < 0.0 || r.ecc_deg > 90.0) {
            throw DomainError("preprocess_thresholds: eccentricity out of [0, 90]");
        }
        auto& g = groups[{r.k_lm, r.k_s, r.ecc_deg}];
        const int d = static_cast<int>(r.direction);
        g.min_threshold[d] = std::min(g.min_threshold[d], r.threshold);
        g.count[d] += 1;
    }

    std::vector<ThresholdSample> out;
    out.reserve(groups.size());
    for (const auto& [key, g] : groups) {
        for (int d = 0; d < 4; ++d) {
            if (g.count[d] == 0) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "missing direction %s for reference (%g, %g) at %g deg",
                              to_string(static_cast<Direction>(d)), std::get<0>(key),
                              std::get<1>(key), std::get<2>(key));
                throw IncompleteDataError(buf);
            }
        }
        ThresholdSample s;
        s.k_lm = std::get<0>(key);
        s.k_s = std::get<1>(key);
        s.ecc_deg = std::get<2>(key);
        s.alpha_lm = std::min(g.min_threshold[static_cast<int>(Direction::PosLm)],
                              g.min_threshold[static_cast<int>(Direction::NegLm)]);
        s.alpha_s = std::min(g.min_threshold[static_cast<int>(Direction::PosS)],
                             g.min_threshold[static_cast<int>(Direction::NegS)]);
        out.push_back(s);
    }
    return out;
}

std::optional<double> clamp_eccentricity(double ecc_deg) {
    if (ecc_deg < 0.0) throw DomainError("clamp_eccentricity: negative eccentricity");
    if (ecc_deg < kEccentricityFloorDeg) return std::nullopt;
    return std::min(ecc_deg, kEccentricityCeilingDeg);
}

EllipseAxes ellipse_axes(const RbfnnModel& m, const Idkl& t, const Idkl& b,
                         double ecc_deg) {
    if (b.lm == 0.0 || b.s == 0.0) {
        throw DomainError("ellipse_axes: degenerate adaptation color");
    }
    const ContrastVec k = contrast(t, b);
    const auto alpha = rbfnn_eval(m, k.lm, k.s, ecc_deg);
    return {alpha[0] * std::abs(b.lm), alpha[1] * std::abs(b.s)};
}

double ellipse_eval(const Idkl& x, const Idkl& t, const EllipseAxes& a) {
    if (!(a.a_lm > 0.0) || !(a.a_s > 0.0)) {
        throw DomainError("ellipse_eval: semi-axes must be positive");
    }
    const double u = (x.lm - t.lm) / a.a_lm;
    const double v = (x.s - t.s) / a.a_s;
    return u * u + v * v - 1.0;
}

std::vector<RawThresholdRecord> read_raw_records_csv(std::istream& in) {
    std::vector<RawThresholdRecord> out;
    std::string line;
    int line_no = 0;
    if (!next_row(in, line, line_no)) throw ParseError("raw records: empty file");
    if (trim(line) != "participant,direction,ecc_deg,k_lm,k_s,threshold") {
        throw ParseError(
            "raw records line 1: expected header "
            "'participant,direction,ecc_deg,k_lm,k_s,threshold'");
    }
    while (next_row(in, line, line_no)) {
        const auto f = split_fields(line);
        if (f.size() != 6) {
            throw ParseError("raw records line " + std::to_string(line_no) +
                             ": expected 6 fields");
        }
        RawThresholdRecord r;
        r.participant = std::string(trim(f[0]));
        r.direction = direction_from_string(std::string(trim(f[1])));
        r.ecc_deg = parse_double(f[2], line_no, "ecc_deg");
        r.k_lm = parse_double(f[3], line_no, "k_lm");
        r.k_s = parse_double(f[4], line_no, "k_s");
        r.threshold = parse_double(f[5], line_no, "threshold");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RawThresholdRecord> read_raw_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open raw records: " + path);
    return read_raw_records_csv(in);
}

namespace {
void print_field(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}
}  // namespace

void write_raw_records_csv(std::ostream& out, const std::vector<RawThresholdRecord>& records) {
    out << "participant,direction,ecc_deg,k_lm,k_s,threshold\n";
    for (const auto& r : records) {
        out << r.participant << ',' << to_string(r.direction) << ',';
        print_field(out, r.ecc_deg);
        out << ',';
        print_field(out, r.k_lm);
        out << ',';
        print_field(out, r.k_s);
        out << ',';
        print_field(out, r.threshold);
        out << '\n';
    }
}

std::vector<ThresholdSample> read_samples_csv(std::istream& in) {
    std::vector<ThresholdSample> out;
    std::string line;
    int line_no = 0;
    if (!next_row(in, line, line_no)) throw ParseError("samples: empty file");
    if (trim(line) != "k_lm,k_s,ecc_deg,alpha_lm,alpha_s") {
        throw ParseError("samples line 1: expected header 'k_lm,k_s,ecc_deg,alpha_lm,alpha_s'");
    }
    while (next_row(in, line, line_no)) {
        const auto f = split_fields(line);
        if (f.size() != 5) {
            throw ParseError("samples line " + std::to_string(line_no) + ": expected 5 fields");
        }
        ThresholdSample s;
        s.k_lm = parse_double(f[0], line_no, "k_lm");
        s.k_s = parse_double(f[1], line_no, "k_s");
        s.ecc_deg = parse_double(f[2], line_no, "ecc_deg");
        s.alpha_lm = parse_double(f[3], line_no, "alpha_lm");
        s.alpha_s = parse_double(f[4], line_no, "alpha_s");
        out.push_back(s);
    }
    return out;
}

std::vector<ThresholdSample> read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open samples: " + path);
    return read_samples_csv(in);
}

void write_samples_csv(std::ostream& out, const std::vector<ThresholdSample>& samples) {
    out << "k_lm,k_s,ecc_deg,alpha_lm,alpha_s\n";
    for (const auto& s : samples) {
        print_field(out, s.k_lm);
        out << ',';
        print_field(out, s.k_s);
        out << ',';
        print_field(out, s.ecc_deg);
        out << ',';
        print_field(out, s.alpha_lm);
        out << ',';
        print_field(out, s.alpha_s);
        out << '\n';
    }
}

}  // namespace powershade
