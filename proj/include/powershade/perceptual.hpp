#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "powershade/colorspace.hpp"
#include "powershade/rbfnn.hpp"

namespace powershade {

/// Approach direction of a staircase along the two chromatic axes.
enum class Direction { PosLm, NegLm, PosS, NegS };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// One staircase outcome: the discrimination threshold measured for one
/// participant, reference color, eccentricity, and direction.
struct RawThresholdRecord {
    std::string participant;
    Direction direction = Direction::PosLm;
    double ecc_deg = 0.0;
    double k_lm = 0.0;  // reference-color contrast coordinates
    double k_s = 0.0;
    double threshold = 0.0;  // contrast units, > 0
};

/// Conservative study reduction: per axis the narrower of the two opposing
/// thresholds, then the smallest across participants. One sample per
/// (reference color, eccentricity). Throws IncompleteDataError naming any
/// (reference, eccentricity, direction) with no records.
std::vector<ThresholdSample> preprocess_thresholds(
    const std::vector<RawThresholdRecord>& records);

/// Modulation eccentricity policy: below 10 degrees returns nullopt (no
/// modulation), above 35 clamps to 35. Negative input throws DomainError.
std::optional<double> clamp_eccentricity(double ecc_deg);
inline constexpr double kEccentricityFloorDeg = 10.0;
inline constexpr double kEccentricityCeilingDeg = 35.0;

/// Discrimination ellipse semi-axes in absolute i-DKL units.
struct EllipseAxes {
    double a_lm = 0.0;
    double a_s = 0.0;
};

/// a_i = Phi_i(kappa(t; b), ecc) * |b_i|. Throws DomainError when the
/// adaptation chromatic coordinates are zero (contrast undefined).
EllipseAxes ellipse_axes(const RbfnnModel& m, const Idkl& t, const Idkl& b,
                         double ecc_deg);

/// Ellipse level-set value in the equi-luminant plane: negative inside,
/// zero on the boundary, positive outside. Throws DomainError on a
/// non-positive axis.
double ellipse_eval(const Idkl& x, const Idkl& t, const EllipseAxes& a);

// CSV formats (documented in the README):
//   raw records:      participant,direction,ecc_deg,k_lm,k_s,threshold
//   processed samples: k_lm,k_s,ecc_deg,alpha_lm,alpha_s
std::vector<RawThresholdRecord> read_raw_records_csv(std::istream& in);
std::vector<RawThresholdRecord> read_raw_records_file(const std::string& path);
void write_raw_records_csv(std::ostream& out, const std::vector<RawThresholdRecord>& records);
std::vector<ThresholdSample> read_samples_csv(std::istream& in);
std::vector<ThresholdSample> read_samples_file(const std::string& path);
void write_samples_csv(std::ostream& out, const std::vector<ThresholdSample>& samples);

}  // namespace powershade
