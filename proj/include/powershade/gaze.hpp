#pragma once

#include <cstdint>
#include <vector>

namespace powershade {

/// Viewing geometry for a flat image under a symmetric pinhole projection.
/// Pixel sample positions are the integer grid (i, j); the gaze point may be
/// fractional. Vertical FOV follows from the aspect ratio (square pixels).
struct GazeConfig {
    int width = 0;
    int height = 0;
    double fov_h_deg = 90.0;
    double gaze_x = 0.0;
    double gaze_y = 0.0;
};

void validate(const GazeConfig& cfg);

/// Retinal eccentricity in degrees of pixel position (px, py) relative to
/// the gaze direction: the angle between the two pinhole view rays.
double eccentricity_deg(const GazeConfig& cfg, double px, double py);

/// Row-major width*height map of eccentricity_deg at integer pixel coords.
std::vector<double> eccentricity_map(const GazeConfig& cfg);

/// cfg with gaze drawn uniformly over the pixel grid, deterministic per seed.
GazeConfig random_gaze(const GazeConfig& cfg_template, std::uint64_t seed);

}  // namespace powershade
