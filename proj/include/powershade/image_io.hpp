#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace powershade {

/// 8-bit RGB image, row-major, 3 bytes per pixel.
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    std::uint8_t* pixel(int x, int y) { return rgb.data() + 3 * (static_cast<size_t>(y) * width + x); }
    const std::uint8_t* pixel(int x, int y) const {
        return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
    }
};

/// Decodes a PNG (gray, palette, RGB, with or without alpha) to 8-bit RGB.
/// Throws ParseError on unreadable files.
Image8 read_png(const std::string& path);

/// Writes 8-bit RGB PNG with fixed settings (deterministic output).
void write_png(const Image8& img, const std::string& path);

}  // namespace powershade
