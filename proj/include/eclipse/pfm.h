#pragma once

#include <string>
#include <vector>

#include "eclipse/math.h"

namespace eclipse {

// Row-major RGB image, row 0 at the top. Values are linear radiance.
struct Image {
    int height = 0, width = 0;
    std::vector<Rgbd> pixels;

    Image() = default;
    Image(int h, int w) : height(h), width(w), pixels(static_cast<size_t>(h) * w) {}

    Rgbd& at(int i, int j) { return pixels[static_cast<size_t>(i) * width + j]; }
    const Rgbd& at(int i, int j) const { return pixels[static_cast<size_t>(i) * width + j]; }
};

// Portable float map, color variant ("PF"). Stored bottom-to-top, three
// 32-bit floats per pixel; a negative scale marks little-endian data.
void writePfm(const std::string& path, const Image& img);
Image readPfm(const std::string& path);

}  // namespace eclipse
