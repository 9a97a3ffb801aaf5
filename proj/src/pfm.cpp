#include "eclipse/pfm.h"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "eclipse/error.h"

namespace eclipse {

namespace {

void byteswap4(char* p) {
    std::swap(p[0], p[3]);
    std::swap(p[1], p[2]);
}

}  // namespace

void writePfm(const std::string& path, const Image& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw RuntimeError("pfm: cannot open for writing: " + path);
    char header[64];
    std::snprintf(header, sizeof(header), "PF\n%d %d\n-1.0\n", img.width, img.height);
    f.write(header, static_cast<std::streamsize>(std::strlen(header)));
    std::vector<float> row(static_cast<size_t>(img.width) * 3);
    for (int i = img.height - 1; i >= 0; --i) {  // bottom-to-top
        for (int j = 0; j < img.width; ++j) {
            const Rgbd& c = img.at(i, j);
            row[3 * j + 0] = static_cast<float>(c.r);
            row[3 * j + 1] = static_cast<float>(c.g);
            row[3 * j + 2] = static_cast<float>(c.b);
        }
        f.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!f) throw RuntimeError("pfm: short write: " + path);
}

Image readPfm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw RuntimeError("pfm: cannot open: " + path);

    auto token = [&]() -> std::string {
        std::string t;
        f >> t;
        return t;
    };

    std::string magic = token();
    if (magic != "PF") throw RuntimeError("pfm: malformed header (expected PF): " + path);
    int w = 0, h = 0;
    double scale = 0;
    if (!(f >> w >> h >> scale) || w <= 0 || h <= 0 || scale == 0)
        throw RuntimeError("pfm: malformed header dimensions/scale: " + path);
    f.get();  // single whitespace after scale

    const bool littleEndian = scale < 0;
    Image img(h, w);
    std::vector<float> row(static_cast<size_t>(w) * 3);
    for (int i = h - 1; i >= 0; --i) {
        f.read(reinterpret_cast<char*>(row.data()),
               static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (f.gcount() != static_cast<std::streamsize>(row.size() * sizeof(float)))
            throw RuntimeError("pfm: short read: " + path);
        if (!littleEndian)
            for (size_t k = 0; k < row.size(); ++k)
                byteswap4(reinterpret_cast<char*>(&row[k]));
        for (int j = 0; j < w; ++j)
            img.at(i, j) = Rgbd(row[3 * j], row[3 * j + 1], row[3 * j + 2]);
    }
    return img;
}

}  // namespace eclipse
