#include "eclipse/envmap.h"

#include <algorithm>
#include <cmath>

#include "eclipse/error.h"

namespace eclipse {

namespace {

// Bilinear footprint on an equirectangular grid: 4 (row, col, weight) taps.
// Azimuth wraps, elevation clamps.
struct BilinearTaps {
    int row[4], col[4];
    double weight[4];
};

BilinearTaps bilinearTaps(int h, int w, const Vec3& dir) {
    double theta, phi;
    dirToSpherical(dir, &theta, &phi);
    const double y = theta / kPi * h - 0.5;
    const double x = phi / kTwoPi * w - 0.5;
    const double yf = std::floor(y);
    const double xf = std::floor(x);
    const double fy = y - yf;
    const double fx = x - xf;
    const int y0 = std::clamp(static_cast<int>(yf), -1, h - 1);
    const int y0c = std::max(y0, 0);
    const int y1c = std::min(y0 + 1, h - 1);
    int x0 = static_cast<int>(xf) % w;
    if (x0 < 0) x0 += w;
    const int x1 = (x0 + 1) % w;
    BilinearTaps t;
    t.row[0] = y0c; t.col[0] = x0; t.weight[0] = (1 - fy) * (1 - fx);
    t.row[1] = y0c; t.col[1] = x1; t.weight[1] = (1 - fy) * fx;
    t.row[2] = y1c; t.col[2] = x0; t.weight[2] = fy * (1 - fx);
    t.row[3] = y1c; t.col[3] = x1; t.weight[3] = fy * fx;
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// EnvironmentPyramid
// ---------------------------------------------------------------------------

EnvironmentPyramid EnvironmentPyramid::create(ad::ParameterStore* store, int rows, int cols,
                                              int levels, double base) {
    ECLIPSE_REQUIRE(rows > 0 && cols > 0 && levels > 0, "pyramid dims must be positive");
    EnvironmentPyramid p;
    p.rows_ = rows;
    p.cols_ = cols;
    p.base_ = base;
    for (int k = 0; k < levels; ++k) {
        const int down = 1 << (levels - 1 - k);
        const int h = (rows + down - 1) / down;
        const int w = (cols + down - 1) / down;
        p.levelDims_.push_back({h, w});
        char name[48];
        std::snprintf(name, sizeof(name), "env.level%d", k);
        p.levelHandles_.push_back(
            store->registerArray(name, ad::ParamGroup::Environment, {h, w, 3}));
    }
    return p;
}

Rgbd EnvironmentPyramid::eval(const ad::ParameterStore& store, const Vec3& w) const {
    double acc[3] = {0, 0, 0};
    double levelWeight = 1.0;
    for (int k = 0; k < levels(); ++k, levelWeight *= base_) {
        const auto [h, wd] = levelDims_[k];
        const BilinearTaps taps = bilinearTaps(h, wd, w);
        const std::span<const double> data = store.array(levelHandles_[k]);
        for (int c = 0; c < 3; ++c) {
            double v = 0;
            for (int s = 0; s < 4; ++s)
                v += taps.weight[s] * data[(static_cast<size_t>(taps.row[s]) * wd + taps.col[s]) * 3 + c];
            acc[c] += levelWeight * v;
        }
    }
    return {std::exp(acc[0]), std::exp(acc[1]), std::exp(acc[2])};
}

Rgb<ad::Value> EnvironmentPyramid::eval(ad::Tape* tape, const ad::ParameterStore& store,
                                        const Vec3& w) const {
    const int K = levels();
    // One fused gather per channel: 4 taps x K levels, coefficient =
    // bilinear weight * base^k.
    size_t slots[3][64];
    double coeffs[64];
    int n = 0;
    double levelWeight = 1.0;
    for (int k = 0; k < K; ++k, levelWeight *= base_) {
        const auto [h, wd] = levelDims_[k];
        const BilinearTaps taps = bilinearTaps(h, wd, w);
        const size_t offset = store.arrayInfo(levelHandles_[k]).offset;
        for (int s = 0; s < 4; ++s) {
            const size_t texel = offset + (static_cast<size_t>(taps.row[s]) * wd + taps.col[s]) * 3;
            coeffs[n] = levelWeight * taps.weight[s];
            slots[0][n] = texel;
            slots[1][n] = texel + 1;
            slots[2][n] = texel + 2;
            ++n;
        }
    }
    Rgb<ad::Value> out;
    for (int c = 0; c < 3; ++c) {
        ad::Value logv = tape->dotParamsIndexed(store, {slots[c], static_cast<size_t>(n)},
                                                {coeffs, static_cast<size_t>(n)});
        out[c] = ad::exp(logv);
    }
    return out;
}

Vec3 EnvironmentPyramid::texelCenterDir(int i, int j) const {
    const double theta = kPi * (i + 0.5) / rows_;
    const double phi = kTwoPi * (j + 0.5) / cols_;
    return sphericalDir(theta, phi);
}

Rgbd EnvironmentPyramid::texelCenterRadiance(const ad::ParameterStore& store, int i, int j) const {
    return eval(store, texelCenterDir(i, j));
}

void EnvironmentPyramid::setFromRadiance(ad::ParameterStore* store, const Image& img) const {
    ECLIPSE_REQUIRE(img.height == rows_ && img.width == cols_,
                    "setFromRadiance: image size must match the finest level");
    for (int k = 0; k < levels(); ++k) {
        auto data = store->array(levelHandles_[k]);
        std::fill(data.begin(), data.end(), 0.0);
    }
    const auto [h, w] = levelDims_.back();
    ECLIPSE_REQUIRE(h == rows_ && w == cols_, "finest level must equal the nominal size");
    auto fine = store->array(levelHandles_.back());
    const double invWeight = 1.0 / std::pow(base_, levels() - 1);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            for (int c = 0; c < 3; ++c) {
                const double v = img.at(i, j)[c];
                ECLIPSE_REQUIRE(v > 0, "setFromRadiance: radiance must be positive");
                fine[(static_cast<size_t>(i) * cols_ + j) * 3 + c] = std::log(v) * invWeight;
            }
}

Image EnvironmentPyramid::toImage(const ad::ParameterStore& store) const {
    Image img(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            img.at(i, j) = texelCenterRadiance(store, i, j);
    return img;
}

// ---------------------------------------------------------------------------
// EnvSamplingTable
// ---------------------------------------------------------------------------

EnvSamplingTable EnvSamplingTable::build(const EnvironmentPyramid& pyr,
                                         const ad::ParameterStore& store) {
    EnvSamplingTable t;
    t.rows_ = pyr.rows();
    t.cols_ = pyr.cols();
    t.mass_.resize(static_cast<size_t>(t.rows_) * t.cols_);
    double total = 0;
    for (int i = 0; i < t.rows_; ++i) {
        const double sinTheta = std::sin(kPi * (i + 0.5) / t.rows_);
        for (int j = 0; j < t.cols_; ++j) {
            const Rgbd L = pyr.texelCenterRadiance(store, i, j);
            const double m = (L.r + L.g + L.b) * sinTheta;
            t.mass_[static_cast<size_t>(i) * t.cols_ + j] = m;
            total += m;
        }
    }
    ECLIPSE_REQUIRE(total > 0, "sampling table: non-positive total mass");
    for (double& m : t.mass_) m /= total;

    t.rowCdf_.resize(t.rows_);
    t.condCdf_.resize(t.mass_.size());
    double acc = 0;
    for (int i = 0; i < t.rows_; ++i) {
        double rowAcc = 0;
        for (int j = 0; j < t.cols_; ++j) {
            rowAcc += t.mass_[static_cast<size_t>(i) * t.cols_ + j];
            t.condCdf_[static_cast<size_t>(i) * t.cols_ + j] = rowAcc;
        }
        // Normalize the conditional to end at exactly 1.
        if (rowAcc > 0)
            for (int j = 0; j < t.cols_; ++j)
                t.condCdf_[static_cast<size_t>(i) * t.cols_ + j] /= rowAcc;
        else
            for (int j = 0; j < t.cols_; ++j)
                t.condCdf_[static_cast<size_t>(i) * t.cols_ + j] = (j + 1.0) / t.cols_;
        acc += rowAcc;
        t.rowCdf_[i] = acc;
    }
    t.rowCdf_.back() = 1.0;
    return t;
}

double EnvSamplingTable::texelSolidAngle(int i) const {
    const double cosTop = std::cos(kPi * i / rows_);
    const double cosBot = std::cos(kPi * (i + 1) / rows_);
    return (kTwoPi / cols_) * (cosTop - cosBot);
}

EnvSamplingTable::Sample EnvSamplingTable::sample(double u, double v) const {
    // v picks the row, u picks the column; the residuals place the direction
    // uniformly in (phi, cos theta) over the texel footprint.
    const auto rowIt = std::upper_bound(rowCdf_.begin(), rowCdf_.end(), v);
    const int i = std::min(static_cast<int>(rowIt - rowCdf_.begin()), rows_ - 1);
    const double rowLo = i == 0 ? 0.0 : rowCdf_[i - 1];
    const double rowMass = rowCdf_[i] - rowLo;
    const double fv = rowMass > 0 ? std::clamp((v - rowLo) / rowMass, 0.0, 1.0) : 0.5;

    const double* cond = condCdf_.data() + static_cast<size_t>(i) * cols_;
    const auto colIt = std::upper_bound(cond, cond + cols_, u);
    const int j = std::min(static_cast<int>(colIt - cond), cols_ - 1);
    const double colLo = j == 0 ? 0.0 : cond[j - 1];
    const double colMass = cond[j] - colLo;
    const double fu = colMass > 0 ? std::clamp((u - colLo) / colMass, 0.0, 1.0) : 0.5;

    const double phi = kTwoPi * (j + fu) / cols_;
    const double cosTop = std::cos(kPi * i / rows_);
    const double cosBot = std::cos(kPi * (i + 1) / rows_);
    const double cosTheta = cosTop + fv * (cosBot - cosTop);
    const double sinTheta = std::sqrt(std::max(0.0, 1.0 - cosTheta * cosTheta));
    Vec3 dir{sinTheta * std::cos(phi), sinTheta * std::sin(phi), cosTheta};
    // Recomputing the pdf from the direction keeps sample() and pdf() exactly
    // consistent even when rounding tips the direction into a neighbor texel.
    return {dir, pdf(dir)};
}

double EnvSamplingTable::pdf(const Vec3& w) const {
    double theta, phi;
    dirToSpherical(w, &theta, &phi);
    int i = std::min(static_cast<int>(theta / kPi * rows_), rows_ - 1);
    int j = std::min(static_cast<int>(phi / kTwoPi * cols_), cols_ - 1);
    return mass(i, j) / texelSolidAngle(i);
}

}  // namespace eclipse
