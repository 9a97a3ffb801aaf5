#include "eclipse/occluder.h"

#include <cmath>

#include "eclipse/error.h"
#include "eclipse/geometry.h"

namespace eclipse {

OccluderSet OccluderSet::createSh(ad::ParameterStore* store, std::vector<double> shellRadii,
                                  int degree, double bias) {
    ECLIPSE_REQUIRE(degree >= 0, "occluder degree must be non-negative");
    OccluderSet o;
    o.mode_ = Mode::SphericalHarmonic;
    o.shellRadii_ = std::move(shellRadii);
    o.degree_ = degree;
    o.bias_ = bias;
    o.basis_ = std::make_shared<SphericalHarmonicBasis>(degree);
    const int n = (degree + 1) * (degree + 1);
    for (int t = 0; t < o.frames(); ++t) {
        char name[48];
        std::snprintf(name, sizeof(name), "occluder.sh%d", t);
        o.coeffHandles_.push_back(store->registerArray(name, ad::ParamGroup::Occluder, {n}));
    }
    return o;
}

OccluderSet OccluderSet::createDirect(ad::ParameterStore* store, std::vector<double> shellRadii,
                                      int gridRows, int gridCols, double bias) {
    ECLIPSE_REQUIRE(gridRows > 0 && gridCols > 0, "occluder grid dims must be positive");
    OccluderSet o;
    o.mode_ = Mode::DirectGrid;
    o.shellRadii_ = std::move(shellRadii);
    o.gridRows_ = gridRows;
    o.gridCols_ = gridCols;
    o.bias_ = bias;
    for (int t = 0; t < o.frames(); ++t) {
        char name[48];
        std::snprintf(name, sizeof(name), "occluder.grid%d", t);
        o.coeffHandles_.push_back(
            store->registerArray(name, ad::ParamGroup::Occluder, {gridRows, gridCols}));
    }
    return o;
}

namespace {

// Bilinear logit lookup for the direct-grid mode (wraps azimuth, clamps rows).
struct GridTaps {
    size_t slot[4];
    double weight[4];
};

GridTaps gridTaps(size_t offset, int h, int w, const Vec3& dir) {
    double theta, phi;
    dirToSpherical(dir, &theta, &phi);
    const double y = theta / kPi * h - 0.5;
    const double x = phi / kTwoPi * w - 0.5;
    const double yf = std::floor(y);
    const double xf = std::floor(x);
    const double fy = y - yf;
    const double fx = x - xf;
    const int y0 = static_cast<int>(yf);
    const int y0c = std::clamp(y0, 0, h - 1);
    const int y1c = std::clamp(y0 + 1, 0, h - 1);
    int x0 = static_cast<int>(xf) % w;
    if (x0 < 0) x0 += w;
    const int x1 = (x0 + 1) % w;
    GridTaps t;
    t.slot[0] = offset + static_cast<size_t>(y0c) * w + x0;
    t.slot[1] = offset + static_cast<size_t>(y0c) * w + x1;
    t.slot[2] = offset + static_cast<size_t>(y1c) * w + x0;
    t.slot[3] = offset + static_cast<size_t>(y1c) * w + x1;
    t.weight[0] = (1 - fy) * (1 - fx);
    t.weight[1] = (1 - fy) * fx;
    t.weight[2] = fy * (1 - fx);
    t.weight[3] = fy * fx;
    return t;
}

thread_local std::vector<double> tlsBasis;

}  // namespace

double OccluderSet::maskAtShellDir(const ad::ParameterStore& store, int t, const Vec3& w) const {
    if (mode_ == Mode::SphericalHarmonic) {
        tlsBasis.resize(basis_->count());
        basis_->evalBasis(w, tlsBasis);
        const auto coeffs = store.array(coeffHandles_[t]);
        double acc = bias_;
        for (size_t i = 0; i < coeffs.size(); ++i) acc += coeffs[i] * tlsBasis[i];
        return sigmoid(acc);
    }
    const GridTaps taps = gridTaps(store.arrayInfo(coeffHandles_[t]).offset, gridRows_,
                                   gridCols_, w);
    double acc = bias_;
    for (int s = 0; s < 4; ++s) acc += taps.weight[s] * store.value(taps.slot[s]);
    return sigmoid(acc);
}

ad::Value OccluderSet::maskAtShellDir(ad::Tape* tape, const ad::ParameterStore& store, int t,
                                      const Vec3& w) const {
    if (mode_ == Mode::SphericalHarmonic) {
        tlsBasis.resize(basis_->count());
        basis_->evalBasis(w, tlsBasis);
        const size_t base = store.arrayInfo(coeffHandles_[t]).offset;
        ad::Value acc = tape->dotParams(store, base, tlsBasis);
        return ad::sigmoid(acc + bias_);
    }
    const GridTaps taps = gridTaps(store.arrayInfo(coeffHandles_[t]).offset, gridRows_,
                                   gridCols_, w);
    ad::Value acc = tape->dotParamsIndexed(store, {taps.slot, 4}, {taps.weight, 4});
    return ad::sigmoid(acc + bias_);
}

double OccluderSet::maskValue(const ad::ParameterStore& store, int t, const Vec3& x,
                              const Vec3& wi) const {
    return maskAtShellDir(store, t, shellIntersect(x, wi, shellRadii_[t]));
}

ad::Value OccluderSet::maskValue(ad::Tape* tape, const ad::ParameterStore& store, int t,
                                 const Vec3& x, const Vec3& wi) const {
    return maskAtShellDir(tape, store, t, shellIntersect(x, wi, shellRadii_[t]));
}

double OccluderSet::blockedEnergy(const ad::ParameterStore& store, int t,
                                  const EnvironmentPyramid& pyr, int quadRows,
                                  int quadCols) const {
    double acc = 0;
    for (int i = 0; i < quadRows; ++i) {
        const double theta = kPi * (i + 0.5) / quadRows;
        const double w = std::sin(theta) * (kPi / quadRows) * (kTwoPi / quadCols);
        for (int j = 0; j < quadCols; ++j) {
            const double phi = kTwoPi * (j + 0.5) / quadCols;
            const Vec3 dir = sphericalDir(theta, phi);
            const double m = maskAtShellDir(store, t, dir);
            acc += (1.0 - m) * luminance(pyr.eval(store, dir)) * w;
        }
    }
    return acc;
}

Image OccluderSet::toImage(const ad::ParameterStore& store, int t, int rows, int cols) const {
    Image img(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double theta = kPi * (i + 0.5) / rows;
            const double phi = kTwoPi * (j + 0.5) / cols;
            const double m = maskAtShellDir(store, t, sphericalDir(theta, phi));
            img.at(i, j) = Rgbd(m, m, m);
        }
    return img;
}

}  // namespace eclipse
