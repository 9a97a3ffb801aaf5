#pragma once

#include <memory>
#include <vector>

#include "eclipse/autodiff.h"
#include "eclipse/envmap.h"
#include "eclipse/math.h"
#include "eclipse/sh.h"

namespace eclipse {

// Per-frame transmission masks on origin-centered shells of radius r_t (the
// camera radial distance of frame t). A mask value near 1 transmits, near 0
// blocks. Two parameterizations share the interface: a spherical-harmonic
// coefficient vector through a sigmoid, and (as an ablation) a direct
// equirectangular grid of pre-sigmoid logits, bilinearly interpolated.
class OccluderSet {
 public:
    enum class Mode { SphericalHarmonic, DirectGrid };

    static OccluderSet createSh(ad::ParameterStore* store, std::vector<double> shellRadii,
                                int degree = 24, double bias = 100.0);
    static OccluderSet createDirect(ad::ParameterStore* store, std::vector<double> shellRadii,
                                    int gridRows, int gridCols, double bias = 100.0);

    int frames() const { return static_cast<int>(shellRadii_.size()); }
    double shellRadius(int t) const { return shellRadii_[t]; }
    int degree() const { return degree_; }
    double bias() const { return bias_; }
    Mode mode() const { return mode_; }
    size_t coeffHandle(int t) const { return coeffHandles_[t]; }
    const SphericalHarmonicBasis& basis() const { return *basis_; }

    // Mask at a shell point (unit direction w on the shell of frame t).
    double maskAtShellDir(const ad::ParameterStore& store, int t, const Vec3& w) const;
    ad::Value maskAtShellDir(ad::Tape* tape, const ad::ParameterStore& store, int t,
                             const Vec3& w) const;

    // Mask for the shadow ray (x, wi): evaluates at the shell intersection.
    // Requires |x| < r_t. The shell point itself carries no gradient.
    double maskValue(const ad::ParameterStore& store, int t, const Vec3& x, const Vec3& wi) const;
    ad::Value maskValue(ad::Tape* tape, const ad::ParameterStore& store, int t, const Vec3& x,
                        const Vec3& wi) const;

    // Integral of (1 - mask) * luminance(env) over the sphere by fixed-grid
    // quadrature; the light energy the frame-t occluder removes.
    double blockedEnergy(const ad::ParameterStore& store, int t, const EnvironmentPyramid& pyr,
                         int quadRows = 64, int quadCols = 128) const;

    // Mask rasterized at equirectangular texel centers (visualization/metrics).
    Image toImage(const ad::ParameterStore& store, int t, int rows, int cols) const;

 private:
    Mode mode_ = Mode::SphericalHarmonic;
    std::vector<double> shellRadii_;
    int degree_ = 24;
    int gridRows_ = 0, gridCols_ = 0;
    double bias_ = 100.0;
    std::vector<size_t> coeffHandles_;  // one array per frame
    std::shared_ptr<SphericalHarmonicBasis> basis_;
};

// Analytic spherical-cap blocker used to synthesize datasets: blocks shell
// directions within `angle` of `center`. Binary and parameter-free.
struct CapOccluder {
    Vec3 center;   // unit
    double angle;  // radians

    double maskAtShellDir(const Vec3& w) const {
        return dot(w, center) > std::cos(angle) ? 0.0 : 1.0;
    }
};

}  // namespace eclipse
