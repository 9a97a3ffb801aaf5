#pragma once

#include <array>
#include <vector>

#include "eclipse/autodiff.h"
#include "eclipse/math.h"
#include "eclipse/pfm.h"

namespace eclipse {

// Equirectangular mapping shared by every grid here: row i covers elevation
// theta in [pi*i/H, pi*(i+1)/H) measured from +z, column j covers azimuth
// phi in [2pi*j/W, 2pi*(j+1)/W) from +x. Texel centers sit at (i+0.5, j+0.5).

// Far-field radiance as exp of a coarse-to-fine sum of bilinear grids. Level k
// has weight base^k; level k grid size is (ceil(H/2^(K-1-k)), ceil(W/2^(K-1-k))).
// Texel values are pre-exponentiation logs, all registered in a ParameterStore.
class EnvironmentPyramid {
 public:
    static EnvironmentPyramid create(ad::ParameterStore* store, int rows, int cols,
                                     int levels = 5, double base = 2.0);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int levels() const { return static_cast<int>(levelDims_.size()); }
    double base() const { return base_; }
    std::array<int, 2> levelDim(int k) const { return levelDims_[k]; }
    size_t levelHandle(int k) const { return levelHandles_[k]; }

    // Radiance in a unit direction. Azimuth wraps, elevation clamps.
    Rgbd eval(const ad::ParameterStore& store, const Vec3& w) const;
    Rgb<ad::Value> eval(ad::Tape* tape, const ad::ParameterStore& store, const Vec3& w) const;

    // Radiance at the center of finest-grid texel (i, j).
    Rgbd texelCenterRadiance(const ad::ParameterStore& store, int i, int j) const;
    Vec3 texelCenterDir(int i, int j) const;

    // Loads ln(img) into the finest level and zeros the others, making the
    // pyramid reproduce img exactly at texel centers.
    void setFromRadiance(ad::ParameterStore* store, const Image& img) const;

    // Linear radiance sampled at finest texel centers.
    Image toImage(const ad::ParameterStore& store) const;

 private:
    int rows_ = 0, cols_ = 0;
    double base_ = 2.0;
    std::vector<std::array<int, 2>> levelDims_;
    std::vector<size_t> levelHandles_;
};

// Piecewise-constant importance table over the finest grid. Masses are
// proportional to (R+G+B at the texel center) * sin(theta_row); directions
// are drawn uniformly in (phi, cos theta) inside the chosen texel, so the
// density per solid angle is exactly mass / texelSolidAngle. Everything here
// is detached: values are plain doubles snapshotted from the store.
class EnvSamplingTable {
 public:
    static EnvSamplingTable build(const EnvironmentPyramid& pyr,
                                  const ad::ParameterStore& store);

    struct Sample {
        Vec3 dir;
        double pdf;
    };
    Sample sample(double u, double v) const;
    double pdf(const Vec3& w) const;

    double mass(int i, int j) const { return mass_[static_cast<size_t>(i) * cols_ + j]; }
    double texelSolidAngle(int i) const;
    int rows() const { return rows_; }
    int cols() const { return cols_; }

 private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> mass_;     // rows*cols, sums to 1
    std::vector<double> rowCdf_;   // cumulative row masses
    std::vector<double> condCdf_;  // per-row cumulative column masses
};

}  // namespace eclipse
