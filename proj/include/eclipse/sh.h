#pragma once

#include <span>
#include <vector>

#include "eclipse/math.h"

namespace eclipse {

// Real orthonormal spherical harmonics up to a maximum degree.
//
// Convention: Condon-Shortley phase folded into the associated Legendre
// recurrence; real components Y_{l,0} = N_l^0, Y_{l,m>0} = sqrt(2) N_l^m
// cos(m phi), Y_{l,m<0} = sqrt(2) N_l^|m| sin(|m| phi), with N the fully
// normalized associated Legendre functions. Index layout: l*(l+1)+m.
class SphericalHarmonicBasis {
 public:
    explicit SphericalHarmonicBasis(int maxDegree);

    int maxDegree() const { return maxDegree_; }
    int count() const { return (maxDegree_ + 1) * (maxDegree_ + 1); }

    // Fills out[l*(l+1)+m] for all l <= maxDegree, |m| <= l.
    void evalBasis(const Vec3& w, std::span<double> out) const;

    // Single component (test and reference use; prefer evalBasis in loops).
    double eval(int l, int m, const Vec3& w) const;

    static int index(int l, int m) { return l * (l + 1) + m; }

 private:
    int maxDegree_;
    // Recurrence coefficients for N_l^m, precomputed per (l, m >= 0),
    // triangular layout l*(l+1)/2 + m.
    std::vector<double> recA_, recB_;
};

}  // namespace eclipse
