#include "eclipse/sh.h"

#include <cmath>

#include "eclipse/error.h"

namespace eclipse {

namespace {
inline int triIndex(int l, int m) { return l * (l + 1) / 2 + m; }
}  // namespace

SphericalHarmonicBasis::SphericalHarmonicBasis(int maxDegree) : maxDegree_(maxDegree) {
    ECLIPSE_REQUIRE(maxDegree >= 0, "SH degree must be non-negative");
    const int n = triIndex(maxDegree, maxDegree) + 1;
    recA_.assign(n, 0.0);
    recB_.assign(n, 0.0);
    for (int m = 0; m <= maxDegree; ++m) {
        for (int l = m + 2; l <= maxDegree; ++l) {
            const double num = 4.0 * l * l - 1.0;
            const double den = static_cast<double>(l) * l - static_cast<double>(m) * m;
            recA_[triIndex(l, m)] = std::sqrt(num / den);
            const double num2 = static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m;
            const double den2 = 4.0 * static_cast<double>(l - 1) * (l - 1) - 1.0;
            recB_[triIndex(l, m)] = std::sqrt(num2 / den2);
        }
    }
}

void SphericalHarmonicBasis::evalBasis(const Vec3& w, std::span<double> out) const {
    ECLIPSE_REQUIRE(static_cast<int>(out.size()) >= count(), "evalBasis: output too small");
    const double z = w.z;
    const double sinTheta = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = std::atan2(w.y, w.x);

    constexpr double kSqrt2 = 1.41421356237309504880;
    const double n00 = 0.28209479177387814347;  // 1 / (2 sqrt(pi))

    // cos(m phi), sin(m phi) by the angle-addition recurrence.
    const double cp1 = std::cos(phi), sp1 = std::sin(phi);

    // Sectoral start N_m^m, then the two-term upward recurrence in l.
    double nmm = n00;
    double cm = 1.0, sm = 0.0;  // cos/sin of m*phi
    for (int m = 0; m <= maxDegree_; ++m) {
        if (m > 0) {
            nmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sinTheta;
            const double cNext = cm * cp1 - sm * sp1;
            const double sNext = sm * cp1 + cm * sp1;
            cm = cNext;
            sm = sNext;
        }
        double prev2 = 0.0;
        double prev1 = nmm;
        for (int l = m; l <= maxDegree_; ++l) {
            double nlm;
            if (l == m) {
                nlm = nmm;
            } else if (l == m + 1) {
                nlm = z * std::sqrt(2.0 * m + 3.0) * nmm;
            } else {
                const int t = triIndex(l, m);
                nlm = recA_[t] * (z * prev1 - recB_[t] * prev2);
            }
            if (l > m) {
                prev2 = prev1;
                prev1 = nlm;
            }
            if (m == 0) {
                out[index(l, 0)] = nlm;
            } else {
                out[index(l, m)] = kSqrt2 * nlm * cm;
                out[index(l, -m)] = kSqrt2 * nlm * sm;
            }
        }
    }
}

double SphericalHarmonicBasis::eval(int l, int m, const Vec3& w) const {
    ECLIPSE_REQUIRE(l <= maxDegree_ && std::abs(m) <= l, "eval: (l, m) out of range");
    std::vector<double> buf(count());
    evalBasis(w, buf);
    return buf[index(l, m)];
}

}  // namespace eclipse
