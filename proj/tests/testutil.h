// Shared test-only oracles: finite differences, chi-square tails,
// Gauss-Legendre quadrature. Independent of the library code they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// Central finite difference of a scalar function of one coordinate.
inline double centralDiff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double relError(double got, double want, double floor = 1e-12) {
    const double denom = std::max(std::abs(want), floor);
    return std::abs(got - want) / denom;
}

// Regularized lower incomplete gamma P(a, x) by series / continued fraction.
inline double gammaP(double a, double x) {
    if (x <= 0) return 0;
    auto gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a, x).
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

// Upper tail probability of a chi-square statistic with df degrees of freedom.
inline double chiSquarePValue(double statistic, double df) {
    return 1.0 - gammaP(df / 2.0, statistic / 2.0);
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gaussLegendre(int n, std::vector<double>* nodes, std::vector<double>* weights) {
    nodes->assign(n, 0.0);
    weights->assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        (*nodes)[i] = -x;
        (*nodes)[n - 1 - i] = x;
        (*weights)[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        (*weights)[n - 1 - i] = (*weights)[i];
    }
}

}  // namespace testutil
