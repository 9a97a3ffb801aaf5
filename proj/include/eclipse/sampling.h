#pragma once

#include <utility>
#include <vector>

#include "eclipse/math.h"
#include "eclipse/rng.h"

namespace eclipse {

// Stratified unit-square pairs: the unit square is divided into an (s/2) x s
// grid with s = 2^((log2(n)+1)/2) and one pair is placed uniformly in each
// cell. Only sample counts with an odd log2(n) tile exactly; other counts are
// rejected.
struct StratifiedBatch {
    int n = 0;
    int s = 0;  // columns; rows = s / 2
    std::vector<std::pair<double, double>> uv;
};

StratifiedBatch stratified2D(RandomStream& stream, int n);

// True iff n is a power of two with odd exponent (valid stratified2D count).
bool validStratifiedCount(int n);

struct DirectionSample {
    Vec3 dir;
    double pdf = 0;  // per solid angle; 0 marks a failed sample
};

// Trowbridge-Reitz half-vector sampling reflected about wo. The returned pdf
// equals pdfGgx(...) on the returned direction. Degenerate draws (half vector
// facing away from wo) are retried from `retry` a bounded number of times;
// pdf 0 is returned if all retries fail.
DirectionSample sampleGgx(double u, double v, double alpha, const Vec3& wo, const Vec3& n,
                          RandomStream* retry = nullptr);
double pdfGgx(double alpha, const Vec3& wo, const Vec3& wi, const Vec3& n);

// Cosine-weighted hemisphere around n (material-side distribution for pure
// diffuse surfaces).
DirectionSample sampleCosine(double u, double v, const Vec3& n);
double pdfCosine(const Vec3& n, const Vec3& wi);

}  // namespace eclipse
