#include "eclipse/sampling.h"

#include <cmath>

#include "eclipse/error.h"
#include "eclipse/material.h"

namespace eclipse {

bool validStratifiedCount(int n) {
    if (n < 2 || (n & (n - 1)) != 0) return false;
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    return (log2n % 2) == 1;
}

StratifiedBatch stratified2D(RandomStream& stream, int n) {
    ECLIPSE_REQUIRE(validStratifiedCount(n),
                    "stratified2D: sample count must be a power of two with odd exponent");
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    const int s = 1 << ((log2n + 1) / 2);

    StratifiedBatch batch;
    batch.n = n;
    batch.s = s;
    batch.uv.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r = stream.next();
        const double t = stream.next();
        batch.uv[i].first = ((i % s) + r) / s;
        batch.uv[i].second = 2.0 * ((i / s) + t) / s;
    }
    return batch;
}

DirectionSample sampleGgx(double u, double v, double alpha, const Vec3& wo, const Vec3& n,
                          RandomStream* retry) {
    const Frame frame = Frame::fromNormal(n);
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double cosThetaH = std::sqrt(std::max(0.0, (1.0 - u) / (1.0 + (alpha * alpha - 1.0) * u)));
        const double sinThetaH = std::sqrt(std::max(0.0, 1.0 - cosThetaH * cosThetaH));
        const double phiH = kTwoPi * v;
        const Vec3 wh = frame.toWorld(
            {sinThetaH * std::cos(phiH), sinThetaH * std::sin(phiH), cosThetaH});
        const double ho = dot(wh, wo);
        if (ho > 1e-9) {
            const Vec3 wi = wh * (2.0 * ho) - wo;
            // Route through pdfGgx so the two stay exactly consistent.
            return {wi, pdfGgx(alpha, wo, wi, n)};
        }
        if (!retry) break;
        u = retry->next();
        v = retry->next();
    }
    return {Vec3{0, 0, 1}, 0.0};
}

double pdfGgx(double alpha, const Vec3& wo, const Vec3& wi, const Vec3& n) {
    const Vec3 hsum = wi + wo;
    const double hlen = length(hsum);
    if (hlen < 1e-12) return 0.0;
    const Vec3 wh = hsum / hlen;
    const double ho = dot(wh, wo);
    if (ho <= 0) return 0.0;
    const double nh = dot(n, wh);
    return ggxD(nh, alpha) * std::abs(nh) / (4.0 * ho);
}

DirectionSample sampleCosine(double u, double v, const Vec3& n) {
    const double sinTheta = std::sqrt(u);
    const double cosTheta = std::sqrt(std::max(0.0, 1.0 - u));
    const double phi = kTwoPi * v;
    const Frame frame = Frame::fromNormal(n);
    const Vec3 wi = frame.toWorld({sinTheta * std::cos(phi), sinTheta * std::sin(phi), cosTheta});
    return {wi, cosTheta * kInvPi};
}

double pdfCosine(const Vec3& n, const Vec3& wi) {
    return clampPositive(dot(n, wi)) * kInvPi;
}

}  // namespace eclipse
