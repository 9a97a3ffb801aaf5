#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eclipse/envmap.h"
#include "eclipse/occluder.h"
#include "eclipse/rng.h"
#include "eclipse/sh.h"
#include "testutil.h"

using namespace eclipse;

namespace {

Vec3 randomUnit(RandomStream& rs) {
    const double z = 2 * rs.next() - 1;
    const double phi = kTwoPi * rs.next();
    const double s = std::sqrt(std::max(0.0, 1 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

}  // namespace

TEST_CASE("low-degree closed forms") {
    SphericalHarmonicBasis basis(2);
    RandomStream rs(3, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 50; ++i) {
        const Vec3 w = randomUnit(rs);
        CHECK(basis.eval(0, 0, w) == doctest::Approx(0.28209479177).epsilon(1e-9));
        CHECK(basis.eval(1, 0, w) ==
              doctest::Approx(std::sqrt(3.0 / (4.0 * kPi)) * w.z).epsilon(1e-9));
    }
}

TEST_CASE("orthonormal Gram matrix under Gauss-Legendre quadrature") {
    const int P = 8;
    SphericalHarmonicBasis basis(P);
    const int n = basis.count();

    // Product quadrature: Gauss-Legendre in cos(theta) x uniform azimuth is
    // exact for polynomials of this degree, so the Gram matrix should be the
    // identity to near machine precision (well inside the 1e-3 gate).
    std::vector<double> nodes, weights;
    testutil::gaussLegendre(32, &nodes, &weights);
    const int nphi = 64;

    std::vector<double> gram(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> vals(n);
    for (size_t iz = 0; iz < nodes.size(); ++iz) {
        const double z = nodes[iz];
        const double s = std::sqrt(std::max(0.0, 1 - z * z));
        for (int ip = 0; ip < nphi; ++ip) {
            const double phi = kTwoPi * (ip + 0.5) / nphi;
            const Vec3 w{s * std::cos(phi), s * std::sin(phi), z};
            basis.evalBasis(w, vals);
            const double quadW = weights[iz] * (kTwoPi / nphi);
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b)
                    gram[static_cast<size_t>(a) * n + b] += quadW * vals[a] * vals[b];
        }
    }
    double maxOff = 0, maxDiagErr = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const double g = gram[static_cast<size_t>(a) * n + b];
            if (a == b) maxDiagErr = std::max(maxDiagErr, std::abs(g - 1.0));
            else maxOff = std::max(maxOff, std::abs(g));
        }
    CHECK(maxDiagErr < 1e-3);
    CHECK(maxOff < 1e-3);
    // The quadrature is exact here, so expect far better than the gate.
    CHECK(maxDiagErr < 1e-10);
    CHECK(maxOff < 1e-10);
}

TEST_CASE("high-degree evaluation stays finite and bounded") {
    SphericalHarmonicBasis basis(24);
    std::vector<double> vals(basis.count());
    RandomStream rs(5, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 100; ++i) {
        basis.evalBasis(randomUnit(rs), vals);
        for (double v : vals) {
            CHECK(std::isfinite(v));
            CHECK(std::abs(v) < 10.0);  // |Y_lm| <= sqrt((2l+1)/4pi) ~ 1.97 for l=24
        }
    }
}

TEST_CASE("mask at unoccluded initialization") {
    ad::ParameterStore store;
    auto occ = OccluderSet::createSh(&store, {3.0}, 8, 100.0);
    RandomStream rs(6, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 20; ++i) {
        const double m = occ.maskAtShellDir(store, 0, randomUnit(rs));
        CHECK(m > 1.0 - 1e-40);
        CHECK(m < 1.0);
    }
}

TEST_CASE("fully dark shell via the constant coefficient") {
    ad::ParameterStore store;
    auto occ = OccluderSet::createSh(&store, {3.0}, 4, 100.0);
    const double y00 = 0.28209479177387814;
    store.array(occ.coeffHandle(0))[0] = -200.0 / y00;
    RandomStream rs(7, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 20; ++i)
        CHECK(occ.maskAtShellDir(store, 0, randomUnit(rs)) < 1e-40);
}

TEST_CASE("mask gradient vs finite differences") {
    ad::ParameterStore store;
    auto occ = OccluderSet::createSh(&store, {3.0}, 4, 2.0);
    RandomStream rs(8, 0, 0, 0, StreamPurpose::Test);
    auto coeffs = store.array(occ.coeffHandle(0));
    for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = 0.5 * (2 * rs.next() - 1);

    const Vec3 x = randomUnit(rs) * 0.8;
    const Vec3 wi = randomUnit(rs);

    ad::Tape tape;
    ad::Value m = occ.maskValue(&tape, store, 0, x, wi);
    ad::GradientMap grads(store.size(), 0.0);
    tape.backward(m, &grads);

    const size_t base = store.arrayInfo(occ.coeffHandle(0)).offset;
    for (size_t k : {size_t(0), size_t(2), size_t(7), size_t(12)}) {
        ad::ParameterStore probe = store;
        auto f = [&](double v) {
            probe.value(base + k) = v;
            return occ.maskValue(probe, 0, x, wi);
        };
        const double want = testutil::centralDiff(f, store.value(base + k), 1e-6);
        CHECK(testutil::relError(grads[base + k], want, 1e-10) <= 1e-6);
    }
}

TEST_CASE("mask error if shading point outside the shell") {
    ad::ParameterStore store;
    auto occ = OccluderSet::createSh(&store, {2.0}, 2, 100.0);
    CHECK_THROWS_AS(occ.maskValue(store, 0, Vec3{3, 0, 0}, Vec3{1, 0, 0}), ContractError);
}

TEST_CASE("z-rotation equivariance for degree <= 2") {
    // Rotating the coefficients of each degree block and the query direction
    // by the same azimuthal angle leaves the mask unchanged.
    ad::ParameterStore store;
    auto occ = OccluderSet::createSh(&store, {3.0}, 2, 0.0);
    RandomStream rs(9, 0, 0, 0, StreamPurpose::Test);
    auto coeffs = store.array(occ.coeffHandle(0));
    for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = 2 * rs.next() - 1;

    const double ang = 0.7713;
    // Real-SH z-rotation: for m > 0 the (l, m)/(l, -m) pair rotates by m*ang.
    ad::ParameterStore rotStore = store;
    auto rot = rotStore.array(occ.coeffHandle(0));
    for (int l = 0; l <= 2; ++l)
        for (int m = 1; m <= l; ++m) {
            const int ip = SphericalHarmonicBasis::index(l, m);
            const int im = SphericalHarmonicBasis::index(l, -m);
            const double c = std::cos(m * ang), s = std::sin(m * ang);
            rot[ip] = c * coeffs[ip] + s * coeffs[im];
            rot[im] = -s * coeffs[ip] + c * coeffs[im];
        }

    for (int i = 0; i < 100; ++i) {
        const Vec3 w = randomUnit(rs);
        // Rotate w by +ang about z.
        const double c = std::cos(ang), s = std::sin(ang);
        const Vec3 wRot{c * w.x - s * w.y, s * w.x + c * w.y, w.z};
        const double a = occ.maskAtShellDir(store, 0, wRot);
        const double b = occ.maskAtShellDir(rotStore, 0, w);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("blocked energy") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 8, 16, 1);
    // Unit radiance everywhere (zero logs).

    SUBCASE("unoccluded init blocks nothing") {
        auto occ = OccluderSet::createSh(&store, {3.0}, 4, 100.0);
        CHECK(occ.blockedEnergy(store, 0, pyr) < 1e-30);
    }
    SUBCASE("fully dark shell blocks everything") {
        auto occ = OccluderSet::createSh(&store, {3.0}, 4, 100.0);
        store.array(occ.coeffHandle(0))[0] = -200.0 / 0.28209479177387814;
        const double want = kFourPi * luminance(Rgbd{1, 1, 1});
        CHECK(occ.blockedEnergy(store, 0, pyr) == doctest::Approx(want).epsilon(1e-3));
    }
    SUBCASE("hemisphere-blocking mask vs analytic quadrature") {
        // Saturate the sigmoid with a steep degree-1 band: mask ~ 1[z > 0].
        auto occ = OccluderSet::createSh(&store, {3.0}, 1, 0.0);
        const int i10 = SphericalHarmonicBasis::index(1, 0);
        store.array(occ.coeffHandle(0))[i10] = 400.0;
        // Blocked energy = integral over z < 0 of luminance = 2*pi.
        CHECK(occ.blockedEnergy(store, 0, pyr, 256, 512) ==
              doctest::Approx(kTwoPi).epsilon(1e-3));
    }
}

TEST_CASE("direct-grid mode evaluates and differentiates") {
    ad::ParameterStore store;
    auto occ = OccluderSet::createDirect(&store, {3.0}, 6, 12, 1.0);
    RandomStream rs(10, 0, 0, 0, StreamPurpose::Test);
    auto g = store.array(occ.coeffHandle(0));
    for (size_t i = 0; i < g.size(); ++i) g[i] = 2 * rs.next() - 1;

    const Vec3 w = randomUnit(rs);
    const double m0 = occ.maskAtShellDir(store, 0, w);
    CHECK(m0 > 0);
    CHECK(m0 < 1);

    ad::Tape tape;
    ad::Value mv = occ.maskAtShellDir(&tape, store, 0, w);
    CHECK(mv.data() == doctest::Approx(m0));
    ad::GradientMap grads(store.size(), 0.0);
    tape.backward(mv, &grads);
    const size_t base = store.arrayInfo(occ.coeffHandle(0)).offset;
    double sum = 0;
    for (size_t k = 0; k < g.size(); ++k) sum += std::abs(grads[base + k]);
    CHECK(sum > 0);
}
