#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eclipse/material.h"
#include "eclipse/rng.h"
#include "testutil.h"

using namespace eclipse;

namespace {

Vec3 randomUnit(RandomStream& rs) {
    const double z = 2 * rs.next() - 1;
    const double phi = kTwoPi * rs.next();
    const double s = std::sqrt(std::max(0.0, 1 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

Vec3 randomUpper(RandomStream& rs, const Vec3& n) {
    for (;;) {
        Vec3 w = randomUnit(rs);
        if (dot(w, n) > 0.05) return w;
    }
}

}  // namespace

TEST_CASE("positional encoding basics") {
    double f[kPosEncodeFeatures];
    posEncode({0, 0, 0}, f);
    for (int i = 0; i < 21; ++i) CHECK(f[i] == 0.0);         // sin block entries
    // Layout: per octave, 3 sins then 3 coss.
    posEncode({kPi / 2, 0, 0}, f);
    CHECK(f[0] == doctest::Approx(1.0));  // sin(1 * pi/2)
    CHECK(kPosEncodeFeatures == 42);
}

TEST_CASE("zero-initialized output layer gives 0.5 everywhere") {
    ad::ParameterStore store;
    MaterialField field = MaterialField::create(&store, MaterialField::OutputMode::Ggx, 32, 2);
    field.initializeWeights(&store, 1234);
    RandomStream rs(3, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 10; ++i) {
        const BrdfParams<double> p = field.query(store, randomUnit(rs));
        CHECK(p.rho.r == doctest::Approx(0.5));
        CHECK(p.rho.g == doctest::Approx(0.5));
        CHECK(p.rho.b == doctest::Approx(0.5));
        CHECK(p.alpha == doctest::Approx(0.5));
        CHECK(p.kappa == doctest::Approx(0.5));
    }
}

TEST_CASE("distinct inputs give distinct outputs under random weights") {
    ad::ParameterStore store;
    MaterialField field = MaterialField::create(&store, MaterialField::OutputMode::Lambertian,
                                                32, 2);
    field.initializeWeights(&store, 99);
    // Randomize the output layer too.
    RandomStream rs(4, 0, 0, 0, StreamPurpose::Test);
    auto wlast = store.array(store.findArray("mlp.W2") - store.arrays().data());
    for (double& v : wlast) v = 0.3 * (2 * rs.next() - 1);

    const BrdfParams<double> a = field.query(store, {0.2, -0.4, 0.6});
    const BrdfParams<double> b = field.query(store, {-0.5, 0.3, -0.1});
    CHECK(a.rho.r != b.rho.r);
    // Strict sigmoid range.
    for (double v : {a.rho.r, a.rho.g, a.rho.b, b.rho.r, b.rho.g, b.rho.b}) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("network gradient vs finite differences") {
    ad::ParameterStore store;
    MaterialField field = MaterialField::create(&store, MaterialField::OutputMode::Ggx, 16, 2);
    field.initializeWeights(&store, 7);
    RandomStream rs(5, 0, 0, 0, StreamPurpose::Test);
    // Give the output layer signal so gradients flow to every layer.
    for (const auto& info : store.arrays())
        if (info.name == "mlp.W3" || info.name == "mlp.b3")
            for (size_t k = info.offset; k < info.offset + info.count; ++k)
                store.value(k) = 0.2 * (2 * rs.next() - 1);

    const Vec3 x{0.3, -0.6, 0.55};
    ad::Tape tape;
    BrdfParams<ad::Value> p = field.query(&tape, store, x);
    ad::GradientMap grads(store.size(), 0.0);
    tape.backward(p.alpha, &grads);

    RandomStream pick(6, 0, 0, 0, StreamPurpose::Test);
    int checked = 0;
    for (int rep = 0; rep < 200 && checked < 20; ++rep) {
        const size_t slot = pick.nextBelow(store.size());
        if (grads[slot] == 0) continue;
        ad::ParameterStore probe = store;
        auto f2 = [&](double v) {
            probe.value(slot) = v;
            return field.query(probe, x).alpha;
        };
        const double want = testutil::centralDiff(f2, store.value(slot), 1e-6);
        CHECK(testutil::relError(grads[slot], want, 1e-10) <= 1e-6);
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("Schlick, Trowbridge-Reitz, and shadowing closed forms") {
    // F at normal incidence equals kappa: with rho=0 the diffuse term dies at
    // kappa=1... check via the raw formula instead: build params and probe.
    BrdfParams<double> p;
    p.rho = {0, 0, 0};
    p.kappa = 0.23;
    p.alpha = 1.0;
    const Vec3 n{0, 0, 1};
    // Normal incidence: wi = wo = n, half vector = n, all cosines 1.
    // Specular term = D(1;1) * F(1) * G(1,1) / 4 = (1/pi) * kappa * 1 / 4.
    const Rgb<double> f = evalBrdf(p, n, n, n);
    CHECK(f.r == doctest::Approx((1.0 / kPi) * 0.23 / 4.0).epsilon(1e-12));

    // D(cos=1, alpha=1) = 1/pi via the scalar helper.
    CHECK(ggxD(1.0, 1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
    // k(alpha=1) = 0.5 and g(1; alpha) = 1 are implicit in the value above.
}

TEST_CASE("lambertian closed forms") {
    const Rgb<double> f = lambertianBrdf(Rgb<double>{kPi, kPi, kPi});
    CHECK(f.r == doctest::Approx(1.0));
    const Rgb<double> z = lambertianBrdf(Rgb<double>{0, 0, 0});
    CHECK(z.g == 0.0);

    // Hemisphere cosine integral of rho/pi equals rho (analytic identity,
    // checked by quadrature).
    const double rho = 0.37;
    double integral = 0;
    const int nz = 256, np = 256;
    for (int iz = 0; iz < nz; ++iz) {
        const double c = (iz + 0.5) / nz;
        for (int ip = 0; ip < np; ++ip) integral += (rho / kPi) * c * (1.0 / nz) * (kTwoPi / np);
    }
    CHECK(integral == doctest::Approx(rho).epsilon(1e-3));
}

TEST_CASE("specular reciprocity") {
    RandomStream rs(8, 0, 0, 0, StreamPurpose::Test);
    const Vec3 n{0, 0, 1};
    BrdfParams<double> p;
    p.rho = {0, 0, 0};  // isolate the specular term
    for (int i = 0; i < 200; ++i) {
        p.alpha = 0.05 + 0.9 * rs.next();
        p.kappa = rs.next();
        const Vec3 wi = randomUpper(rs, n);
        const Vec3 wo = randomUpper(rs, n);
        const double a = evalBrdf(p, n, wi, wo).r;
        const double b = evalBrdf(p, n, wo, wi).r;
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("non-negative and below-horizon zero") {
    RandomStream rs(9, 0, 0, 0, StreamPurpose::Test);
    const Vec3 n{0, 0, 1};
    for (int i = 0; i < 500; ++i) {
        BrdfParams<double> p;
        p.rho = {rs.next(), rs.next(), rs.next()};
        p.alpha = rs.next();
        p.kappa = rs.next();
        const Vec3 wo = randomUpper(rs, n);
        const Vec3 wi = randomUnit(rs);
        const Rgb<double> f = evalBrdf(p, n, wi, wo);
        if (dot(n, wi) <= 0) {
            CHECK(f.r == 0.0);
        } else {
            CHECK(f.r >= 0.0);
            CHECK(std::isfinite(f.r));
        }
    }
}

TEST_CASE("white-sky directional-hemispherical energy, kappa = 0") {
    // Monte Carlo quadrature oracle for the full model at rho = 1, kappa = 0.
    // The diffuse lobe carries the two Schlick attenuation factors and its
    // own cosine factor, so this integral sits near 2/3 rather than 1. The
    // frozen value comes from an independent 2e7-sample implementation of
    // the same formulas (stderr 1.4e-4) at wo = 30 degrees, alpha = 0.4.
    RandomStream rs(10, 0, 0, 0, StreamPurpose::Test);
    const Vec3 n{0, 0, 1};
    BrdfParams<double> p;
    p.rho = {1, 1, 1};
    p.kappa = 0.0;
    p.alpha = 0.4;
    const Vec3 wo = normalize(Vec3{std::sin(kPi / 6), 0, std::cos(kPi / 6)});

    const int samples = 1'000'000;
    double acc = 0;
    for (int i = 0; i < samples; ++i) {
        // Uniform hemisphere sampling: pdf = 1/(2 pi).
        const double z = rs.next();
        const double phi = kTwoPi * rs.next();
        const double s = std::sqrt(std::max(0.0, 1 - z * z));
        const Vec3 wi{s * std::cos(phi), s * std::sin(phi), z};
        acc += evalBrdf(p, n, wi, wo).r * z * kTwoPi;
    }
    const double integral = acc / samples;
    CHECK(integral == doctest::Approx(0.65525).epsilon(5e-3));
    // The pure-Lambertian reference value for the same integral is exactly 1.
    double lam = 0;
    RandomStream rs2(11, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 200000; ++i) {
        const double z = rs2.next();
        lam += lambertianBrdf(Rgb<double>{1, 1, 1}).r * z * kTwoPi;
    }
    CHECK(lam / 200000 == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("roughness floor keeps the specular lobe finite") {
    BrdfParams<double> p;
    p.rho = {0.5, 0.5, 0.5};
    p.alpha = 0.0;  // below the floor
    p.kappa = 0.5;
    const Vec3 n{0, 0, 1};
    const Rgb<double> f = evalBrdf(p, n, n, n, 0.02);
    CHECK(std::isfinite(f.r));
    CHECK(f.r > 0);
}
