#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eclipse/envmap.h"
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

}  // namespace

TEST_CASE("default pyramid level sizes") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 50, 100, 5);
    const std::array<std::array<int, 2>, 5> want = {{{4, 7}, {7, 13}, {13, 25}, {25, 50}, {50, 100}}};
    for (int k = 0; k < 5; ++k) {
        CHECK(pyr.levelDim(k)[0] == want[k][0]);
        CHECK(pyr.levelDim(k)[1] == want[k][1]);
    }
}

TEST_CASE("zero texels evaluate to unit radiance everywhere") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 10, 20, 5);
    RandomStream rs(3, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 50; ++i) {
        const Rgbd L = pyr.eval(store, randomUnit(rs));
        CHECK(L.r == 1.0);
        CHECK(L.g == 1.0);
        CHECK(L.b == 1.0);
    }
}

TEST_CASE("coarsest-level texel drives radiance with weight one") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 8, 16, 4);
    // Set every coarsest texel to ln 2: bilinear blending of equal values is
    // exact, so radiance is 2 everywhere (a^0 = 1).
    auto level0 = store.array(pyr.levelHandle(0));
    for (double& v : level0) v = std::log(2.0);
    RandomStream rs(4, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 20; ++i) {
        const Rgbd L = pyr.eval(store, randomUnit(rs));
        CHECK(L.r == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("finest level carries weight base^(K-1)") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 8, 16, 3, 2.0);
    auto fine = store.array(pyr.levelHandle(2));
    for (double& v : fine) v = 0.25;
    const Rgbd L = pyr.eval(store, Vec3{0, 0, 1});
    CHECK(L.r == doctest::Approx(std::exp(0.25 * 4.0)).epsilon(1e-12));
}

TEST_CASE("eval gradient vs finite differences") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 6, 12, 3);
    RandomStream rs(5, 0, 0, 0, StreamPurpose::Test);
    for (double& v : store.values()) v = 0.3 * (2 * rs.next() - 1);

    for (int rep = 0; rep < 5; ++rep) {
        const Vec3 w = randomUnit(rs);
        ad::Tape tape;
        Rgb<ad::Value> L = pyr.eval(&tape, store, w);
        ad::GradientMap grads(store.size(), 0.0);
        tape.backward(L.g, &grads);

        int checked = 0;
        for (size_t slot = 0; slot < store.size() && checked < 8; ++slot) {
            if (grads[slot] == 0) continue;
            ad::ParameterStore probe = store;
            auto f = [&](double v) {
                probe.value(slot) = v;
                return pyr.eval(probe, w).g;
            };
            const double want = testutil::centralDiff(f, store.value(slot), 1e-6);
            CHECK(testutil::relError(grads[slot], want, 1e-10) <= 1e-6);
            ++checked;
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("setFromRadiance reproduces the grid at texel centers") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 6, 12, 1);
    Image img(6, 12);
    RandomStream rs(6, 0, 0, 0, StreamPurpose::Test);
    for (auto& px : img.pixels) px = Rgbd(0.1 + 3 * rs.next(), 0.1 + rs.next(), 0.5 + rs.next());
    pyr.setFromRadiance(&store, img);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 12; ++j) {
            const Rgbd L = pyr.texelCenterRadiance(store, i, j);
            CHECK(L.r == doctest::Approx(img.at(i, j).r).epsilon(1e-12));
            CHECK(L.b == doctest::Approx(img.at(i, j).b).epsilon(1e-12));
        }
}

TEST_CASE("sampling table masses") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 10, 20, 1);

    SUBCASE("uniform map: row mass proportional to sin(theta)") {
        EnvSamplingTable table = EnvSamplingTable::build(pyr, store);
        double norm = 0;
        for (int i = 0; i < 10; ++i) norm += std::sin(kPi * (i + 0.5) / 10.0);
        for (int i = 0; i < 10; ++i) {
            double rowMass = 0;
            for (int j = 0; j < 20; ++j) rowMass += table.mass(i, j);
            CHECK(rowMass == doctest::Approx(std::sin(kPi * (i + 0.5) / 10.0) / norm)
                                 .epsilon(1e-12));
        }
    }

    SUBCASE("masses sum to one") {
        RandomStream rs(7, 0, 0, 0, StreamPurpose::Test);
        for (double& v : store.values()) v = 2 * rs.next() - 1;
        EnvSamplingTable table = EnvSamplingTable::build(pyr, store);
        double sum = 0;
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 20; ++j) sum += table.mass(i, j);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }

    SUBCASE("dominant texel captures nearly all mass") {
        // Push one finest texel to ln(1e6) while the rest stay at 0; verify
        // against a brute-force normalization oracle.
        auto fine = store.array(pyr.levelHandle(0));
        const int ti = 4, tj = 11;
        fine[(static_cast<size_t>(ti) * 20 + tj) * 3 + 0] = std::log(1e6);
        fine[(static_cast<size_t>(ti) * 20 + tj) * 3 + 1] = std::log(1e6);
        fine[(static_cast<size_t>(ti) * 20 + tj) * 3 + 2] = std::log(1e6);
        EnvSamplingTable table = EnvSamplingTable::build(pyr, store);

        double num = 0, den = 0;
        for (int i = 0; i < 10; ++i) {
            const double st = std::sin(kPi * (i + 0.5) / 10.0);
            for (int j = 0; j < 20; ++j) {
                const Rgbd L = pyr.texelCenterRadiance(store, i, j);
                const double m = (L.r + L.g + L.b) * st;
                den += m;
                if (i == ti && j == tj) num = m;
            }
        }
        CHECK(table.mass(ti, tj) == doctest::Approx(num / den).epsilon(1e-12));
        CHECK(table.mass(ti, tj) > 0.99);
    }
}

TEST_CASE("single-texel map pdf is uniform over the sphere") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 1, 1, 1);
    EnvSamplingTable table = EnvSamplingTable::build(pyr, store);
    RandomStream rs(8, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 20; ++i) {
        auto s = table.sample(rs.next(), rs.next());
        CHECK(s.pdf == doctest::Approx(1.0 / kFourPi).epsilon(1e-12));
    }
}

TEST_CASE("sample/pdf consistency is exact") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 6, 12, 2);
    RandomStream rs(9, 0, 0, 0, StreamPurpose::Test);
    for (double& v : store.values()) v = 0.6 * (2 * rs.next() - 1);
    EnvSamplingTable table = EnvSamplingTable::build(pyr, store);
    for (int i = 0; i < 2000; ++i) {
        auto s = table.sample(rs.next(), rs.next());
        CHECK(table.pdf(s.dir) == s.pdf);
        CHECK(std::abs(length(s.dir) - 1.0) < 1e-12);
        CHECK(s.pdf > 0);
    }
}

TEST_CASE("pdf integrates to one by quadrature") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 10, 20, 2);
    RandomStream rs(10, 0, 0, 0, StreamPurpose::Test);
    for (double& v : store.values()) v = 0.5 * (2 * rs.next() - 1);
    EnvSamplingTable table = EnvSamplingTable::build(pyr, store);

    // Texel-exact quadrature: the pdf is piecewise constant per texel.
    double integral = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 20; ++j) {
            const Vec3 c = pyr.texelCenterDir(i, j);
            integral += table.pdf(c) * table.texelSolidAngle(i);
        }
    CHECK(std::abs(integral - 1.0) < 1e-3);
}

TEST_CASE("chi-square goodness of fit of sampled texels") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 8, 16, 2);
    RandomStream rs(11, 0, 0, 0, StreamPurpose::Test);
    for (double& v : store.values()) v = 0.8 * (2 * rs.next() - 1);
    EnvSamplingTable table = EnvSamplingTable::build(pyr, store);

    const int n = 1'000'000;
    std::vector<int> counts(8 * 16, 0);
    for (int k = 0; k < n; ++k) {
        auto s = table.sample(rs.next(), rs.next());
        double theta, phi;
        dirToSpherical(s.dir, &theta, &phi);
        const int i = std::min(static_cast<int>(theta / kPi * 8), 7);
        const int j = std::min(static_cast<int>(phi / kTwoPi * 16), 15);
        counts[i * 16 + j]++;
    }
    double stat = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 16; ++j) {
            const double expect = table.mass(i, j) * n;
            REQUIRE(expect > 5);
            const double d = counts[i * 16 + j] - expect;
            stat += d * d / expect;
        }
    const double p = testutil::chiSquarePValue(stat, 8.0 * 16.0 - 1.0);
    CHECK(p > 0.001);
}

TEST_CASE("azimuth seam wraps continuously") {
    ad::ParameterStore store;
    EnvironmentPyramid pyr = EnvironmentPyramid::create(&store, 8, 16, 2);
    RandomStream rs(12, 0, 0, 0, StreamPurpose::Test);
    for (double& v : store.values()) v = 0.5 * (2 * rs.next() - 1);
    const double eps = 1e-9;
    for (int i = 0; i < 8; ++i) {
        const double theta = kPi * (i + 0.37) / 8;
        const Rgbd a = pyr.eval(store, sphericalDir(theta, eps));
        const Rgbd b = pyr.eval(store, sphericalDir(theta, kTwoPi - eps));
        CHECK(a.r == doctest::Approx(b.r).epsilon(1e-6));
    }
}
