#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eclipse/autodiff.h"
#include "eclipse/rng.h"
#include "testutil.h"

using namespace eclipse;
using namespace eclipse::ad;

TEST_CASE("forward arithmetic matches raw reals") {
    Tape tape;
    Value x = tape.input(3.0);
    Value y = 2.0 * x + 1.0;
    CHECK(y.data() == doctest::Approx(7.0));

    Value s = sigmoid(tape.input(0.0));
    CHECK(s.data() == doctest::Approx(0.5));

    // exp of a sum of zeros is exactly one.
    Value zsum = tape.input(0.0) + tape.input(0.0) + 0.0;
    CHECK(exp(zsum).data() == 1.0);
}

TEST_CASE("backward on simple expressions") {
    Tape tape;
    Value x = tape.input(3.0);
    Value y = x * x;
    tape.backward(y, nullptr);
    CHECK(tape.adjoint(x) == doctest::Approx(6.0));

    tape.clear();
    x = tape.input(3.0);
    Value z = detach(x) * x;
    tape.backward(z, nullptr);
    CHECK(tape.adjoint(x) == doctest::Approx(3.0));
}

TEST_CASE("detach semantics") {
    Value c = detach(Value(5.0));
    CHECK(c.data() == 5.0);
    CHECK(c.isConst());
    Value cc = detach(detach(c));
    CHECK(cc.isConst());
    CHECK(cc.data() == 5.0);
}

TEST_CASE("every primitive matches central finite differences") {
    struct Case {
        const char* name;
        std::function<Value(Tape&, Value)> f;
        std::function<double(double)> fd;
        double lo, hi;
    };
    std::vector<Case> cases = {
        {"add", [](Tape&, Value x) { return x + 1.7; }, [](double x) { return x + 1.7; }, -2, 2},
        {"mul", [](Tape&, Value x) { return x * x * 0.7; },
         [](double x) { return x * x * 0.7; }, -2, 2},
        {"div", [](Tape&, Value x) { return 1.3 / x; }, [](double x) { return 1.3 / x; }, 0.4, 2},
        {"exp", [](Tape&, Value x) { return exp(x); }, [](double x) { return std::exp(x); }, -2, 2},
        {"log", [](Tape&, Value x) { return log(x); }, [](double x) { return std::log(x); }, 0.3, 3},
        {"sqrt", [](Tape&, Value x) { return sqrt(x); },
         [](double x) { return std::sqrt(x); }, 0.3, 3},
        {"sin", [](Tape&, Value x) { return sin(x); }, [](double x) { return std::sin(x); }, -2, 2},
        {"cos", [](Tape&, Value x) { return cos(x); }, [](double x) { return std::cos(x); }, -2, 2},
        {"sigmoid", [](Tape&, Value x) { return sigmoid(x); },
         [](double x) { return 1.0 / (1.0 + std::exp(-x)); }, -3, 3},
        {"relu", [](Tape&, Value x) { return relu(x); },
         [](double x) { return x > 0 ? x : 0.0; }, 0.2, 2},
        {"clampPositive", [](Tape&, Value x) { return clampPositive(x * 1.0); },
         [](double x) { return x > 0 ? x : 0.0; }, 0.2, 2},
        {"powi", [](Tape&, Value x) { return powi(x, 5); },
         [](double x) { return std::pow(x, 5); }, 0.3, 1.5},
    };

    RandomStream rs(7, 0, 0, 0, StreamPurpose::Test);
    for (const auto& c : cases) {
        CAPTURE(c.name);
        for (int rep = 0; rep < 10; ++rep) {
            const double x0 = c.lo + (c.hi - c.lo) * rs.next();
            Tape tape;
            Value x = tape.input(x0);
            Value y = c.f(tape, x);
            tape.backward(y, nullptr);
            const double got = tape.adjoint(x);
            const double want = testutil::centralDiff(c.fd, x0, 1e-6);
            CHECK(testutil::relError(got, want, 1e-9) <= 1e-7);
        }
    }
}

TEST_CASE("dot primitive gradient") {
    Tape tape;
    std::vector<Value> a, b;
    std::vector<double> av = {0.3, -1.2, 2.0}, bv = {1.5, 0.25, -0.75};
    for (double v : av) a.push_back(tape.input(v));
    for (double v : bv) b.push_back(tape.input(v));
    Value d = tape.dot(a, b);
    CHECK(d.data() == doctest::Approx(0.3 * 1.5 - 1.2 * 0.25 + 2.0 * -0.75));
    tape.backward(d, nullptr);
    for (int i = 0; i < 3; ++i) {
        CHECK(tape.adjoint(a[i]) == doctest::Approx(bv[i]));
        CHECK(tape.adjoint(b[i]) == doctest::Approx(av[i]));
    }
}

TEST_CASE("gradient of a small ReLU network vs finite differences") {
    // 3-layer network with fixed pseudo-random weights, evaluated on the tape
    // through ParameterStore slots.
    ParameterStore store;
    const int in = 4, hid = 8;
    size_t w1 = store.registerArray("w1", ParamGroup::Material, {hid, in});
    size_t b1 = store.registerArray("b1", ParamGroup::Material, {hid});
    size_t w2 = store.registerArray("w2", ParamGroup::Material, {hid, hid});
    size_t b2 = store.registerArray("b2", ParamGroup::Material, {hid});
    size_t w3 = store.registerArray("w3", ParamGroup::Material, {1, hid});
    size_t b3 = store.registerArray("b3", ParamGroup::Material, {1});

    RandomStream rs(13, 0, 0, 0, StreamPurpose::Test);
    for (double& v : store.values()) v = 0.8 * (2 * rs.next() - 1);

    const double input[4] = {0.3, -0.7, 1.1, 0.25};

    auto forward = [&](const ParameterStore& s) {
        std::vector<double> h(in);
        for (int i = 0; i < in; ++i) h[i] = input[i];
        auto layer = [&](size_t wh, size_t bh, bool reluOn) {
            const auto& info = s.arrayInfo(wh);
            const int fo = static_cast<int>(info.shape[0]);
            const int fi = static_cast<int>(info.shape[1]);
            auto w = s.array(wh);
            auto b = s.array(bh);
            std::vector<double> out(fo);
            for (int o = 0; o < fo; ++o) {
                double acc = b[o];
                for (int i = 0; i < fi; ++i) acc += w[o * fi + i] * h[i];
                out[o] = reluOn ? (acc > 0 ? acc : 0.0) : acc;
            }
            h = out;
        };
        layer(w1, b1, true);
        layer(w2, b2, true);
        layer(w3, b3, false);
        return h[0];
    };

    // Tape evaluation with fused affine ops.
    Tape tape;
    std::vector<Value> h;
    for (int i = 0; i < in; ++i) h.push_back(Value(input[i]));
    auto tapeLayer = [&](size_t wh, size_t bh, bool reluOn) {
        const auto& info = store.arrayInfo(wh);
        const int fo = static_cast<int>(info.shape[0]);
        const int fi = static_cast<int>(info.shape[1]);
        std::vector<Value> out;
        for (int o = 0; o < fo; ++o) {
            Value acc = tape.affineParams(store, info.offset + static_cast<size_t>(o) * fi, h,
                                          store.arrayInfo(bh).offset + o);
            out.push_back(reluOn ? relu(acc) : acc);
        }
        h = out;
    };
    tapeLayer(w1, b1, true);
    tapeLayer(w2, b2, true);
    tapeLayer(w3, b3, false);

    GradientMap grads(store.size(), 0.0);
    tape.backward(h[0], &grads);
    CHECK(h[0].data() == doctest::Approx(forward(store)));

    RandomStream pick(29, 0, 0, 0, StreamPurpose::Test);
    for (int rep = 0; rep < 30; ++rep) {
        const size_t slot = pick.nextBelow(store.size());
        ParameterStore probe = store;
        auto f = [&](double v) {
            probe.value(slot) = v;
            return forward(probe);
        };
        const double x0 = store.value(slot);
        const double want = testutil::centralDiff(f, x0, 1e-6);
        CHECK(testutil::relError(grads[slot], want, 1e-8) <= 1e-8);
    }
}

TEST_CASE("backward is linear in the root") {
    Tape tape;
    Value x = tape.input(0.8);
    Value f = sin(x) * x;
    Value g = exp(x) + x * x;
    const double a = 2.5, b = -1.25;

    tape.backward(f, nullptr);
    const double df = tape.adjoint(x);
    tape.backward(g, nullptr);
    const double dg = tape.adjoint(x);
    Value combo = a * f + b * g;
    tape.backward(combo, nullptr);
    CHECK(tape.adjoint(x) == doctest::Approx(a * df + b * dg));
}

TEST_CASE("repeat runs are bit-identical") {
    auto run = [] {
        Tape tape;
        Value x = tape.input(1.3);
        Value y = exp(sin(x) * x + 0.3) / (x + 2.0);
        tape.backward(y, nullptr);
        return std::pair<double, double>(y.data(), tape.adjoint(x));
    };
    auto [v1, g1] = run();
    auto [v2, g2] = run();
    CHECK(v1 == v2);
    CHECK(g1 == g2);
}

TEST_CASE("clamp-positive subgradient at zero is zero") {
    Tape tape;
    Value x = tape.input(0.0);
    Value y = relu(x);
    tape.backward(y, nullptr);
    CHECK(tape.adjoint(x) == 0.0);
}

TEST_CASE("parameter edges accumulate into the gradient map") {
    ParameterStore store;
    size_t h = store.registerArray("coeff", ParamGroup::Occluder, {4});
    auto arr = store.array(h);
    for (int i = 0; i < 4; ++i) arr[i] = i + 1.0;

    Tape tape;
    std::vector<double> coeffs = {0.5, -1.0, 2.0, 0.25};
    Value d = tape.dotParams(store, store.arrayInfo(h).offset, coeffs);
    CHECK(d.data() == doctest::Approx(0.5 - 2.0 + 6.0 + 1.0));

    Value y = d * d;
    GradientMap grads(store.size(), 0.0);
    tape.backward(y, &grads);
    for (int i = 0; i < 4; ++i)
        CHECK(grads[i] == doctest::Approx(2.0 * d.data() * coeffs[i]));
}
