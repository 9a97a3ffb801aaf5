#include "eclipse/material.h"

#include <cmath>

#include "eclipse/error.h"
#include "eclipse/rng.h"

namespace eclipse {

void posEncode(const Vec3& x, std::span<double> out) {
    ECLIPSE_REQUIRE(out.size() >= kPosEncodeFeatures, "posEncode: output too small");
    int idx = 0;
    double freq = 1.0;
    for (int j = 0; j < 7; ++j, freq *= 2.0) {
        out[idx++] = std::sin(freq * x.x);
        out[idx++] = std::sin(freq * x.y);
        out[idx++] = std::sin(freq * x.z);
        out[idx++] = std::cos(freq * x.x);
        out[idx++] = std::cos(freq * x.y);
        out[idx++] = std::cos(freq * x.z);
    }
}

MaterialField MaterialField::create(ad::ParameterStore* store, OutputMode mode, int hidden,
                                    int hiddenLayers, double coordScale) {
    ECLIPSE_REQUIRE(hidden > 0 && hiddenLayers >= 1, "network needs hidden units and layers");
    MaterialField f;
    f.mode_ = mode;
    f.hidden_ = hidden;
    f.hiddenLayers_ = hiddenLayers;
    f.coordScale_ = coordScale;
    int fanIn = kPosEncodeFeatures;
    for (int layer = 0; layer <= hiddenLayers; ++layer) {
        const int fanOut = layer == hiddenLayers ? f.outputCount() : hidden;
        char name[48];
        std::snprintf(name, sizeof(name), "mlp.W%d", layer);
        f.weightHandles_.push_back(
            store->registerArray(name, ad::ParamGroup::Material, {fanOut, fanIn}));
        std::snprintf(name, sizeof(name), "mlp.b%d", layer);
        f.biasHandles_.push_back(store->registerArray(name, ad::ParamGroup::Material, {fanOut}));
        fanIn = fanOut;
    }
    return f;
}

void MaterialField::initializeWeights(ad::ParameterStore* store, uint64_t seed) const {
    RandomStream rs(seed, 0, 0, 0, StreamPurpose::Init);
    int fanIn = kPosEncodeFeatures;
    for (int layer = 0; layer <= hiddenLayers_; ++layer) {
        auto w = store->array(weightHandles_[layer]);
        auto b = store->array(biasHandles_[layer]);
        if (layer == hiddenLayers_) {
            for (double& v : w) v = 0.0;
            for (double& v : b) v = 0.0;
        } else {
            const double scale = 1.0 / std::sqrt(static_cast<double>(fanIn));
            for (double& v : w) v = (2.0 * rs.next() - 1.0) * scale;
            for (double& v : b) v = 0.0;
        }
        fanIn = layer == hiddenLayers_ ? outputCount() : hidden_;
    }
}

namespace {

template <typename S>
BrdfParams<S> headsToParams(const S* heads, MaterialField::OutputMode mode,
                            const std::array<double, 2>& aRange,
                            const std::array<double, 2>& kRange) {
    BrdfParams<S> p;
    p.rho = {heads[0], heads[1], heads[2]};
    if (mode == MaterialField::OutputMode::Ggx) {
        p.alpha = aRange[0] + (aRange[1] - aRange[0]) * heads[3];
        p.kappa = kRange[0] + (kRange[1] - kRange[0]) * heads[4];
    } else {
        p.alpha = S(1.0);
        p.kappa = S(0.0);
    }
    return p;
}

}  // namespace

BrdfParams<double> MaterialField::query(const ad::ParameterStore& store, const Vec3& x) const {
    double features[kPosEncodeFeatures];
    posEncode(x * coordScale_, features);
    std::vector<double> in(features, features + kPosEncodeFeatures);
    std::vector<double> out;
    for (int layer = 0; layer <= hiddenLayers_; ++layer) {
        const auto& winfo = store.arrayInfo(weightHandles_[layer]);
        const int fanOut = static_cast<int>(winfo.shape[0]);
        const int fanIn = static_cast<int>(winfo.shape[1]);
        auto w = store.array(weightHandles_[layer]);
        auto b = store.array(biasHandles_[layer]);
        out.assign(fanOut, 0.0);
        for (int o = 0; o < fanOut; ++o) {
            double acc = b[o];
            const double* row = w.data() + static_cast<size_t>(o) * fanIn;
            for (int i = 0; i < fanIn; ++i) acc += row[i] * in[i];
            out[o] = layer == hiddenLayers_ ? sigmoid(acc) : clampPositive(acc);
        }
        in.swap(out);
    }
    return headsToParams(in.data(), mode_, alphaRange, kappaRange);
}

BrdfParams<ad::Value> MaterialField::query(ad::Tape* tape, const ad::ParameterStore& store,
                                           const Vec3& x) const {
    double features[kPosEncodeFeatures];
    posEncode(x * coordScale_, features);
    std::vector<ad::Value> in(features, features + kPosEncodeFeatures);
    std::vector<ad::Value> out;
    for (int layer = 0; layer <= hiddenLayers_; ++layer) {
        const auto& winfo = store.arrayInfo(weightHandles_[layer]);
        const int fanOut = static_cast<int>(winfo.shape[0]);
        const int fanIn = static_cast<int>(winfo.shape[1]);
        const size_t wBase = winfo.offset;
        const size_t bBase = store.arrayInfo(biasHandles_[layer]).offset;
        out.clear();
        out.reserve(fanOut);
        for (int o = 0; o < fanOut; ++o) {
            ad::Value acc = tape->affineParams(store, wBase + static_cast<size_t>(o) * fanIn,
                                               in, bBase + o);
            out.push_back(layer == hiddenLayers_ ? ad::sigmoid(acc) : ad::relu(acc));
        }
        in.swap(out);
    }
    return headsToParams(in.data(), mode_, alphaRange, kappaRange);
}

}  // namespace eclipse
