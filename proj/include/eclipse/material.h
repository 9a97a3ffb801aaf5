#pragma once

#include <array>
#include <span>
#include <vector>

#include "eclipse/autodiff.h"
#include "eclipse/math.h"

namespace eclipse {

inline double maxWith(double a, double c) { return a > c ? a : c; }
inline double powi(double a, int n) {
    double p = 1;
    for (int i = 0; i < n; ++i) p *= a;
    return p;
}

// Reflectance parameters at a surface point: diffuse albedo, microfacet
// roughness, and specular reflectance at normal incidence. All in [0, 1].
template <typename S>
struct BrdfParams {
    Rgb<S> rho;
    S alpha{};
    S kappa{};
};

// Scalar microfacet pieces (shared by the BRDF and the sampler).
inline double ggxD(double cosThetaH, double alpha) {
    const double a2 = alpha * alpha;
    const double d = 1.0 + (a2 - 1.0) * cosThetaH * cosThetaH;
    return a2 / (kPi * d * d);
}

template <typename S>
Rgb<S> lambertianBrdf(const Rgb<S>& rho) {
    return {rho.r * kInvPi, rho.g * kInvPi, rho.b * kInvPi};
}

// Diffuse + GGX specular reflectance density. Geometry enters as plain
// doubles; only the material parameters carry gradients. Returns zero when
// the light direction is below the surface, and drops the specular term when
// the cosine product underflows or the half vector is undefined.
template <typename S>
Rgb<S> evalBrdf(const BrdfParams<S>& p, const Vec3& n, const Vec3& wi, const Vec3& wo,
                double alphaMin = 0.02) {
    const double ci = dot(n, wi);
    const double co = dot(n, wo);
    if (ci <= 0) return Rgb<S>(S(0.0));

    Vec3 hsum = wi + wo;
    const double hlen = length(hsum);
    const bool halfValid = hlen > 1e-12;
    const Vec3 wh = halfValid ? hsum / hlen : Vec3{0, 0, 0};
    const double hi = halfValid ? dot(wh, wi) : 0.0;
    const double nh = halfValid ? dot(n, wh) : 0.0;

    auto fresnel = [&](double c) {  // Schlick, parameter kappa
        const double onemc5 = powi(1.0 - c, 5);
        return p.kappa + (1.0 - p.kappa) * onemc5;
    };

    const S alpha = maxWith(p.alpha, alphaMin);
    const S oneMinusFi = 1.0 - fresnel(ci);
    const S oneMinusFh = 1.0 - fresnel(hi);
    const S diffuseScale = oneMinusFi * oneMinusFh * (ci * kInvPi);

    S specular(0.0);
    if (halfValid && ci * co >= 1e-9) {
        const S a2 = alpha * alpha;
        const S dden = 1.0 + (a2 - 1.0) * (nh * nh);
        const S D = a2 / (kPi * dden * dden);
        const S k = (alpha + 1.0) * (alpha + 1.0) * 0.125;
        const S gi = ci / (k + (1.0 - k) * ci);
        const S go = co / (k + (1.0 - k) * co);
        specular = D * fresnel(hi) * gi * go / (4.0 * ci * co);
    }

    return {p.rho.r * diffuseScale + specular,
            p.rho.g * diffuseScale + specular,
            p.rho.b * diffuseScale + specular};
}

// Sin/cos features at octave frequencies 1..64 of each coordinate:
// [sin(2^j x), sin(2^j y), sin(2^j z), cos(2^j x), ...] for j = 0..6.
constexpr int kPosEncodeFeatures = 42;
void posEncode(const Vec3& x, std::span<double> out);

// Spatially-varying parameters from a coordinate network: positional encoding
// into a ReLU MLP with sigmoid outputs. Lambertian mode drives 3 outputs
// (albedo), Ggx mode 5 (albedo, roughness, specular reflectance).
class MaterialField {
 public:
    enum class OutputMode { Lambertian, Ggx };

    static MaterialField create(ad::ParameterStore* store, OutputMode mode,
                                int hidden = 128, int hiddenLayers = 4,
                                double coordScale = 1.0);

    // Uniform(+-1/sqrt(fan_in)) hidden weights, zero biases, and an exactly
    // zero output layer so every channel starts at 0.5.
    void initializeWeights(ad::ParameterStore* store, uint64_t seed) const;

    BrdfParams<double> query(const ad::ParameterStore& store, const Vec3& x) const;
    BrdfParams<ad::Value> query(ad::Tape* tape, const ad::ParameterStore& store,
                                const Vec3& x) const;

    OutputMode mode() const { return mode_; }
    int outputCount() const { return mode_ == OutputMode::Lambertian ? 3 : 5; }
    int hidden() const { return hidden_; }
    int hiddenLayers() const { return hiddenLayers_; }

    // Optional affine remaps of roughness / specular reflectance into
    // sub-ranges; identity by default.
    std::array<double, 2> alphaRange{0.0, 1.0};
    std::array<double, 2> kappaRange{0.0, 1.0};

 private:
    OutputMode mode_ = OutputMode::Lambertian;
    int hidden_ = 128;
    int hiddenLayers_ = 4;
    double coordScale_ = 1.0;
    std::vector<size_t> weightHandles_;  // per layer
    std::vector<size_t> biasHandles_;
};

}  // namespace eclipse
