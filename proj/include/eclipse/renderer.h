#pragma once

#include <vector>

#include "eclipse/pfm.h"
#include "eclipse/scene.h"

namespace eclipse {

struct RenderSettings {
    int sm = 512;          // material-distribution samples per shading point
    int sl = 512;          // environment-distribution samples
    int aaPasses = 16;     // primary passes averaged per pixel
    enum class MisHeuristic { Balance, Power2 };
    MisHeuristic heuristic = MisHeuristic::Balance;
    bool renderBackground = true;  // primary misses evaluate env * mask
    double alphaMin = 0.02;
};

// Detached state frozen once per render pass / optimization step. The
// environment sampling table is a constant during differentiation.
struct PassState {
    EnvSamplingTable envTable;

    static PassState build(const Scene& scene);
};

// One secondary sample with everything that is constant under the detached
// sampling contract: direction, both densities, the combined MIS weight
// (already folded with 1/s, the clamped cosine and self-occlusion).
struct SampleRecord {
    Vec3 dir;
    Vec3 shellDir;
    double weight;        // beta / (s * pdf_own) * cos+ * V
    bool fromMaterial;
};

// Detached per-pixel sampling plan; gradients flow only through the factors
// evaluated on top of it (environment, mask, material).
struct PixelPlan {
    bool hit = false;
    SurfaceHit surf;
    Vec3 wo;
    BrdfParams<double> detachedMat;
    Vec3 missDir;
    Vec3 missShellDir;
    std::vector<SampleRecord> samples;
};

// Builds the plan for pixel (row, col) of frame t. `pass` distinguishes
// antialiasing passes and the two independent loss renders.
PixelPlan planPixel(const Scene& scene, const PassState& state, int t, int row, int col,
                    const RenderSettings& settings, uint64_t seed, uint64_t pass);

// Evaluates the radiance estimate for a frozen plan. The double overload is
// the plain renderer; the tape overload traces gradients for every touched
// parameter.
Rgbd evalPlan(const Scene& scene, const PixelPlan& plan, int t, const RenderSettings& settings);
Rgb<ad::Value> evalPlan(ad::Tape* tape, const Scene& scene, const PixelPlan& plan, int t,
                        const RenderSettings& settings);

// Plan anchored at a known shading point (no primary ray).
PixelPlan planForHit(const Scene& scene, const PassState& state, int t, const SurfaceHit& hit,
                     const Vec3& wo, const RenderSettings& settings, uint64_t seed,
                     uint64_t pass);

// Monte Carlo radiance estimate at a shading point.
Rgbd shade(const Scene& scene, const PassState& state, int t, const SurfaceHit& hit,
           const Vec3& wo, const RenderSettings& settings, uint64_t seed, uint64_t pass);

// Plan + evaluate in one step (plain rendering path).
Rgbd renderPixel(const Scene& scene, const PassState& state, int t, int row, int col,
                 const RenderSettings& settings, uint64_t seed, uint64_t pass);

// Box-filtered multi-pass render of frame t; deterministic in (seed).
Image renderImage(const Scene& scene, int t, const RenderSettings& settings, uint64_t seed);

// Object coverage of frame t: pixel-center ray hits.
std::vector<uint8_t> objectMask(const Scene& scene, int t);

// Monte Carlo estimate with an empirical standard-error estimate (test and
// diagnostics path).
struct ShadeStats {
    Rgbd estimate;
    Rgbd stderrEstimate;
};
ShadeStats shadeWithStats(const Scene& scene, const PassState& state, int t,
                          const SurfaceHit& hit, const Vec3& wo,
                          const RenderSettings& settings, uint64_t seed, uint64_t pass);

// Re-renders a recovered scene with substituted lighting / material remaps and
// occluders disabled.
struct RelightOptions {
    const Image* envOverride = nullptr;      // optional replacement radiance grid
    double roughnessOverride = -1;           // < 0 keeps the recovered field
    double albedoScale = 1.0;
};
Image relight(const Scene& scene, int t, const RenderSettings& settings, uint64_t seed,
              const RelightOptions& options);

}  // namespace eclipse
