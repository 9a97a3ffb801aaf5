#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eclipse/dataset.h"
#include "eclipse/renderer.h"
#include "eclipse/scene.h"

namespace eclipse {

struct SolverConfig {
    double lrEnvMat = 3e-3;
    double lrOccluder = 1.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batchPixels = 4096;
    int steps = 2000;
    uint64_t seed = 1;
    int snapshotEvery = 100;
    bool objectPixelsOnly = true;
    RenderSettings render;  // loss renders: aaPasses ignored (single pass each)
    double divergeFactor = 1e3;
    int divergePatience = 100;

    double lrFor(ad::ParamGroup g) const {
        return g == ad::ParamGroup::Occluder ? lrOccluder : lrEnvMat;
    }
};

// How the recovered scene is parameterized.
struct RecoveryConfig {
    int envRows = 0, envCols = 0;  // 0 = inherit dataset ground-truth grid
    int envLevels = 5;
    double envBase = 2.0;
    enum class OccluderMode { SphericalHarmonic, DirectGrid, None };
    OccluderMode occluderMode = OccluderMode::SphericalHarmonic;
    int occluderDegree = -1;  // -1 = rows/2 - 1
    double occluderBias = 100.0;
    enum class MaterialMode { Field, FixedKnown };
    MaterialMode materialMode = MaterialMode::Field;
    int hidden = 128;
    int hiddenLayers = 4;
};

RecoveryConfig recoveryConfigFromConfig(const Config& cfg);
SolverConfig solverConfigFromConfig(const Config& cfg);

// Fresh recovery scene: all-ones environment, masks ~ 1, material outputs 0.5.
Scene initializeRecoveryScene(const Dataset& data, const RecoveryConfig& cfg, uint64_t seed);

struct PixelRef {
    int frame, row, col;
};

// Two independent renders per pixel multiplied per channel; summed over the
// batch. Traced on a single tape (test and small-batch path).
ad::Value debiasedLossOnTape(ad::Tape* tape, const Scene& scene, const PassState& state,
                             std::span<const PixelRef> batch, std::span<const Rgbd> targets,
                             const RenderSettings& settings, uint64_t seed, uint64_t step);

// Production path: per-pixel tapes in parallel, gradient reduced in
// deterministic chunk order. Returns the summed loss; NaN details when hit.
struct LossResult {
    double loss = 0;
    bool isNan = false;
    PixelRef nanPixel{-1, -1, -1};
};
LossResult debiasedLossGradient(const Scene& scene, const PassState& state,
                                std::span<const PixelRef> batch, std::span<const Rgbd> targets,
                                const RenderSettings& settings, uint64_t seed, uint64_t step,
                                ad::GradientMap* grads);

struct AdamState {
    std::vector<double> m, v;
    int64_t step = 0;
};

// Standard bias-corrected update with per-group learning rates.
void adamStep(ad::ParameterStore* params, const ad::GradientMap& grads, AdamState* state,
              const SolverConfig& cfg);

struct MetricsRow {
    int step;
    double loss;
    double envRmse;
    double relMse;
    double psnr;
};

struct SolveResult {
    std::vector<MetricsRow> trace;
    bool diverged = false;
    std::string message;
};

// Full inverse loop: initialize happens outside (pass the scene from
// initializeRecoveryScene); runs steps of batch -> loss -> backward -> Adam,
// snapshots metrics/checkpoints into outDir every snapshotEvery steps.
SolveResult solve(const Dataset& data, Scene* scene, const SolverConfig& cfg,
                  const std::string& outDir);

}  // namespace eclipse
