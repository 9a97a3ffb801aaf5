#include "eclipse/solver.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "eclipse/checkpoint.h"
#include "eclipse/error.h"
#include "eclipse/metrics.h"
#include "eclipse/parallel.h"
#include "eclipse/rng.h"

namespace fs = std::filesystem;

namespace eclipse {

RecoveryConfig recoveryConfigFromConfig(const Config& cfg) {
    RecoveryConfig r;
    r.envRows = cfg.getInt("recovery", "env_rows", 0);
    r.envCols = cfg.getInt("recovery", "env_cols", 0);
    r.envLevels = cfg.getInt("recovery", "env_levels", 5);
    r.envBase = cfg.getDouble("recovery", "env_base", 2.0);
    const std::string occ = cfg.getString("recovery", "occluder", "sh");
    if (occ == "sh") r.occluderMode = RecoveryConfig::OccluderMode::SphericalHarmonic;
    else if (occ == "direct") r.occluderMode = RecoveryConfig::OccluderMode::DirectGrid;
    else if (occ == "none") r.occluderMode = RecoveryConfig::OccluderMode::None;
    else throw RuntimeError("recovery.occluder must be sh, direct, or none");
    r.occluderDegree = cfg.getInt("recovery", "degree", -1);
    r.occluderBias = cfg.getDouble("recovery", "bias", 100.0);
    const std::string mat = cfg.getString("recovery", "material", "field");
    if (mat == "field") r.materialMode = RecoveryConfig::MaterialMode::Field;
    else if (mat == "fixed") r.materialMode = RecoveryConfig::MaterialMode::FixedKnown;
    else throw RuntimeError("recovery.material must be field or fixed");
    r.hidden = cfg.getInt("recovery", "hidden", 128);
    r.hiddenLayers = cfg.getInt("recovery", "layers", 4);
    return r;
}

SolverConfig solverConfigFromConfig(const Config& cfg) {
    SolverConfig s;
    s.lrEnvMat = cfg.getDouble("solver", "lr", 3e-3);
    s.lrOccluder = cfg.getDouble("solver", "lr_occluder", 1.0);
    s.beta1 = cfg.getDouble("solver", "beta1", 0.9);
    s.beta2 = cfg.getDouble("solver", "beta2", 0.999);
    s.epsilon = cfg.getDouble("solver", "epsilon", 1e-8);
    s.batchPixels = cfg.getInt("solver", "batch", 4096);
    s.steps = cfg.getInt("solver", "steps", 2000);
    s.seed = static_cast<uint64_t>(cfg.getInt("scene", "seed", 1));
    s.snapshotEvery = cfg.getInt("solver", "snapshot", 100);
    s.objectPixelsOnly = cfg.getBool("solver", "object_only", true);
    s.render.sm = cfg.getInt("solver", "sm", 32);
    s.render.sl = cfg.getInt("solver", "sl", 32);
    s.render.aaPasses = 1;
    return s;
}

Scene initializeRecoveryScene(const Dataset& data, const RecoveryConfig& cfg, uint64_t seed) {
    Scene scene;
    scene.params = std::make_shared<ad::ParameterStore>();
    scene.geometry = data.geometry.build(data.baseDir);
    scene.cameras = data.cameras;
    scene.shellRadii = data.shellRadii;

    const int rows = cfg.envRows > 0 ? cfg.envRows : data.envRows;
    const int cols = cfg.envCols > 0 ? cfg.envCols : data.envCols;
    scene.env = EnvironmentPyramid::create(scene.params.get(), rows, cols, cfg.envLevels,
                                           cfg.envBase);
    // Zero levels: radiance starts at exactly 1 everywhere.

    if (cfg.materialMode == RecoveryConfig::MaterialMode::Field) {
        scene.material.type = MaterialModel::Type::Field;
        const auto mode = data.gtMaterial.lambertian() ? MaterialField::OutputMode::Lambertian
                                                       : MaterialField::OutputMode::Ggx;
        const double coordScale = 1.0 / std::max(scene.geometry.boundingRadius(), 1e-9);
        scene.material.field =
            MaterialField::create(scene.params.get(), mode, cfg.hidden, cfg.hiddenLayers,
                                  coordScale);
        scene.material.field->initializeWeights(scene.params.get(), seed);
    } else {
        scene.material.type = MaterialModel::Type::Fixed;
        scene.material.fixed = data.gtMaterial;
    }

    if (cfg.occluderMode != RecoveryConfig::OccluderMode::None) {
        const int degree = cfg.occluderDegree >= 0 ? cfg.occluderDegree
                                                   : std::max(0, rows / 2 - 1);
        if (cfg.occluderMode == RecoveryConfig::OccluderMode::SphericalHarmonic)
            scene.occluders = std::make_shared<OccluderSet>(OccluderSet::createSh(
                scene.params.get(), data.shellRadii, degree, cfg.occluderBias));
        else
            scene.occluders = std::make_shared<OccluderSet>(OccluderSet::createDirect(
                scene.params.get(), data.shellRadii, rows, cols, cfg.occluderBias));
    }
    scene.validate();
    return scene;
}

namespace {

ad::Value pixelLoss(ad::Tape* tape, const Scene& scene, const PassState& state,
                    const PixelRef& px, const Rgbd& target, const RenderSettings& settings,
                    uint64_t seed, uint64_t step) {
    PixelPlan plan1 =
        planPixel(scene, state, px.frame, px.row, px.col, settings, seed, 2 * step);
    PixelPlan plan2 =
        planPixel(scene, state, px.frame, px.row, px.col, settings, seed, 2 * step + 1);
    Rgb<ad::Value> i1 = evalPlan(tape, scene, plan1, px.frame, settings);
    Rgb<ad::Value> i2 = evalPlan(tape, scene, plan2, px.frame, settings);
    ad::Value loss(0.0);
    for (int c = 0; c < 3; ++c)
        loss = loss + (i1[c] - target[c]) * (i2[c] - target[c]);
    return loss;
}

}  // namespace

ad::Value debiasedLossOnTape(ad::Tape* tape, const Scene& scene, const PassState& state,
                             std::span<const PixelRef> batch, std::span<const Rgbd> targets,
                             const RenderSettings& settings, uint64_t seed, uint64_t step) {
    ECLIPSE_REQUIRE(batch.size() == targets.size(), "batch/targets size mismatch");
    ad::Value total(0.0);
    for (size_t i = 0; i < batch.size(); ++i)
        total = total + pixelLoss(tape, scene, state, batch[i], targets[i], settings, seed, step);
    return total;
}

LossResult debiasedLossGradient(const Scene& scene, const PassState& state,
                                std::span<const PixelRef> batch, std::span<const Rgbd> targets,
                                const RenderSettings& settings, uint64_t seed, uint64_t step,
                                ad::GradientMap* grads) {
    ECLIPSE_REQUIRE(batch.size() == targets.size(), "batch/targets size mismatch");
    const size_t nParams = scene.params->size();
    ECLIPSE_REQUIRE(!grads || grads->size() == nParams, "gradient map size mismatch");

    const int64_t chunkSize = 64;
    const int64_t numChunks =
        (static_cast<int64_t>(batch.size()) + chunkSize - 1) / chunkSize;
    std::vector<ad::GradientMap> chunkGrads(numChunks);
    std::vector<double> chunkLoss(numChunks, 0.0);
    std::vector<PixelRef> chunkNan(numChunks, PixelRef{-1, -1, -1});

    parallelChunks(static_cast<int64_t>(batch.size()), chunkSize,
                   [&](int64_t chunk, int64_t begin, int64_t end) {
        ad::Tape tape;
        ad::GradientMap& g = chunkGrads[chunk];
        if (grads) g.assign(nParams, 0.0);
        double loss = 0;
        for (int64_t i = begin; i < end; ++i) {
            tape.clear();
            ad::Value px = pixelLoss(&tape, scene, state, batch[i], targets[i], settings, seed,
                                     step);
            if (std::isnan(px.data()) && chunkNan[chunk].frame < 0)
                chunkNan[chunk] = batch[i];
            loss += px.data();
            if (grads) tape.backward(px, &g);
        }
        chunkLoss[chunk] = loss;
    });

    LossResult result;
    for (int64_t c = 0; c < numChunks; ++c) {
        result.loss += chunkLoss[c];
        if (!result.isNan && chunkNan[c].frame >= 0) {
            result.isNan = true;
            result.nanPixel = chunkNan[c];
        }
        if (grads)
            for (size_t s = 0; s < nParams; ++s) (*grads)[s] += chunkGrads[c][s];
    }
    if (std::isnan(result.loss)) result.isNan = true;
    return result;
}

void adamStep(ad::ParameterStore* params, const ad::GradientMap& grads, AdamState* state,
              const SolverConfig& cfg) {
    const size_t n = params->size();
    ECLIPSE_REQUIRE(grads.size() == n, "adamStep: gradient size mismatch");
    if (state->m.empty()) {
        state->m.assign(n, 0.0);
        state->v.assign(n, 0.0);
    }
    ECLIPSE_REQUIRE(state->m.size() == n, "adamStep: state size mismatch");
    state->step += 1;
    const double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(state->step));
    const double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(state->step));

    for (const auto& info : params->arrays()) {
        const double lr = cfg.lrFor(info.group);
        for (size_t k = info.offset; k < info.offset + info.count; ++k) {
            const double g = grads[k];
            state->m[k] = cfg.beta1 * state->m[k] + (1.0 - cfg.beta1) * g;
            state->v[k] = cfg.beta2 * state->v[k] + (1.0 - cfg.beta2) * g * g;
            const double mhat = state->m[k] / b1t;
            const double vhat = state->v[k] / b2t;
            params->value(k) -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    }
}

SolveResult solve(const Dataset& data, Scene* scene, const SolverConfig& cfg,
                  const std::string& outDir) {
    fs::create_directories(outDir);
    SolveResult result;

    // Target pool: object pixels (or all pixels) of every frame, with targets.
    std::vector<PixelRef> pool;
    std::vector<Rgbd> poolTargets;
    for (int t = 0; t < data.frames; ++t) {
        const Image img = data.loadImage(t);
        std::vector<uint8_t> mask;
        if (cfg.objectPixelsOnly) mask = objectMask(*scene, t);
        for (int i = 0; i < img.height; ++i)
            for (int j = 0; j < img.width; ++j) {
                if (cfg.objectPixelsOnly && !mask[static_cast<size_t>(i) * img.width + j])
                    continue;
                pool.push_back({t, i, j});
                poolTargets.push_back(img.at(i, j));
            }
    }
    ECLIPSE_REQUIRE(!pool.empty(), "solve: empty pixel pool");
    ECLIPSE_REQUIRE(cfg.batchPixels <= static_cast<int>(pool.size()) * 1'000'000,
                    "solve: batch larger than pool");

    std::ofstream csv(fs::path(outDir) / "metrics.csv");
    csv << "step,loss,env_rmse,rel_mse,psnr\n";
    csv.precision(10);

    ad::GradientMap grads(scene->params->size(), 0.0);
    AdamState adam;
    double initialLoss = 0;
    int divergeRun = 0;

    std::vector<PixelRef> batch(cfg.batchPixels);
    std::vector<Rgbd> targets(cfg.batchPixels);

    auto snapshot = [&](int step, double loss) {
        Metrics m = computeMetrics(*scene, data);
        result.trace.push_back({step, loss, m.envRmseLinear, m.envRelativeMse, m.albedoPsnr});
        csv << step << "," << loss << "," << m.envRmseLinear << "," << m.envRelativeMse << ","
            << m.albedoPsnr << "\n";
        csv.flush();
        writeCheckpoint((fs::path(outDir) / "checkpoint").string(), *scene->params);
    };

    for (int step = 1; step <= cfg.steps; ++step) {
        RandomStream sel(cfg.seed, 0, 0, static_cast<uint64_t>(step), StreamPurpose::BatchSelect);
        for (int i = 0; i < cfg.batchPixels; ++i) {
            const size_t k = static_cast<size_t>(sel.nextBelow(pool.size()));
            batch[i] = pool[k];
            targets[i] = poolTargets[k];
        }

        const PassState state = PassState::build(*scene);
        std::fill(grads.begin(), grads.end(), 0.0);
        LossResult loss = debiasedLossGradient(*scene, state, batch, targets, cfg.render,
                                               cfg.seed, static_cast<uint64_t>(step), &grads);
        if (loss.isNan) {
            result.diverged = true;
            result.message = "NaN loss at step " + std::to_string(step) + " pixel (t=" +
                             std::to_string(loss.nanPixel.frame) + ", row=" +
                             std::to_string(loss.nanPixel.row) + ", col=" +
                             std::to_string(loss.nanPixel.col) + ")";
            break;
        }
        adamStep(scene->params.get(), grads, &adam, cfg);

        if (step == 1) initialLoss = std::abs(loss.loss) + 1e-30;
        if (std::abs(loss.loss) > cfg.divergeFactor * initialLoss) {
            if (++divergeRun >= cfg.divergePatience) {
                result.diverged = true;
                result.message = "divergence: loss " + std::to_string(loss.loss) + " vs initial " +
                                 std::to_string(initialLoss) + " for " +
                                 std::to_string(divergeRun) + " consecutive steps";
                break;
            }
        } else {
            divergeRun = 0;
        }

        if (step % cfg.snapshotEvery == 0 || step == cfg.steps) snapshot(step, loss.loss);
    }
    return result;
}

}  // namespace eclipse
