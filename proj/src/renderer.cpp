#include "eclipse/renderer.h"

#include <cmath>

#include "eclipse/error.h"
#include "eclipse/parallel.h"
#include "eclipse/sampling.h"

namespace eclipse {

namespace {

// Far intersection with the origin-centered shell; valid for origins on or
// inside the shell (primary-miss background lookups start on it).
Vec3 shellExitDir(const Vec3& o, const Vec3& d, double r) {
    const double b = dot(o, d);
    const double disc = std::max(0.0, b * b + r * r - lengthSquared(o));
    const double s = -b + std::sqrt(disc);
    return normalize(o + d * s);
}

double misWeight(const RenderSettings& settings, bool fromMaterial, double pdfM, double pdfL) {
    const double wm = settings.sm * pdfM;
    const double wl = settings.sl * pdfL;
    if (settings.heuristic == RenderSettings::MisHeuristic::Balance) {
        const double den = wm + wl;
        return den > 0 ? 1.0 / den : 0.0;
    }
    // Exponent-2 power heuristic.
    const double den = wm * wm + wl * wl;
    if (den <= 0) return 0.0;
    if (fromMaterial) return pdfM > 0 ? wm * wm / (den * settings.sm * pdfM) : 0.0;
    return pdfL > 0 ? wl * wl / (den * settings.sl * pdfL) : 0.0;
}

BrdfParams<double> detachedMaterialAt(const Scene& scene, const Vec3& x) {
    return scene.material.type == MaterialModel::Type::Fixed
               ? scene.material.fixed.at(x)
               : scene.material.field->query(*scene.params, x);
}

// Secondary-sample plan for a known shading point.
void planSamples(const Scene& scene, const PassState& state, int t, uint64_t pixelKey,
                 const RenderSettings& settings, uint64_t seed, uint64_t pass, PixelPlan* plan) {
    const Vec3 n = plan->surf.normal;
    const Vec3 x = plan->surf.position;
    plan->detachedMat = detachedMaterialAt(scene, x);
    const bool lambertian = scene.material.lambertianOnly();
    const double alphaSample = maxWith(plan->detachedMat.alpha, settings.alphaMin);
    const double r = scene.shellRadii[t];

    plan->samples.reserve(settings.sm + settings.sl);

    auto push = [&](const Vec3& wi, double pdfM, double pdfL, bool fromMaterial) {
        const double cosI = dot(n, wi);
        if (cosI <= 0) return;
        const double w = misWeight(settings, fromMaterial, pdfM, pdfL);
        if (w <= 0) return;
        if (scene.geometry.selfOcclusion(x, n, wi) <= 0) return;
        SampleRecord rec;
        rec.dir = wi;
        rec.shellDir = shellIntersect(x, wi, r);
        rec.weight = w * cosI;
        rec.fromMaterial = fromMaterial;
        plan->samples.push_back(rec);
    };

    {
        RandomStream ms(seed, t, pixelKey, pass, StreamPurpose::MaterialSamples);
        StratifiedBatch batch = stratified2D(ms, settings.sm);
        RandomStream retry = ms.fork(0x6d61742dULL);
        for (const auto& [u, v] : batch.uv) {
            DirectionSample s = lambertian ? sampleCosine(u, v, n)
                                           : sampleGgx(u, v, alphaSample, plan->wo, n, &retry);
            if (s.pdf <= 0) continue;
            push(s.dir, s.pdf, state.envTable.pdf(s.dir), true);
        }
    }
    {
        RandomStream ls(seed, t, pixelKey, pass, StreamPurpose::EnvSamples);
        StratifiedBatch batch = stratified2D(ls, settings.sl);
        for (const auto& [u, v] : batch.uv) {
            EnvSamplingTable::Sample s = state.envTable.sample(u, v);
            const double pdfM = lambertian ? pdfCosine(n, s.dir)
                                           : pdfGgx(alphaSample, plan->wo, s.dir, n);
            push(s.dir, pdfM, s.pdf, false);
        }
    }
}

}  // namespace

PassState PassState::build(const Scene& scene) {
    return PassState{EnvSamplingTable::build(*scene.env, *scene.params)};
}

PixelPlan planPixel(const Scene& scene, const PassState& state, int t, int row, int col,
                    const RenderSettings& settings, uint64_t seed, uint64_t pass) {
    ECLIPSE_REQUIRE(validStratifiedCount(settings.sm) && validStratifiedCount(settings.sl),
                    "sample counts must be powers of two with odd exponent");
    const Camera& cam = scene.cameras[t];
    const uint64_t pixelKey = static_cast<uint64_t>(row) * cam.imageW + col;

    PixelPlan plan;
    RandomStream primary(seed, t, pixelKey, pass, StreamPurpose::Primary);
    const auto [pu, pv] = primary.next2();
    const Ray ray = cam.generateRay(row, col, pu, pv);

    auto hit = scene.geometry.intersect(ray);
    if (!hit) {
        plan.hit = false;
        plan.missDir = ray.direction;
        plan.missShellDir = shellExitDir(ray.origin, ray.direction, scene.shellRadii[t]);
        return plan;
    }
    plan.hit = true;
    plan.surf = *hit;
    plan.wo = -ray.direction;
    planSamples(scene, state, t, pixelKey, settings, seed, pass, &plan);
    return plan;
}

PixelPlan planForHit(const Scene& scene, const PassState& state, int t, const SurfaceHit& hit,
                     const Vec3& wo, const RenderSettings& settings, uint64_t seed,
                     uint64_t pass) {
    PixelPlan plan;
    plan.hit = true;
    plan.surf = hit;
    plan.wo = wo;
    planSamples(scene, state, t, /*pixelKey=*/0, settings, seed, pass, &plan);
    return plan;
}

namespace {

// Shared estimator body. EnvFn(dir)->Rgb<S>, MaskFn(shellDir)->S,
// MatFn(x)->BrdfParams<S>, SumFn(vector<S>)->S.
template <typename S, typename EnvFn, typename MaskFn, typename MatFn, typename SumFn>
Rgb<S> evalPlanImpl(const Scene& scene, const PixelPlan& plan, const RenderSettings& settings,
                    EnvFn&& envAt, MaskFn&& maskAt, MatFn&& materialAt, SumFn&& sumOf) {
    if (!plan.hit) {
        if (!settings.renderBackground) return Rgb<S>(S(0.0));
        Rgb<S> L = envAt(plan.missDir);
        S m = maskAt(plan.missShellDir);
        return {L.r * m, L.g * m, L.b * m};
    }

    const bool lambertian = scene.material.lambertianOnly();
    const Vec3 n = plan.surf.normal;
    std::vector<S> termsR, termsG, termsB;
    termsR.reserve(plan.samples.size());
    termsG.reserve(plan.samples.size());
    termsB.reserve(plan.samples.size());

    BrdfParams<S> mat = materialAt(plan.surf.position);

    for (const SampleRecord& rec : plan.samples) {
        Rgb<S> L = envAt(rec.dir);
        S m = maskAt(rec.shellDir);
        if (lambertian) {
            // Direction-independent reflectance folds in after the sum.
            S mw = m * rec.weight;
            termsR.push_back(L.r * mw);
            termsG.push_back(L.g * mw);
            termsB.push_back(L.b * mw);
        } else {
            Rgb<S> f = evalBrdf(mat, n, rec.dir, plan.wo, settings.alphaMin);
            S mw = m * rec.weight;
            termsR.push_back(L.r * f.r * mw);
            termsG.push_back(L.g * f.g * mw);
            termsB.push_back(L.b * f.b * mw);
        }
    }

    Rgb<S> sum{sumOf(termsR), sumOf(termsG), sumOf(termsB)};
    if (lambertian) {
        Rgb<S> f = lambertianBrdf(mat.rho);
        return {sum.r * f.r, sum.g * f.g, sum.b * f.b};
    }
    return sum;
}

}  // namespace

Rgbd evalPlan(const Scene& scene, const PixelPlan& plan, int t, const RenderSettings& settings) {
    const ad::ParameterStore& store = *scene.params;
    auto envAt = [&](const Vec3& d) { return scene.env->eval(store, d); };
    auto maskAt = [&](const Vec3& sd) -> double {
        if (scene.occluders) return scene.occluders->maskAtShellDir(store, t, sd);
        if (!scene.trueCaps.empty()) return scene.trueCaps[t].maskAtShellDir(sd);
        return 1.0;
    };
    auto materialAt = [&](const Vec3& x) { return detachedMaterialAt(scene, x); };
    auto sumOf = [](const std::vector<double>& xs) {
        double acc = 0;
        for (double v : xs) acc += v;
        return acc;
    };
    return evalPlanImpl<double>(scene, plan, settings, envAt, maskAt, materialAt, sumOf);
}

Rgb<ad::Value> evalPlan(ad::Tape* tape, const Scene& scene, const PixelPlan& plan, int t,
                        const RenderSettings& settings) {
    const ad::ParameterStore& store = *scene.params;
    auto envAt = [&](const Vec3& d) { return scene.env->eval(tape, store, d); };
    auto maskAt = [&](const Vec3& sd) -> ad::Value {
        if (scene.occluders) return scene.occluders->maskAtShellDir(tape, store, t, sd);
        if (!scene.trueCaps.empty()) return ad::Value(scene.trueCaps[t].maskAtShellDir(sd));
        return ad::Value(1.0);
    };
    auto materialAt = [&](const Vec3& x) -> BrdfParams<ad::Value> {
        if (scene.material.type == MaterialModel::Type::Field)
            return scene.material.field->query(tape, store, x);
        BrdfParams<double> p = scene.material.fixed.at(x);
        return {{ad::Value(p.rho.r), ad::Value(p.rho.g), ad::Value(p.rho.b)},
                ad::Value(p.alpha), ad::Value(p.kappa)};
    };
    auto sumOf = [&](const std::vector<ad::Value>& xs) { return tape->sum(xs); };
    return evalPlanImpl<ad::Value>(scene, plan, settings, envAt, maskAt, materialAt, sumOf);
}

Rgbd shade(const Scene& scene, const PassState& state, int t, const SurfaceHit& hit,
           const Vec3& wo, const RenderSettings& settings, uint64_t seed, uint64_t pass) {
    PixelPlan plan = planForHit(scene, state, t, hit, wo, settings, seed, pass);
    return evalPlan(scene, plan, t, settings);
}

Rgbd renderPixel(const Scene& scene, const PassState& state, int t, int row, int col,
                 const RenderSettings& settings, uint64_t seed, uint64_t pass) {
    PixelPlan plan = planPixel(scene, state, t, row, col, settings, seed, pass);
    return evalPlan(scene, plan, t, settings);
}

Image renderImage(const Scene& scene, int t, const RenderSettings& settings, uint64_t seed) {
    const Camera& cam = scene.cameras[t];
    Image img(cam.imageH, cam.imageW);
    const PassState state = PassState::build(scene);
    const double invPasses = 1.0 / settings.aaPasses;
    parallelChunks(cam.imageH, 1, [&](int64_t, int64_t rowBegin, int64_t rowEnd) {
        for (int64_t row = rowBegin; row < rowEnd; ++row) {
            for (int col = 0; col < cam.imageW; ++col) {
                Rgbd acc;
                for (int p = 0; p < settings.aaPasses; ++p)
                    acc += renderPixel(scene, state, t, static_cast<int>(row), col, settings,
                                       seed, p);
                img.at(static_cast<int>(row), col) = acc * invPasses;
            }
        }
    });
    return img;
}

std::vector<uint8_t> objectMask(const Scene& scene, int t) {
    const Camera& cam = scene.cameras[t];
    std::vector<uint8_t> mask(static_cast<size_t>(cam.imageH) * cam.imageW, 0);
    for (int row = 0; row < cam.imageH; ++row)
        for (int col = 0; col < cam.imageW; ++col) {
            const Ray ray = cam.generateRay(row, col, 0.5, 0.5);
            mask[static_cast<size_t>(row) * cam.imageW + col] =
                scene.geometry.intersect(ray) ? 1 : 0;
        }
    return mask;
}

ShadeStats shadeWithStats(const Scene& scene, const PassState& state, int t,
                          const SurfaceHit& hit, const Vec3& wo,
                          const RenderSettings& settings, uint64_t seed, uint64_t pass) {
    PixelPlan plan = planForHit(scene, state, t, hit, wo, settings, seed, pass);

    // Per-strategy contribution lists (zeros kept for dropped samples).
    std::vector<Rgbd> contrib[2];
    contrib[0].assign(settings.sm, Rgbd{});
    contrib[1].assign(settings.sl, Rgbd{});
    size_t next[2] = {0, 0};

    const ad::ParameterStore& store = *scene.params;
    const Vec3 n = hit.normal;
    const bool lambertian = scene.material.lambertianOnly();
    BrdfParams<double> mat = plan.detachedMat;

    Rgbd sum;
    for (const SampleRecord& rec : plan.samples) {
        double m = 1.0;
        if (scene.occluders) m = scene.occluders->maskAtShellDir(store, t, rec.shellDir);
        else if (!scene.trueCaps.empty()) m = scene.trueCaps[t].maskAtShellDir(rec.shellDir);
        Rgbd L = scene.env->eval(store, rec.dir);
        Rgbd f = lambertian ? lambertianBrdf(mat.rho)
                            : evalBrdf(mat, n, rec.dir, wo, settings.alphaMin);
        Rgbd c = L * f * (m * rec.weight);
        const int strat = rec.fromMaterial ? 0 : 1;
        if (next[strat] < contrib[strat].size()) contrib[strat][next[strat]++] = c;
        sum += c;
    }

    auto varOf = [](const std::vector<Rgbd>& cs) {
        Rgbd mean;
        for (const Rgbd& c : cs) mean += c;
        mean = mean * (1.0 / cs.size());
        Rgbd var;
        for (const Rgbd& c : cs) {
            Rgbd d = c - mean;
            var += d * d;
        }
        return var * (1.0 / std::max<size_t>(1, cs.size() - 1));
    };
    const Rgbd vm = varOf(contrib[0]);
    const Rgbd vl = varOf(contrib[1]);
    Rgbd se{std::sqrt(settings.sm * vm.r + settings.sl * vl.r),
            std::sqrt(settings.sm * vm.g + settings.sl * vl.g),
            std::sqrt(settings.sm * vm.b + settings.sl * vl.b)};
    return {sum, se};
}

Image relight(const Scene& scene, int t, const RenderSettings& settings, uint64_t seed,
              const RelightOptions& options) {
    Scene relit = scene;
    relit.occluders = nullptr;
    relit.trueCaps.clear();

    if (options.envOverride) {
        auto overrideStore = std::make_shared<ad::ParameterStore>(*scene.params);
        relit.params = overrideStore;
        relit.env->setFromRadiance(overrideStore.get(), *options.envOverride);
    }
    if (options.roughnessOverride >= 0) {
        if (relit.material.type == MaterialModel::Type::Field)
            relit.material.field->alphaRange = {options.roughnessOverride,
                                                options.roughnessOverride};
        else
            relit.material.fixed.alpha = options.roughnessOverride;
    }
    if (options.albedoScale != 1.0 && relit.material.type == MaterialModel::Type::Fixed) {
        relit.material.fixed.rho = relit.material.fixed.rho * options.albedoScale;
        relit.material.fixed.rho2 = relit.material.fixed.rho2 * options.albedoScale;
    }
    return renderImage(relit, t, settings, seed);
}

}  // namespace eclipse
