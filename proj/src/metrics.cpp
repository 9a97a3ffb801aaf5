#include "eclipse/metrics.h"

#include <cmath>
#include <fstream>

#include "eclipse/error.h"

namespace eclipse {

double imageRmse(const Image& a, const Image& b) {
    ECLIPSE_REQUIRE(a.height == b.height && a.width == b.width, "imageRmse: size mismatch");
    double acc = 0;
    for (size_t k = 0; k < a.pixels.size(); ++k) {
        const Rgbd d = a.pixels[k] - b.pixels[k];
        acc += d.r * d.r + d.g * d.g + d.b * d.b;
    }
    return std::sqrt(acc / (a.pixels.size() * 3.0));
}

double imageRelativeMse(const Image& estimate, const Image& reference) {
    ECLIPSE_REQUIRE(estimate.height == reference.height && estimate.width == reference.width,
                    "imageRelativeMse: size mismatch");
    double num = 0, den = 0;
    for (size_t k = 0; k < estimate.pixels.size(); ++k) {
        const Rgbd d = estimate.pixels[k] - reference.pixels[k];
        num += d.r * d.r + d.g * d.g + d.b * d.b;
        const Rgbd& r = reference.pixels[k];
        den += r.r * r.r + r.g * r.g + r.b * r.b;
    }
    ECLIPSE_REQUIRE(den > 0, "imageRelativeMse: zero reference energy");
    return num / den;
}

double psnrFromMse(double mse) {
    if (mse <= 0) return 99.0;
    return std::min(99.0, -10.0 * std::log10(mse));
}

namespace {

Image albedoImageImpl(const ObjectGeometry& geom, const Camera& cam,
                      const std::function<Rgbd(const Vec3&)>& rhoAt) {
    Image img(cam.imageH, cam.imageW);
    for (int i = 0; i < cam.imageH; ++i)
        for (int j = 0; j < cam.imageW; ++j) {
            const Ray ray = cam.generateRay(i, j, 0.5, 0.5);
            if (auto hit = geom.intersect(ray)) img.at(i, j) = rhoAt(hit->position);
        }
    return img;
}

}  // namespace

Image albedoImage(const Scene& scene, int t) {
    return albedoImageImpl(scene.geometry, scene.cameras[t], [&](const Vec3& x) {
        const BrdfParams<double> p =
            scene.material.type == MaterialModel::Type::Fixed
                ? scene.material.fixed.at(x)
                : scene.material.field->query(*scene.params, x);
        return p.rho;
    });
}

Image albedoImage(const ObjectGeometry& geom, const FixedMaterial& mat, const Camera& cam) {
    return albedoImageImpl(geom, cam, [&](const Vec3& x) { return mat.at(x).rho; });
}

double pearson(const std::vector<std::pair<double, double>>& xy) {
    const size_t n = xy.size();
    if (n < 2) return 0;
    double mx = 0, my = 0;
    for (const auto& [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (const auto& [x, y] : xy) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if (sxx <= 0 || syy <= 0) return 0;
    return sxy / std::sqrt(sxx * syy);
}

Metrics computeMetrics(const Scene& recovered, const Dataset& data) {
    Metrics m;
    const Image recEnv = recovered.env->toImage(*recovered.params);
    ECLIPSE_REQUIRE(recEnv.height == data.gtEnv.height && recEnv.width == data.gtEnv.width,
                    "metrics: environment grids must match");
    m.envRmseLinear = imageRmse(recEnv, data.gtEnv);
    m.envRelativeMse = imageRelativeMse(recEnv, data.gtEnv);

    // Albedo PSNR over object pixels of every frame.
    double se = 0;
    size_t count = 0;
    for (int t = 0; t < data.frames; ++t) {
        const Image rec = albedoImage(recovered, t);
        const Image gt = albedoImage(recovered.geometry, data.gtMaterial, data.cameras[t]);
        for (int i = 0; i < rec.height; ++i)
            for (int j = 0; j < rec.width; ++j) {
                const Ray ray = data.cameras[t].generateRay(i, j, 0.5, 0.5);
                if (!recovered.geometry.intersect(ray)) continue;
                const Rgbd d = rec.at(i, j) - gt.at(i, j);
                se += d.r * d.r + d.g * d.g + d.b * d.b;
                count += 3;
            }
    }
    m.albedoPsnr = count > 0 ? psnrFromMse(se / count) : 99.0;

    // Mask error vs blocked energy, on the ground-truth caps.
    if (!data.gtCaps.empty() && recovered.occluders) {
        // Ground-truth environment as a single-level pyramid for quadrature.
        ad::ParameterStore gtStore;
        EnvironmentPyramid gtPyr =
            EnvironmentPyramid::create(&gtStore, data.gtEnv.height, data.gtEnv.width, 1);
        gtPyr.setFromRadiance(&gtStore, data.gtEnv);

        const int qr = 64, qc = 128;
        for (int t = 0; t < data.frames; ++t) {
            double l1 = 0, wsum = 0, blocked = 0;
            for (int i = 0; i < qr; ++i) {
                const double theta = kPi * (i + 0.5) / qr;
                const double w = std::sin(theta) * (kPi / qr) * (kTwoPi / qc);
                for (int j = 0; j < qc; ++j) {
                    const Vec3 d = sphericalDir(theta, kTwoPi * (j + 0.5) / qc);
                    const double rec =
                        recovered.occluders->maskAtShellDir(*recovered.params, t, d);
                    const double gt = data.gtCaps[t].maskAtShellDir(d);
                    l1 += std::abs(rec - gt) * w;
                    wsum += w;
                    blocked += (1.0 - gt) * luminance(gtPyr.eval(gtStore, d)) * w;
                }
            }
            m.maskErrorVsBlockedEnergy.push_back({l1 / wsum, blocked});
        }
        m.maskEnergyPearson = pearson(m.maskErrorVsBlockedEnergy);
    }
    return m;
}

void writeMetricsCsv(const std::string& path, const Metrics& m) {
    std::ofstream f(path);
    if (!f) throw RuntimeError("metrics: cannot open " + path);
    f.precision(10);
    f << "metric,value\n";
    f << "env_rmse_linear," << m.envRmseLinear << "\n";
    f << "env_relative_mse," << m.envRelativeMse << "\n";
    f << "albedo_psnr_object_pixels," << m.albedoPsnr << "\n";
    f << "mask_energy_pearson," << m.maskEnergyPearson << "\n";
    for (size_t t = 0; t < m.maskErrorVsBlockedEnergy.size(); ++t)
        f << "mask_l1_frame_" << t << "," << m.maskErrorVsBlockedEnergy[t].first << "\n";
    for (size_t t = 0; t < m.maskErrorVsBlockedEnergy.size(); ++t)
        f << "blocked_energy_frame_" << t << "," << m.maskErrorVsBlockedEnergy[t].second << "\n";
    if (!f) throw RuntimeError("metrics: short write " + path);
}

}  // namespace eclipse
