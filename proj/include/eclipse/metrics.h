#pragma once

#include <string>
#include <vector>

#include "eclipse/dataset.h"
#include "eclipse/scene.h"

namespace eclipse {

struct Metrics {
    double envRmseLinear = 0;
    double envRelativeMse = 0;
    double albedoPsnr = 0;  // object pixels, capped at 99 dB
    // Per frame: (mask L1 error over the shell, ground-truth blocked energy).
    std::vector<std::pair<double, double>> maskErrorVsBlockedEnergy;
    double maskEnergyPearson = 0;
};

double imageRmse(const Image& a, const Image& b);
double imageRelativeMse(const Image& estimate, const Image& reference);
double psnrFromMse(double mse);  // 10 log10(1/mse), capped at 99 dB

// Albedo channel of the material rendered through a camera (no lighting).
Image albedoImage(const Scene& scene, int t);
Image albedoImage(const ObjectGeometry& geom, const FixedMaterial& mat, const Camera& cam);

double pearson(const std::vector<std::pair<double, double>>& xy);

Metrics computeMetrics(const Scene& recovered, const Dataset& data);

void writeMetricsCsv(const std::string& path, const Metrics& m);

}  // namespace eclipse
