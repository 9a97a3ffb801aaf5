#pragma once

#include <string>
#include <vector>

#include "eclipse/config.h"
#include "eclipse/pfm.h"
#include "eclipse/renderer.h"
#include "eclipse/scene.h"

namespace eclipse {

// Geometry descriptor recorded in dataset manifests so a solve run can
// reconstruct the identical object.
struct GeometryDesc {
    enum class Kind { Sphere, Mesh };
    Kind kind = Kind::Sphere;
    double sphereRadius = 1.0;
    std::string meshPath;  // relative to the manifest

    ObjectGeometry build(const std::string& baseDir) const;
};

// Self-contained synthetic dataset: images, poses, shells, and the ground
// truth used for evaluation.
struct Dataset {
    std::string baseDir;
    int frames = 0;
    int imageH = 0, imageW = 0;
    uint64_t seed = 0;
    GeometryDesc geometry;
    FixedMaterial gtMaterial;
    std::vector<Camera> cameras;
    std::vector<double> shellRadii;
    std::vector<CapOccluder> gtCaps;  // empty when rendered without occluders
    std::vector<std::string> imagePaths;
    Image gtEnv;  // linear radiance grid
    int envRows = 0, envCols = 0;

    Image loadImage(int t) const;
};

// Scene synthesis from a [scene] config document (geometry, material,
// environment, occluders, cameras). This is the data-generation scene:
// fixed material, single-level environment holding the ground truth, analytic
// cap occluders.
struct SceneBuildResult {
    Scene scene;
    Image gtEnv;
    GeometryDesc geometryDesc;
};
SceneBuildResult buildGroundTruthScene(const Config& cfg, const std::string& outDir);

// Renders every frame and writes images + manifest + ground-truth assets.
Dataset generateDataset(const Config& cfg, const std::string& outDir);

// Manifest I/O.
void writeManifest(const Dataset& data, const std::string& path);
Dataset readManifest(const std::string& path);

// Render settings from the [render] config section.
RenderSettings renderSettingsFromConfig(const Config& cfg);

}  // namespace eclipse
