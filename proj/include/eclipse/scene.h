#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "eclipse/autodiff.h"
#include "eclipse/envmap.h"
#include "eclipse/geometry.h"
#include "eclipse/material.h"
#include "eclipse/occluder.h"

namespace eclipse {

struct Camera {
    Vec3 position;
    Vec3 right, up, forward;  // orthonormal
    double tanHalfFov = 1.0;  // vertical
    int imageH = 0, imageW = 0;

    static Camera lookAt(const Vec3& position, const Vec3& target, const Vec3& upHint,
                         double fovYDegrees, int imageH, int imageW);

    // Ray through the square footprint of pixel (row, col) at fractional
    // offsets (u, v) in [0, 1)^2.
    Ray generateRay(int row, int col, double u, double v) const;
};

std::vector<Camera> makeOrbitCameras(int count, double radius, double elevationDegrees,
                                     double fovYDegrees, int imageH, int imageW);

// Direction-independent ground-truth material used for dataset synthesis.
struct FixedMaterial {
    enum class Kind { Lambertian, Ggx };
    Kind kind = Kind::Lambertian;
    Rgbd rho{0.5, 0.5, 0.5};
    double alpha = 0.6;
    double kappa = 0.04;
    bool checker = false;
    Rgbd rho2{0.2, 0.2, 0.2};
    double checkerScale = 2.0;

    BrdfParams<double> at(const Vec3& x) const;
    bool lambertian() const { return kind == Kind::Lambertian; }
};

// Either a fixed analytic material or an optimizable coordinate network.
struct MaterialModel {
    enum class Type { Fixed, Field };
    Type type = Type::Fixed;
    FixedMaterial fixed;
    std::optional<MaterialField> field;

    bool lambertianOnly() const {
        if (type == Type::Fixed) return fixed.lambertian();
        return field->mode() == MaterialField::OutputMode::Lambertian;
    }
};

// The complete forward model: fixed geometry and cameras plus the three
// optimizable components (environment, material, per-frame occluder masks).
// Parameters live in `params`; synthetic ground-truth scenes use analytic cap
// occluders in `trueCaps` instead of an OccluderSet.
struct Scene {
    ObjectGeometry geometry;
    MaterialModel material;
    std::shared_ptr<ad::ParameterStore> params;
    std::optional<EnvironmentPyramid> env;
    std::shared_ptr<OccluderSet> occluders;  // null = no occluder model
    std::vector<CapOccluder> trueCaps;       // empty = none
    std::vector<Camera> cameras;
    std::vector<double> shellRadii;          // r_t per frame

    int frames() const { return static_cast<int>(cameras.size()); }
    void validate() const;
    static double shellRadiusFor(const Camera& cam);
};

}  // namespace eclipse
