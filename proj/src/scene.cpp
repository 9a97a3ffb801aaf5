#include "eclipse/scene.h"

#include <cmath>

#include "eclipse/error.h"

namespace eclipse {

Camera Camera::lookAt(const Vec3& position, const Vec3& target, const Vec3& upHint,
                      double fovYDegrees, int imageH, int imageW) {
    Camera c;
    c.position = position;
    c.forward = normalize(target - position);
    Vec3 up = upHint;
    if (std::abs(dot(normalize(up), c.forward)) > 0.999) up = Vec3{1, 0, 0};
    c.right = normalize(cross(c.forward, up));
    c.up = cross(c.right, c.forward);
    c.tanHalfFov = std::tan(degToRad(fovYDegrees) * 0.5);
    c.imageH = imageH;
    c.imageW = imageW;
    return c;
}

Ray Camera::generateRay(int row, int col, double u, double v) const {
    const double aspect = static_cast<double>(imageW) / imageH;
    // NDC in [-1, 1], v up.
    const double ndcX = 2.0 * (col + u) / imageW - 1.0;
    const double ndcY = 1.0 - 2.0 * (row + v) / imageH;
    const Vec3 dir = forward + right * (ndcX * tanHalfFov * aspect) + up * (ndcY * tanHalfFov);
    return {position, normalize(dir)};
}

std::vector<Camera> makeOrbitCameras(int count, double radius, double elevationDegrees,
                                     double fovYDegrees, int imageH, int imageW) {
    ECLIPSE_REQUIRE(count > 0 && radius > 0, "orbit: bad parameters");
    std::vector<Camera> cams;
    cams.reserve(count);
    const double el = degToRad(elevationDegrees);
    for (int t = 0; t < count; ++t) {
        const double az = kTwoPi * t / count;
        const Vec3 pos{radius * std::cos(el) * std::cos(az), radius * std::cos(el) * std::sin(az),
                       radius * std::sin(el)};
        cams.push_back(Camera::lookAt(pos, Vec3{0, 0, 0}, Vec3{0, 0, 1}, fovYDegrees, imageH, imageW));
    }
    return cams;
}

BrdfParams<double> FixedMaterial::at(const Vec3& x) const {
    BrdfParams<double> p;
    Rgbd albedo = rho;
    if (checker) {
        const int cx = static_cast<int>(std::floor(x.x * checkerScale)) & 1;
        const int cy = static_cast<int>(std::floor(x.y * checkerScale)) & 1;
        const int cz = static_cast<int>(std::floor(x.z * checkerScale)) & 1;
        albedo = ((cx ^ cy ^ cz) != 0) ? rho2 : rho;
    }
    p.rho = albedo;
    p.alpha = kind == Kind::Lambertian ? 1.0 : alpha;
    p.kappa = kind == Kind::Lambertian ? 0.0 : kappa;
    return p;
}

void Scene::validate() const {
    const int T = static_cast<int>(cameras.size());
    ECLIPSE_REQUIRE(T > 0, "scene: no cameras");
    ECLIPSE_REQUIRE(static_cast<int>(shellRadii.size()) == T, "scene: shell radius per frame");
    if (occluders) ECLIPSE_REQUIRE(occluders->frames() == T, "scene: occluder frame count");
    if (!trueCaps.empty())
        ECLIPSE_REQUIRE(static_cast<int>(trueCaps.size()) == T, "scene: cap per frame");
    for (int t = 0; t < T; ++t)
        ECLIPSE_REQUIRE(geometry.boundingRadius() < shellRadii[t],
                        "scene: object must fit inside every occluder shell");
}

double Scene::shellRadiusFor(const Camera& cam) { return length(cam.position); }

}  // namespace eclipse
