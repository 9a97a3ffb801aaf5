#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eclipse/math.h"

namespace eclipse {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
};

struct SurfaceHit {
    Vec3 position;
    Vec3 normal;        // unit length, possibly interpolated
    double t = 0;       // ray parameter of the hit
    int primitive = -1; // triangle index, -1 for analytic shapes
    double baryU = 0, baryV = 0;
};

struct TriangleMeshData {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;          // per vertex, unit length
    std::vector<int> indices;           // 3 per face: position==normal index
};

// Axis-aligned BVH over triangles; median split on the widest axis.
class Bvh {
 public:
    void build(const TriangleMeshData& mesh);
    // Visits candidate triangles for the ray; returns indices to test.
    template <typename F>
    void traverse(const Ray& ray, double tMax, F&& visit) const;
    bool empty() const { return nodes_.empty(); }

 private:
    struct BvhNode {
        Vec3 boundsMin, boundsMax;
        int left = -1, right = -1;   // children, or
        int first = 0, count = 0;    // leaf triangle range
    };
    std::vector<BvhNode> nodes_;
    std::vector<int> order_;  // triangle indices in leaf order
    friend class ObjectGeometry;
};

// The fixed, known object surface: an analytic sphere or a triangle mesh.
class ObjectGeometry {
 public:
    ObjectGeometry() = default;  // unit sphere at the origin

    static ObjectGeometry sphere(const Vec3& center, double radius);
    static ObjectGeometry mesh(TriangleMeshData data);

    // Nearest intersection with t > epsilon. Empty on miss.
    std::optional<SurfaceHit> intersect(const Ray& ray) const;

    // Any-hit query for shadow rays (origin offset applied by the caller).
    bool occluded(const Ray& ray) const;

    // 1 when the environment is visible from x along wi through the object's
    // own geometry, else 0. Treated as a constant during differentiation.
    double selfOcclusion(const Vec3& x, const Vec3& n, const Vec3& wi) const;

    // Radius of the tightest origin-centered sphere containing the object.
    double boundingRadius() const { return boundingRadius_; }

    bool isSphere() const { return isSphere_; }
    const TriangleMeshData& meshData() const { return mesh_; }

    static constexpr double kIntersectEpsilon = 1e-6;

 private:
    bool isSphere_ = true;
    Vec3 sphereCenter_;
    double sphereRadius_ = 1;
    TriangleMeshData mesh_;
    Bvh bvh_;
    bool bruteForce_ = false;  // below the BVH size cutoff
    double boundingRadius_ = 1;
    double shadowEps_ = 1e-6;
};

// Unit-length direction of the point where the ray (x, wi) exits the
// origin-centered sphere of radius r. Requires |x| < r (single forward hit).
Vec3 shellIntersect(const Vec3& x, const Vec3& wi, double r);

// OBJ subset: v, vn, f with v//vn indices (triangles or fans).
TriangleMeshData readObj(const std::string& path);
void writeObj(const std::string& path, const TriangleMeshData& mesh);

// Procedural test meshes.
TriangleMeshData makeQuad();  // two triangles spanning [-1,1]^2 in z=0
// Displaced icosphere ("blob"): `subdivisions` levels, radial displacement of
// relative amplitude `bump` driven by the seed. Smooth per-vertex normals.
TriangleMeshData makeBlob(int subdivisions, double bump, uint64_t seed);

}  // namespace eclipse
