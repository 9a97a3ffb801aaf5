#include "eclipse/geometry.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "eclipse/error.h"
#include "eclipse/rng.h"

namespace eclipse {

namespace {

constexpr int kBruteForceCutoff = 64;

struct TriHit {
    double t, u, v;
};

// Moeller-Trumbore.
inline bool intersectTriangle(const Ray& ray, const Vec3& p0, const Vec3& p1, const Vec3& p2,
                              double tMin, double tMax, TriHit* out) {
    const Vec3 e1 = p1 - p0;
    const Vec3 e2 = p2 - p0;
    const Vec3 pv = cross(ray.direction, e2);
    const double det = dot(e1, pv);
    if (std::abs(det) < 1e-14) return false;
    const double invDet = 1.0 / det;
    const Vec3 tv = ray.origin - p0;
    const double u = dot(tv, pv) * invDet;
    if (u < 0 || u > 1) return false;
    const Vec3 qv = cross(tv, e1);
    const double v = dot(ray.direction, qv) * invDet;
    if (v < 0 || u + v > 1) return false;
    const double t = dot(e2, qv) * invDet;
    if (t <= tMin || t >= tMax) return false;
    *out = {t, u, v};
    return true;
}

inline bool intersectAabb(const Ray& ray, const Vec3& bmin, const Vec3& bmax, double tMax) {
    double t0 = 0, t1 = tMax;
    for (int a = 0; a < 3; ++a) {
        const double o = ray.origin[a];
        const double d = ray.direction[a];
        double inv = 1.0 / d;
        double near = (bmin[a] - o) * inv;
        double far = (bmax[a] - o) * inv;
        if (near > far) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// BVH
// ---------------------------------------------------------------------------

void Bvh::build(const TriangleMeshData& mesh) {
    const int triCount = static_cast<int>(mesh.indices.size() / 3);
    order_.resize(triCount);
    for (int i = 0; i < triCount; ++i) order_[i] = i;

    std::vector<Vec3> centroids(triCount);
    for (int i = 0; i < triCount; ++i) {
        const Vec3& a = mesh.positions[mesh.indices[3 * i]];
        const Vec3& b = mesh.positions[mesh.indices[3 * i + 1]];
        const Vec3& c = mesh.positions[mesh.indices[3 * i + 2]];
        centroids[i] = (a + b + c) / 3.0;
    }

    auto triBounds = [&](int tri, Vec3* mn, Vec3* mx) {
        const Vec3& a = mesh.positions[mesh.indices[3 * tri]];
        const Vec3& b = mesh.positions[mesh.indices[3 * tri + 1]];
        const Vec3& c = mesh.positions[mesh.indices[3 * tri + 2]];
        mn->x = std::min({a.x, b.x, c.x});
        mn->y = std::min({a.y, b.y, c.y});
        mn->z = std::min({a.z, b.z, c.z});
        mx->x = std::max({a.x, b.x, c.x});
        mx->y = std::max({a.y, b.y, c.y});
        mx->z = std::max({a.z, b.z, c.z});
    };

    nodes_.clear();
    nodes_.reserve(2 * triCount);

    struct Task {
        int node, first, count;
    };
    nodes_.push_back({});
    std::vector<Task> stack{{0, 0, triCount}};
    while (!stack.empty()) {
        Task task = stack.back();
        stack.pop_back();
        BvhNode& node = nodes_[task.node];
        Vec3 mn{1e30, 1e30, 1e30}, mx{-1e30, -1e30, -1e30};
        for (int k = task.first; k < task.first + task.count; ++k) {
            Vec3 tmn, tmx;
            triBounds(order_[k], &tmn, &tmx);
            mn.x = std::min(mn.x, tmn.x); mn.y = std::min(mn.y, tmn.y); mn.z = std::min(mn.z, tmn.z);
            mx.x = std::max(mx.x, tmx.x); mx.y = std::max(mx.y, tmx.y); mx.z = std::max(mx.z, tmx.z);
        }
        node.boundsMin = mn;
        node.boundsMax = mx;
        if (task.count <= 4) {
            node.first = task.first;
            node.count = task.count;
            continue;
        }
        const Vec3 extent = mx - mn;
        int axis = 0;
        if (extent.y > extent.x) axis = 1;
        if (extent.z > extent[axis]) axis = 2;
        int mid = task.first + task.count / 2;
        std::nth_element(order_.begin() + task.first, order_.begin() + mid,
                         order_.begin() + task.first + task.count,
                         [&](int a, int b) { return centroids[a][axis] < centroids[b][axis]; });
        int leftIdx = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        nodes_.push_back({});
        nodes_[task.node].left = leftIdx;
        nodes_[task.node].right = leftIdx + 1;
        stack.push_back({leftIdx, task.first, mid - task.first});
        stack.push_back({leftIdx + 1, mid, task.first + task.count - mid});
    }
}

template <typename F>
void Bvh::traverse(const Ray& ray, double tMax, F&& visit) const {
    if (nodes_.empty()) return;
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const BvhNode& node = nodes_[stack[--top]];
        if (!intersectAabb(ray, node.boundsMin, node.boundsMax, tMax)) continue;
        if (node.left < 0) {
            for (int k = node.first; k < node.first + node.count; ++k)
                visit(order_[k]);
        } else {
            stack[top++] = node.left;
            stack[top++] = node.right;
        }
    }
}

// ---------------------------------------------------------------------------
// ObjectGeometry
// ---------------------------------------------------------------------------

ObjectGeometry ObjectGeometry::sphere(const Vec3& center, double radius) {
    ECLIPSE_REQUIRE(radius > 0, "sphere radius must be positive");
    ObjectGeometry g;
    g.isSphere_ = true;
    g.sphereCenter_ = center;
    g.sphereRadius_ = radius;
    g.boundingRadius_ = length(center) + radius;
    g.shadowEps_ = 1e-6 * g.boundingRadius_;
    return g;
}

ObjectGeometry ObjectGeometry::mesh(TriangleMeshData data) {
    ECLIPSE_REQUIRE(data.indices.size() % 3 == 0, "mesh indices not a multiple of 3");
    ECLIPSE_REQUIRE(data.positions.size() == data.normals.size(),
                    "mesh needs one normal per vertex");
    ObjectGeometry g;
    g.mesh_ = std::move(data);
    for (Vec3& n : g.mesh_.normals) n = normalize(n);
    double r2 = 0;
    for (const Vec3& p : g.mesh_.positions) r2 = std::max(r2, lengthSquared(p));
    g.boundingRadius_ = std::sqrt(r2);
    g.shadowEps_ = 1e-6 * std::max(g.boundingRadius_, 1e-12);
    g.bruteForce_ = g.mesh_.indices.size() / 3 < kBruteForceCutoff;
    if (!g.bruteForce_) g.bvh_.build(g.mesh_);
    return g;
}

std::optional<SurfaceHit> ObjectGeometry::intersect(const Ray& ray) const {
    if (isSphere_) {
        const Vec3 oc = ray.origin - sphereCenter_;
        const double b = dot(oc, ray.direction);
        const double c = lengthSquared(oc) - sphereRadius_ * sphereRadius_;
        const double disc = b * b - c;
        if (disc < 0) return std::nullopt;
        const double sq = std::sqrt(disc);
        double t = -b - sq;
        if (t <= kIntersectEpsilon) t = -b + sq;
        if (t <= kIntersectEpsilon) return std::nullopt;
        SurfaceHit hit;
        hit.t = t;
        hit.position = ray.origin + ray.direction * t;
        hit.normal = normalize(hit.position - sphereCenter_);
        return hit;
    }

    double best = 1e30;
    TriHit bestHit{};
    int bestTri = -1;
    auto test = [&](int tri) {
        TriHit h;
        if (intersectTriangle(ray, mesh_.positions[mesh_.indices[3 * tri]],
                              mesh_.positions[mesh_.indices[3 * tri + 1]],
                              mesh_.positions[mesh_.indices[3 * tri + 2]],
                              kIntersectEpsilon, best, &h)) {
            best = h.t;
            bestHit = h;
            bestTri = tri;
        }
    };
    if (bruteForce_) {
        const int n = static_cast<int>(mesh_.indices.size() / 3);
        for (int tri = 0; tri < n; ++tri) test(tri);
    } else {
        bvh_.traverse(ray, best, test);
    }
    if (bestTri < 0) return std::nullopt;

    SurfaceHit hit;
    hit.t = bestHit.t;
    hit.primitive = bestTri;
    hit.baryU = bestHit.u;
    hit.baryV = bestHit.v;
    hit.position = ray.origin + ray.direction * bestHit.t;
    const Vec3& n0 = mesh_.normals[mesh_.indices[3 * bestTri]];
    const Vec3& n1 = mesh_.normals[mesh_.indices[3 * bestTri + 1]];
    const Vec3& n2 = mesh_.normals[mesh_.indices[3 * bestTri + 2]];
    hit.normal = normalize(n0 * (1 - bestHit.u - bestHit.v) + n1 * bestHit.u + n2 * bestHit.v);
    return hit;
}

bool ObjectGeometry::occluded(const Ray& ray) const {
    if (isSphere_) {
        const Vec3 oc = ray.origin - sphereCenter_;
        const double b = dot(oc, ray.direction);
        const double c = lengthSquared(oc) - sphereRadius_ * sphereRadius_;
        const double disc = b * b - c;
        if (disc < 0) return false;
        const double sq = std::sqrt(disc);
        return (-b - sq > kIntersectEpsilon) || (-b + sq > kIntersectEpsilon);
    }
    bool hit = false;
    auto test = [&](int tri) {
        if (hit) return;
        TriHit h;
        if (intersectTriangle(ray, mesh_.positions[mesh_.indices[3 * tri]],
                              mesh_.positions[mesh_.indices[3 * tri + 1]],
                              mesh_.positions[mesh_.indices[3 * tri + 2]],
                              kIntersectEpsilon, 1e30, &h))
            hit = true;
    };
    if (bruteForce_) {
        const int n = static_cast<int>(mesh_.indices.size() / 3);
        for (int tri = 0; tri < n && !hit; ++tri) test(tri);
    } else {
        bvh_.traverse(ray, 1e30, test);
    }
    return hit;
}

double ObjectGeometry::selfOcclusion(const Vec3& x, const Vec3& n, const Vec3& wi) const {
    Ray shadow{x + n * shadowEps_, wi};
    return occluded(shadow) ? 0.0 : 1.0;
}

// ---------------------------------------------------------------------------
// Shell intersection
// ---------------------------------------------------------------------------

Vec3 shellIntersect(const Vec3& x, const Vec3& wi, double r) {
    const double x2 = lengthSquared(x);
    ECLIPSE_REQUIRE(x2 < r * r, "shellIntersect: point must be inside the shell");
    const double xw = dot(x, wi);
    const double s = std::sqrt(xw * xw + r * r - x2) - xw;
    return (x + wi * s) / r;
}

// ---------------------------------------------------------------------------
// OBJ I/O (v / vn / f with v//vn references)
// ---------------------------------------------------------------------------

TriangleMeshData readObj(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw RuntimeError("obj: cannot open: " + path);
    std::vector<Vec3> positions, normals;
    // (position index, normal index) -> output vertex
    std::map<std::pair<int, int>, int> remap;
    TriangleMeshData mesh;

    auto vertexFor = [&](int pi, int ni) {
        auto key = std::make_pair(pi, ni);
        auto it = remap.find(key);
        if (it != remap.end()) return it->second;
        ECLIPSE_REQUIRE(pi >= 1 && pi <= static_cast<int>(positions.size()), "obj: bad position index");
        ECLIPSE_REQUIRE(ni >= 1 && ni <= static_cast<int>(normals.size()), "obj: bad normal index");
        mesh.positions.push_back(positions[pi - 1]);
        mesh.normals.push_back(normals[ni - 1]);
        int idx = static_cast<int>(mesh.positions.size()) - 1;
        remap.emplace(key, idx);
        return idx;
    };

    std::string line;
    while (std::getline(f, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            ls >> p.x >> p.y >> p.z;
            positions.push_back(p);
        } else if (tag == "vn") {
            Vec3 n;
            ls >> n.x >> n.y >> n.z;
            normals.push_back(n);
        } else if (tag == "f") {
            std::vector<int> verts;
            std::string corner;
            while (ls >> corner) {
                auto sep = corner.find("//");
                if (sep == std::string::npos)
                    throw RuntimeError("obj: face corner without //normal: " + corner);
                int pi = std::stoi(corner.substr(0, sep));
                int ni = std::stoi(corner.substr(sep + 2));
                verts.push_back(vertexFor(pi, ni));
            }
            if (verts.size() < 3) throw RuntimeError("obj: face with fewer than 3 vertices");
            for (size_t k = 2; k < verts.size(); ++k) {  // fan triangulation
                mesh.indices.push_back(verts[0]);
                mesh.indices.push_back(verts[k - 1]);
                mesh.indices.push_back(verts[k]);
            }
        }
    }
    if (mesh.indices.empty()) throw RuntimeError("obj: no faces found: " + path);
    return mesh;
}

void writeObj(const std::string& path, const TriangleMeshData& mesh) {
    std::ofstream f(path);
    if (!f) throw RuntimeError("obj: cannot open for writing: " + path);
    f.precision(12);
    for (const Vec3& p : mesh.positions) f << "v " << p.x << " " << p.y << " " << p.z << "\n";
    for (const Vec3& n : mesh.normals) f << "vn " << n.x << " " << n.y << " " << n.z << "\n";
    for (size_t i = 0; i + 2 < mesh.indices.size(); i += 3)
        f << "f " << mesh.indices[i] + 1 << "//" << mesh.indices[i] + 1 << " "
          << mesh.indices[i + 1] + 1 << "//" << mesh.indices[i + 1] + 1 << " "
          << mesh.indices[i + 2] + 1 << "//" << mesh.indices[i + 2] + 1 << "\n";
    if (!f) throw RuntimeError("obj: short write: " + path);
}

// ---------------------------------------------------------------------------
// Procedural meshes
// ---------------------------------------------------------------------------

TriangleMeshData makeQuad() {
    TriangleMeshData m;
    m.positions = {{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}};
    m.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
    m.indices = {0, 1, 2, 0, 2, 3};
    return m;
}

namespace {

// Icosahedron + midpoint subdivision on the unit sphere.
void icosphere(int subdivisions, std::vector<Vec3>* verts, std::vector<int>* tris) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& p : v) p = normalize(p);
    std::vector<int> f = {0, 11, 5, 0, 5, 1, 0, 1, 7, 0, 7, 10, 0, 10, 11,
                          1, 5, 9, 5, 11, 4, 11, 10, 2, 10, 7, 6, 7, 1, 8,
                          3, 9, 4, 3, 4, 2, 3, 2, 6, 3, 6, 8, 3, 8, 9,
                          4, 9, 5, 2, 4, 11, 6, 2, 10, 8, 6, 7, 9, 8, 1};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midCache;
        auto midpoint = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midCache.find(key);
            if (it != midCache.end()) return it->second;
            v.push_back(normalize((v[a] + v[b]) * 0.5));
            int idx = static_cast<int>(v.size()) - 1;
            midCache.emplace(key, idx);
            return idx;
        };
        std::vector<int> nf;
        nf.reserve(f.size() * 4);
        for (size_t i = 0; i < f.size(); i += 3) {
            int a = f[i], b = f[i + 1], c = f[i + 2];
            int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
            int quad[12] = {a, ab, ca, b, bc, ab, c, ca, bc, ab, bc, ca};
            nf.insert(nf.end(), quad, quad + 12);
        }
        f = std::move(nf);
    }
    *verts = std::move(v);
    *tris = std::move(f);
}

}  // namespace

TriangleMeshData makeBlob(int subdivisions, double bump, uint64_t seed) {
    std::vector<Vec3> verts;
    std::vector<int> tris;
    icosphere(subdivisions, &verts, &tris);

    // Smooth radial displacement from a handful of seeded cosine lobes.
    RandomStream rs(seed, 0, 0, 0, StreamPurpose::Init);
    struct Lobe {
        Vec3 dir;
        double freq, phase, weight;
    };
    std::vector<Lobe> lobes;
    for (int i = 0; i < 6; ++i) {
        double z = 2 * rs.next() - 1;
        double ph = kTwoPi * rs.next();
        double s = std::sqrt(std::max(0.0, 1 - z * z));
        lobes.push_back({{s * std::cos(ph), s * std::sin(ph), z},
                         1.0 + 3.0 * rs.next(), kTwoPi * rs.next(), rs.next()});
    }
    double wsum = 0;
    for (const Lobe& l : lobes) wsum += l.weight;

    TriangleMeshData m;
    m.positions.resize(verts.size());
    m.normals.assign(verts.size(), Vec3{0, 0, 0});
    for (size_t i = 0; i < verts.size(); ++i) {
        double d = 0;
        for (const Lobe& l : lobes)
            d += l.weight * std::cos(l.freq * dot(verts[i], l.dir) * kPi + l.phase);
        m.positions[i] = verts[i] * (1.0 + bump * d / wsum);
    }
    m.indices = tris;

    // Area-weighted smooth normals.
    for (size_t i = 0; i + 2 < m.indices.size(); i += 3) {
        const Vec3& a = m.positions[m.indices[i]];
        const Vec3& b = m.positions[m.indices[i + 1]];
        const Vec3& c = m.positions[m.indices[i + 2]];
        Vec3 fn = cross(b - a, c - a);
        m.normals[m.indices[i]] += fn;
        m.normals[m.indices[i + 1]] += fn;
        m.normals[m.indices[i + 2]] += fn;
    }
    for (Vec3& n : m.normals) n = normalize(n);
    return m;
}

}  // namespace eclipse
