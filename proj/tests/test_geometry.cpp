#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eclipse/geometry.h"
#include "eclipse/rng.h"
#include "testutil.h"

using namespace eclipse;

namespace {

Vec3 randomUnit(RandomStream& rs) {
    const double z = 2 * rs.next() - 1;
    const double phi = kTwoPi * rs.next();
    const double s = std::sqrt(std::max(0.0, 1 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

// Brute-force nearest-hit over all triangles, written independently of the
// library intersection path (Cramer's rule instead of Moeller-Trumbore).
struct BruteHit {
    double t;
    int tri;
};
bool bruteForceHit(const TriangleMeshData& mesh, const Ray& ray, BruteHit* out) {
    bool found = false;
    double best = 1e30;
    int bestTri = -1;
    for (size_t f = 0; f + 2 < mesh.indices.size(); f += 3) {
        const Vec3& a = mesh.positions[mesh.indices[f]];
        const Vec3& b = mesh.positions[mesh.indices[f + 1]];
        const Vec3& c = mesh.positions[mesh.indices[f + 2]];
        const Vec3 e1 = b - a, e2 = c - a;
        const Vec3 nrm = cross(e1, e2);
        const double det = -dot(ray.direction, nrm);
        if (std::abs(det) < 1e-14) continue;
        const Vec3 ao = ray.origin - a;
        const double t = dot(ao, nrm) / det;
        if (t <= 1e-6 || t >= best) continue;
        const Vec3 dao = cross(ao, ray.direction);
        const double u = dot(e2, dao) / det;
        const double v = -dot(e1, dao) / det;
        if (u < 0 || v < 0 || u + v > 1) continue;
        best = t;
        bestTri = static_cast<int>(f / 3);
        found = true;
    }
    if (found) *out = {best, bestTri};
    return found;
}

}  // namespace

TEST_CASE("axis-aligned sphere hit") {
    auto geom = ObjectGeometry::sphere({0, 0, 0}, 1.0);
    auto hit = geom.intersect({{0, 0, -5}, {0, 0, 1}});
    REQUIRE(hit.has_value());
    CHECK(hit->position.z == doctest::Approx(-1.0));
    CHECK(hit->normal.z == doctest::Approx(-1.0));
    CHECK(std::abs(hit->position.x) < 1e-12);

    CHECK(!geom.intersect({{0, 3, -5}, {0, 0, 1}}).has_value());
}

TEST_CASE("mesh hits match brute force on random rays") {
    TriangleMeshData quad = makeQuad();
    auto geom = ObjectGeometry::mesh(quad);
    RandomStream rs(11, 0, 0, 0, StreamPurpose::Test);
    int hits = 0;
    for (int i = 0; i < 2000; ++i) {
        Ray ray;
        ray.origin = {4 * rs.next() - 2, 4 * rs.next() - 2, 2.0 + rs.next()};
        Vec3 target{4 * rs.next() - 2, 4 * rs.next() - 2, 0.0};
        ray.direction = normalize(target - ray.origin);
        auto got = geom.intersect(ray);
        BruteHit want;
        const bool wantHit = bruteForceHit(quad, ray, &want);
        REQUIRE(got.has_value() == wantHit);
        if (wantHit) {
            ++hits;
            CHECK(got->t == doctest::Approx(want.t).epsilon(1e-9));
            CHECK(got->primitive == want.tri);
        }
    }
    CHECK(hits > 200);
}

TEST_CASE("BVH path agrees with brute force on a blob mesh") {
    TriangleMeshData blob = makeBlob(3, 0.15, 42);  // ~1280 triangles, BVH active
    REQUIRE(blob.indices.size() / 3 >= 64);
    auto geom = ObjectGeometry::mesh(blob);
    RandomStream rs(12, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 500; ++i) {
        Ray ray;
        ray.origin = randomUnit(rs) * 3.0;
        ray.direction = normalize(randomUnit(rs) * 0.4 - ray.origin);
        auto got = geom.intersect(ray);
        BruteHit want;
        const bool wantHit = bruteForceHit(blob, ray, &want);
        REQUIRE(got.has_value() == wantHit);
        if (wantHit) CHECK(got->t == doctest::Approx(want.t).epsilon(1e-9));
    }
}

TEST_CASE("hit point invariant to origin offset along the ray") {
    auto geom = ObjectGeometry::sphere({0, 0, 0}, 1.0);
    RandomStream rs(13, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 200; ++i) {
        Vec3 origin = randomUnit(rs) * 4.0;
        Ray r1{origin, normalize(Vec3{0, 0, 0} - origin)};
        auto h1 = geom.intersect(r1);
        REQUIRE(h1.has_value());
        Ray r2{origin + r1.direction * 0.5, r1.direction};
        auto h2 = geom.intersect(r2);
        REQUIRE(h2.has_value());
        CHECK(length(h1->position - h2->position) < 1e-9);
    }
}

TEST_CASE("convex self-occlusion is visible above the horizon") {
    auto geom = ObjectGeometry::sphere({0, 0, 0}, 1.0);
    RandomStream rs(14, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 500; ++i) {
        const Vec3 n = randomUnit(rs);
        const Vec3 x = n;
        Vec3 wi = randomUnit(rs);
        if (dot(n, wi) <= 1e-6) continue;
        CHECK(geom.selfOcclusion(x, n, wi) == 1.0);
    }
}

TEST_CASE("concave V mesh blocks directions crossing the opposite face") {
    // Two walls meeting along y: z = x for x >= 0 and z = -x for x <= 0.
    TriangleMeshData v;
    v.positions = {{0, -2, 0}, {0, 2, 0}, {2, -2, 2}, {2, 2, 2},
                   {0, -2, 0}, {0, 2, 0}, {-2, -2, 2}, {-2, 2, 2}};
    Vec3 nR = normalize(Vec3{-1, 0, 1});
    Vec3 nL = normalize(Vec3{1, 0, 1});
    v.normals = {nR, nR, nR, nR, nL, nL, nL, nL};
    v.indices = {0, 2, 1, 1, 2, 3, 4, 5, 6, 5, 7, 6};
    auto geom = ObjectGeometry::mesh(v);

    const Vec3 x{1, 0, 1};
    const Vec3 n = nR;
    const Vec3 towardLeft = normalize(Vec3{-1.5, 0, 1.5} - x);
    const Vec3 up = normalize(Vec3{-0.2, 0, 1.0});
    CHECK(geom.selfOcclusion(x, n, towardLeft) == 0.0);
    CHECK(geom.selfOcclusion(x, n, up) == 1.0);

    BruteHit bh;
    CHECK(bruteForceHit(v, {x + n * 2e-6, towardLeft}, &bh));
    CHECK(!bruteForceHit(v, {x + n * 2e-6, up}, &bh));
}

TEST_CASE("shellIntersect closed forms") {
    CHECK(length(shellIntersect({0, 0, 0}, {0, 1, 0}, 2.0) - Vec3{0, 1, 0}) < 1e-12);
    CHECK(length(shellIntersect({1, 0, 0}, {1, 0, 0}, 3.0) - Vec3{1, 0, 0}) < 1e-12);
    CHECK_THROWS_AS(shellIntersect({3, 0, 0}, {1, 0, 0}, 2.0), ContractError);
}

TEST_CASE("shellIntersect equals quadratic-root ray-sphere intersection") {
    RandomStream rs(15, 0, 0, 0, StreamPurpose::Test);
    for (int i = 0; i < 1000; ++i) {
        const double r = 1.5 + 4 * rs.next();
        Vec3 x = randomUnit(rs) * (rs.next() * 0.9 * r);
        Vec3 wi = randomUnit(rs);
        const Vec3 s = shellIntersect(x, wi, r);
        CHECK(std::abs(length(s) - 1.0) < 1e-12);

        // Independent oracle: quadratic formula, forward root.
        const double b = 2 * dot(x, wi);
        const double c = lengthSquared(x) - r * r;
        const double t = (-b + std::sqrt(b * b - 4 * c)) / 2;
        const Vec3 p = x + wi * t;
        CHECK(length(s * r - p) < 1e-9);

        const Vec3 d = s * r - x;
        CHECK(dot(d, wi) >= 0);
        CHECK(length(cross(d, wi)) < 1e-9 * std::max(1.0, length(d)));
    }
}

TEST_CASE("obj round trip") {
    TriangleMeshData blob = makeBlob(1, 0.1, 7);
    const std::string path = "/tmp/eclipse_test_mesh.obj";
    writeObj(path, blob);
    TriangleMeshData back = readObj(path);
    REQUIRE(back.indices.size() == blob.indices.size());
    REQUIRE(back.positions.size() == blob.positions.size());
    for (size_t i = 0; i < blob.positions.size(); ++i) {
        CHECK(length(back.positions[i] - blob.positions[i]) < 1e-9);
        CHECK(length(back.normals[i] - blob.normals[i]) < 1e-9);
    }
    CHECK_THROWS_AS(readObj("/tmp/definitely_missing_mesh.obj"), RuntimeError);
}
