#include "eclipse/dataset.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eclipse/error.h"
#include "eclipse/rng.h"

namespace fs = std::filesystem;

namespace eclipse {

ObjectGeometry GeometryDesc::build(const std::string& baseDir) const {
    if (kind == Kind::Sphere) return ObjectGeometry::sphere(Vec3{0, 0, 0}, sphereRadius);
    return ObjectGeometry::mesh(readObj((fs::path(baseDir) / meshPath).string()));
}

Image Dataset::loadImage(int t) const {
    return readPfm((fs::path(baseDir) / imagePaths[t]).string());
}

RenderSettings renderSettingsFromConfig(const Config& cfg) {
    RenderSettings s;
    s.sm = cfg.getInt("render", "sm", 512);
    s.sl = cfg.getInt("render", "sl", 512);
    s.aaPasses = cfg.getInt("render", "aa", 16);
    const std::string h = cfg.getString("render", "heuristic", "balance");
    if (h == "balance") s.heuristic = RenderSettings::MisHeuristic::Balance;
    else if (h == "power") s.heuristic = RenderSettings::MisHeuristic::Power2;
    else throw RuntimeError("render.heuristic must be balance or power");
    return s;
}

namespace {

Rgbd rgbFrom(const std::vector<double>& v, Rgbd fallback) {
    if (v.size() >= 3) return {v[0], v[1], v[2]};
    if (v.size() == 1) return {v[0], v[0], v[0]};
    return fallback;
}

// Ambient plus a few seeded von Mises-Fisher style lobes, sampled at the
// texel centers of the ground-truth grid.
Image proceduralEnv(int rows, int cols, int lobes, double sharpness, double ambient,
                    double brightness, uint64_t seed) {
    struct Lobe {
        Vec3 dir;
        double kappa;
        Rgbd color;
    };
    RandomStream rs(seed, 0, 0, 0, StreamPurpose::Init);
    std::vector<Lobe> ls;
    for (int k = 0; k < lobes; ++k) {
        const double z = 2 * rs.next() - 1;
        const double ph = kTwoPi * rs.next();
        const double s = std::sqrt(std::max(0.0, 1 - z * z));
        Lobe l;
        l.dir = {s * std::cos(ph), s * std::sin(ph), z};
        l.kappa = sharpness * (0.5 + rs.next());
        l.color = Rgbd(0.2 + 0.8 * rs.next(), 0.2 + 0.8 * rs.next(), 0.2 + 0.8 * rs.next()) *
                  brightness;
        ls.push_back(l);
    }
    Image img(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const Vec3 d = sphericalDir(kPi * (i + 0.5) / rows, kTwoPi * (j + 0.5) / cols);
            Rgbd L{ambient, ambient, ambient};
            for (const Lobe& l : ls) L += l.color * std::exp(l.kappa * (dot(d, l.dir) - 1.0));
            img.at(i, j) = L;
        }
    return img;
}

std::string materialLine(const FixedMaterial& m) {
    std::ostringstream os;
    os.precision(17);
    os << (m.kind == FixedMaterial::Kind::Lambertian ? "lambertian" : "ggx") << " " << m.rho.r
       << " " << m.rho.g << " " << m.rho.b << " " << m.alpha << " " << m.kappa << " "
       << (m.checker ? 1 : 0) << " " << m.rho2.r << " " << m.rho2.g << " " << m.rho2.b << " "
       << m.checkerScale;
    return os.str();
}

FixedMaterial parseMaterialLine(std::istringstream& in) {
    FixedMaterial m;
    std::string kind;
    int checker = 0;
    in >> kind >> m.rho.r >> m.rho.g >> m.rho.b >> m.alpha >> m.kappa >> checker >> m.rho2.r >>
        m.rho2.g >> m.rho2.b >> m.checkerScale;
    if (kind == "lambertian") m.kind = FixedMaterial::Kind::Lambertian;
    else if (kind == "ggx") m.kind = FixedMaterial::Kind::Ggx;
    else throw RuntimeError("manifest: unknown material kind: " + kind);
    m.checker = checker != 0;
    return m;
}

}  // namespace

SceneBuildResult buildGroundTruthScene(const Config& cfg, const std::string& outDir) {
    SceneBuildResult out;
    Scene& scene = out.scene;
    scene.params = std::make_shared<ad::ParameterStore>();
    const uint64_t seed = static_cast<uint64_t>(cfg.getInt("scene", "seed", 1));

    // Geometry.
    const std::string gtype = cfg.getString("geometry", "type", "sphere");
    if (gtype == "sphere") {
        out.geometryDesc.kind = GeometryDesc::Kind::Sphere;
        out.geometryDesc.sphereRadius = cfg.getDouble("geometry", "radius", 1.0);
        scene.geometry = ObjectGeometry::sphere(Vec3{0, 0, 0}, out.geometryDesc.sphereRadius);
    } else if (gtype == "blob") {
        TriangleMeshData mesh = makeBlob(cfg.getInt("geometry", "subdivisions", 3),
                                         cfg.getDouble("geometry", "bump", 0.12), seed);
        const std::string meshFile = "geometry.obj";
        writeObj((fs::path(outDir) / meshFile).string(), mesh);
        out.geometryDesc.kind = GeometryDesc::Kind::Mesh;
        out.geometryDesc.meshPath = meshFile;
        scene.geometry = ObjectGeometry::mesh(std::move(mesh));
    } else if (gtype == "mesh") {
        const std::string src = cfg.requireString("geometry", "path");
        TriangleMeshData mesh = readObj(src);
        const std::string meshFile = "geometry.obj";
        writeObj((fs::path(outDir) / meshFile).string(), mesh);
        out.geometryDesc.kind = GeometryDesc::Kind::Mesh;
        out.geometryDesc.meshPath = meshFile;
        scene.geometry = ObjectGeometry::mesh(std::move(mesh));
    } else {
        throw RuntimeError("geometry.type must be sphere, blob, or mesh");
    }

    // Material.
    FixedMaterial mat;
    const std::string mmodel = cfg.getString("material", "model", "lambertian");
    if (mmodel == "lambertian") mat.kind = FixedMaterial::Kind::Lambertian;
    else if (mmodel == "ggx") mat.kind = FixedMaterial::Kind::Ggx;
    else throw RuntimeError("material.model must be lambertian or ggx");
    mat.rho = rgbFrom(cfg.getDoubles("material", "albedo"), {0.5, 0.5, 0.5});
    mat.alpha = cfg.getDouble("material", "roughness", 0.6);
    mat.kappa = cfg.getDouble("material", "fresnel", 0.04);
    mat.checker = cfg.getBool("material", "checker", false);
    mat.rho2 = rgbFrom(cfg.getDoubles("material", "albedo2"), {0.2, 0.2, 0.2});
    mat.checkerScale = cfg.getDouble("material", "checker_scale", 2.0);
    scene.material.type = MaterialModel::Type::Fixed;
    scene.material.fixed = mat;

    // Cameras.
    const int frames = cfg.getInt("cameras", "count", 16);
    const double radius = cfg.getDouble("cameras", "radius", 3.0);
    const double elevation = cfg.getDouble("cameras", "elevation", 20.0);
    const double fov = cfg.getDouble("cameras", "fov", 45.0);
    const int width = cfg.getInt("cameras", "width", 64);
    const int height = cfg.getInt("cameras", "height", 64);
    scene.cameras = makeOrbitCameras(frames, radius, elevation, fov, height, width);
    for (const Camera& cam : scene.cameras)
        scene.shellRadii.push_back(Scene::shellRadiusFor(cam));

    // Environment (single-level pyramid holding the exact ground truth).
    const int rows = cfg.getInt("environment", "rows", 10);
    const int cols = cfg.getInt("environment", "cols", 20);
    const std::string esrc = cfg.getString("environment", "source", "procedural");
    if (esrc == "procedural") {
        out.gtEnv = proceduralEnv(rows, cols, cfg.getInt("environment", "lobes", 5),
                                  cfg.getDouble("environment", "sharpness", 24.0),
                                  cfg.getDouble("environment", "ambient", 0.3),
                                  cfg.getDouble("environment", "brightness", 3.0), seed);
    } else if (esrc == "pfm") {
        out.gtEnv = readPfm(cfg.requireString("environment", "path"));
        ECLIPSE_REQUIRE(out.gtEnv.height == rows && out.gtEnv.width == cols,
                        "environment.rows/cols must match the image");
    } else {
        throw RuntimeError("environment.source must be procedural or pfm");
    }
    scene.env = EnvironmentPyramid::create(scene.params.get(), rows, cols, /*levels=*/1);
    scene.env->setFromRadiance(scene.params.get(), out.gtEnv);

    // Occluders.
    const std::string otype = cfg.getString("occluders", "type", "cap");
    if (otype == "cap") {
        const double angle = cfg.getDouble("occluders", "angle", 0.7);
        const std::string center = cfg.getString("occluders", "center", "camera");
        for (int t = 0; t < frames; ++t) {
            Vec3 c;
            if (center == "camera") {
                c = normalize(scene.cameras[t].position);
            } else {
                std::istringstream in(center);
                in >> c.x >> c.y >> c.z;
                c = normalize(c);
            }
            scene.trueCaps.push_back({c, angle});
        }
    } else if (otype != "none") {
        throw RuntimeError("occluders.type must be cap or none");
    }

    scene.validate();
    return out;
}

Dataset generateDataset(const Config& cfg, const std::string& outDir) {
    fs::create_directories(outDir);
    SceneBuildResult built = buildGroundTruthScene(cfg, outDir);
    const Scene& scene = built.scene;
    const RenderSettings settings = renderSettingsFromConfig(cfg);
    const uint64_t seed = static_cast<uint64_t>(cfg.getInt("scene", "seed", 1));

    Dataset data;
    data.baseDir = outDir;
    data.frames = scene.frames();
    data.imageH = scene.cameras[0].imageH;
    data.imageW = scene.cameras[0].imageW;
    data.seed = seed;
    data.geometry = built.geometryDesc;
    data.gtMaterial = scene.material.fixed;
    data.cameras = scene.cameras;
    data.shellRadii = scene.shellRadii;
    data.gtCaps = scene.trueCaps;
    data.gtEnv = built.gtEnv;
    data.envRows = built.gtEnv.height;
    data.envCols = built.gtEnv.width;

    writePfm((fs::path(outDir) / "gt_env.pfm").string(), built.gtEnv);
    for (int t = 0; t < data.frames; ++t) {
        Image img = renderImage(scene, t, settings, seed);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03d.pfm", t);
        writePfm((fs::path(outDir) / name).string(), img);
        data.imagePaths.push_back(name);
    }
    writeManifest(data, (fs::path(outDir) / "manifest.txt").string());
    return data;
}

void writeManifest(const Dataset& data, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw RuntimeError("manifest: cannot open for writing: " + path);
    f.precision(17);
    f << "eclipse-dataset 1\n";
    f << "frames " << data.frames << "\n";
    f << "size " << data.imageH << " " << data.imageW << "\n";
    f << "seed " << data.seed << "\n";
    if (data.geometry.kind == GeometryDesc::Kind::Sphere)
        f << "geometry sphere " << data.geometry.sphereRadius << "\n";
    else
        f << "geometry mesh " << data.geometry.meshPath << "\n";
    f << "material " << materialLine(data.gtMaterial) << "\n";
    f << "env gt_env.pfm " << data.envRows << " " << data.envCols << "\n";
    for (int t = 0; t < data.frames; ++t) {
        const Camera& c = data.cameras[t];
        f << "frame " << t << " " << data.imagePaths[t] << " " << c.position.x << " "
          << c.position.y << " " << c.position.z << " " << c.right.x << " " << c.right.y << " "
          << c.right.z << " " << c.up.x << " " << c.up.y << " " << c.up.z << " " << c.forward.x
          << " " << c.forward.y << " " << c.forward.z << " " << c.tanHalfFov << " "
          << data.shellRadii[t];
        if (!data.gtCaps.empty())
            f << " cap " << data.gtCaps[t].center.x << " " << data.gtCaps[t].center.y << " "
              << data.gtCaps[t].center.z << " " << data.gtCaps[t].angle;
        else
            f << " none";
        f << "\n";
    }
    if (!f) throw RuntimeError("manifest: short write: " + path);
}

Dataset readManifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw RuntimeError("manifest: cannot open: " + path);
    Dataset data;
    data.baseDir = fs::path(path).parent_path().string();
    if (data.baseDir.empty()) data.baseDir = ".";

    std::string line;
    std::string envFile;
    while (std::getline(f, line)) {
        std::istringstream in(line);
        std::string tag;
        if (!(in >> tag)) continue;
        if (tag == "eclipse-dataset") {
            int version;
            in >> version;
            if (version != 1) throw RuntimeError("manifest: unsupported version");
        } else if (tag == "frames") {
            in >> data.frames;
        } else if (tag == "size") {
            in >> data.imageH >> data.imageW;
        } else if (tag == "seed") {
            in >> data.seed;
        } else if (tag == "geometry") {
            std::string kind;
            in >> kind;
            if (kind == "sphere") {
                data.geometry.kind = GeometryDesc::Kind::Sphere;
                in >> data.geometry.sphereRadius;
            } else if (kind == "mesh") {
                data.geometry.kind = GeometryDesc::Kind::Mesh;
                in >> data.geometry.meshPath;
            } else {
                throw RuntimeError("manifest: unknown geometry kind: " + kind);
            }
        } else if (tag == "material") {
            data.gtMaterial = parseMaterialLine(in);
        } else if (tag == "env") {
            in >> envFile >> data.envRows >> data.envCols;
        } else if (tag == "frame") {
            int idx;
            std::string img;
            Camera c;
            double rt;
            in >> idx >> img >> c.position.x >> c.position.y >> c.position.z >> c.right.x >>
                c.right.y >> c.right.z >> c.up.x >> c.up.y >> c.up.z >> c.forward.x >>
                c.forward.y >> c.forward.z >> c.tanHalfFov >> rt;
            c.imageH = data.imageH;
            c.imageW = data.imageW;
            std::string occ;
            in >> occ;
            if (occ == "cap") {
                CapOccluder cap;
                in >> cap.center.x >> cap.center.y >> cap.center.z >> cap.angle;
                data.gtCaps.push_back(cap);
            } else if (occ != "none") {
                throw RuntimeError("manifest: unknown occluder tag: " + occ);
            }
            data.cameras.push_back(c);
            data.shellRadii.push_back(rt);
            data.imagePaths.push_back(img);
        }
    }
    if (data.frames != static_cast<int>(data.cameras.size()))
        throw RuntimeError("manifest: frame count mismatch");
    if (!data.gtCaps.empty() && static_cast<int>(data.gtCaps.size()) != data.frames)
        throw RuntimeError("manifest: cap count mismatch");
    if (!envFile.empty())
        data.gtEnv = readPfm((fs::path(data.baseDir) / envFile).string());
    return data;
}

}  // namespace eclipse
