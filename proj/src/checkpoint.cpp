#include "eclipse/checkpoint.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "eclipse/error.h"

namespace fs = std::filesystem;

namespace eclipse {

namespace {

const char* groupFile(ad::ParamGroup g) {
    switch (g) {
        case ad::ParamGroup::Environment: return "environment.f64";
        case ad::ParamGroup::Material: return "material.f64";
        case ad::ParamGroup::Occluder: return "occluder.f64";
    }
    return "unknown.f64";
}

}  // namespace

void writeCheckpoint(const std::string& dir, const ad::ParameterStore& store) {
    fs::create_directories(dir);
    std::ofstream manifest(fs::path(dir) / "checkpoint.txt");
    if (!manifest) throw RuntimeError("checkpoint: cannot write manifest in " + dir);
    manifest << "eclipse-checkpoint 1\n";

    std::map<ad::ParamGroup, std::ofstream> files;
    std::map<ad::ParamGroup, size_t> offsets;
    for (size_t h = 0; h < store.arrays().size(); ++h) {
        const auto& info = store.arrayInfo(h);
        if (!files.count(info.group)) {
            files[info.group].open(fs::path(dir) / groupFile(info.group), std::ios::binary);
            offsets[info.group] = 0;
        }
        manifest << "array " << info.name << " " << groupFile(info.group) << " "
                 << offsets[info.group] << " ";
        manifest << info.shape.size();
        for (int64_t d : info.shape) manifest << " " << d;
        manifest << "\n";
        auto data = store.array(h);
        files[info.group].write(reinterpret_cast<const char*>(data.data()),
                                static_cast<std::streamsize>(data.size() * sizeof(double)));
        offsets[info.group] += data.size();
    }
    for (auto& [g, f] : files)
        if (!f) throw RuntimeError("checkpoint: short write in " + dir);
}

void loadCheckpoint(const std::string& dir, ad::ParameterStore* store) {
    std::ifstream manifest(fs::path(dir) / "checkpoint.txt");
    if (!manifest) throw RuntimeError("checkpoint: cannot open manifest in " + dir);
    std::string line;
    std::getline(manifest, line);
    if (line.rfind("eclipse-checkpoint", 0) != 0)
        throw RuntimeError("checkpoint: malformed manifest header");

    while (std::getline(manifest, line)) {
        std::istringstream in(line);
        std::string tag, name, file;
        size_t offset, rank;
        if (!(in >> tag)) continue;
        if (tag != "array") continue;
        in >> name >> file >> offset >> rank;
        std::vector<int64_t> shape(rank);
        for (auto& d : shape) in >> d;

        const auto* info = store->findArray(name);
        if (!info) throw RuntimeError("checkpoint: array not registered: " + name);
        if (info->shape != shape)
            throw RuntimeError("checkpoint: shape mismatch for " + name);

        std::ifstream f(fs::path(dir) / file, std::ios::binary);
        if (!f) throw RuntimeError("checkpoint: cannot open " + file);
        f.seekg(static_cast<std::streamoff>(offset * sizeof(double)));
        const size_t handle = static_cast<size_t>(info - store->arrays().data());
        auto dst = store->array(handle);
        f.read(reinterpret_cast<char*>(dst.data()),
               static_cast<std::streamsize>(dst.size() * sizeof(double)));
        if (f.gcount() != static_cast<std::streamsize>(dst.size() * sizeof(double)))
            throw RuntimeError("checkpoint: short read for " + name);
    }
}

}  // namespace eclipse
