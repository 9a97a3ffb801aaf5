#include "eclipse/config.h"

#include <fstream>
#include <sstream>

#include "eclipse/error.h"

namespace eclipse {

namespace {
std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace

Config Config::parseFile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw RuntimeError("config: cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parseString(ss.str());
}

Config Config::parseString(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw RuntimeError("config: malformed section at line " + std::to_string(lineNo));
            section = trim(s.substr(1, s.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw RuntimeError("config: expected key = value at line " + std::to_string(lineNo));
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw RuntimeError("config: empty key at line " + std::to_string(lineNo));
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string Config::getString(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    auto kv = it->second.find(key);
    return kv == it->second.end() ? fallback : kv->second;
}

double Config::getDouble(const std::string& section, const std::string& key,
                         double fallback) const {
    if (!has(section, key)) return fallback;
    return std::stod(getString(section, key, ""));
}

int Config::getInt(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    return std::stoi(getString(section, key, ""));
}

bool Config::getBool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = getString(section, key, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw RuntimeError("config: bad boolean for " + section + "." + key + ": " + v);
}

std::vector<double> Config::getDoubles(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(getString(section, key, ""));
    double v;
    while (in >> v) out.push_back(v);
    return out;
}

std::string Config::requireString(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw RuntimeError("config: missing required key " + section + "." + key);
    return getString(section, key, "");
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

}  // namespace eclipse
