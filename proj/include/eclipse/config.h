#pragma once

#include <map>
#include <string>
#include <vector>

namespace eclipse {

// Line-oriented configuration document.
//
// Grammar (one entry per line):
//   [section]            starts a section; keys that follow belong to it
//   key = value          value runs to end of line; surrounding blanks trimmed
//   # comment            full-line comments; blank lines ignored
//
// Keys are unique per section (later lines overwrite). Values are parsed on
// demand; numeric lists are whitespace separated.
class Config {
 public:
    static Config parseFile(const std::string& path);
    static Config parseString(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;

    std::string getString(const std::string& section, const std::string& key,
                          const std::string& fallback) const;
    double getDouble(const std::string& section, const std::string& key, double fallback) const;
    int getInt(const std::string& section, const std::string& key, int fallback) const;
    bool getBool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> getDoubles(const std::string& section, const std::string& key) const;

    // Required variants: throw RuntimeError when missing.
    std::string requireString(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

 private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace eclipse
