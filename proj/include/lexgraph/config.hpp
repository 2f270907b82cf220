#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexgraph {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat "[section] / key = value" configuration file. Keys are addressed
/// as "section.key"; '#' starts a comment; values may be quoted strings,
/// numbers, booleans, or comma-separated lists. Relative paths resolve
/// against the file's directory.
class ConfigFile {
public:
    static ConfigFile parse(std::istream& in, std::filesystem::path source = {});
    static ConfigFile load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string getOr(const std::string& key, std::string fallback) const;
    double getDouble(const std::string& key, double fallback) const;
    int getInt(const std::string& key, int fallback) const;
    bool getBool(const std::string& key, bool fallback) const;
    std::vector<double> getDoubleList(const std::string& key) const;
    std::vector<std::string> getStringList(const std::string& key) const;

    /// Resolves a value as a path relative to the config file location.
    std::optional<std::filesystem::path> getPath(const std::string& key) const;

    const std::filesystem::path& source() const { return source_; }

private:
    std::unordered_map<std::string, std::string> values_;
    std::filesystem::path source_;
};

} // namespace lexgraph
