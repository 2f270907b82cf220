#include <lexgraph/config.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lexgraph {

namespace {

std::string strip(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        return v.substr(1, v.size() - 2);
    }
    return v;
}

} // namespace

ConfigFile ConfigFile::parse(std::istream& in, std::filesystem::path source) {
    ConfigFile cfg;
    cfg.source_ = std::move(source);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            }
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        std::string key = strip(line.substr(0, eq));
        std::string value = unquote(strip(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    return parse(in, path);
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string ConfigFile::getOr(const std::string& key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

double ConfigFile::getDouble(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v || v->empty()) {
        return fallback;
    }
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + *v);
    }
}

int ConfigFile::getInt(const std::string& key, int fallback) const {
    auto v = get(key);
    if (!v || v->empty()) {
        return fallback;
    }
    try {
        return std::stoi(*v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an integer: " + *v);
    }
}

bool ConfigFile::getBool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v || v->empty()) {
        return fallback;
    }
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: " + *v);
}

std::vector<std::string> ConfigFile::getStringList(const std::string& key) const {
    std::vector<std::string> out;
    auto v = get(key);
    if (!v || v->empty()) {
        return out;
    }
    std::stringstream in(*v);
    std::string part;
    while (std::getline(in, part, ',')) {
        part = strip(part);
        if (!part.empty()) {
            out.push_back(unquote(part));
        }
    }
    return out;
}

std::vector<double> ConfigFile::getDoubleList(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : getStringList(key)) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' has a non-numeric element: " + part);
        }
    }
    return out;
}

std::optional<std::filesystem::path> ConfigFile::getPath(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) {
        return std::nullopt;
    }
    std::filesystem::path p = *v;
    if (p.is_relative() && !source_.empty()) {
        p = source_.parent_path() / p;
    }
    return p;
}

} // namespace lexgraph
