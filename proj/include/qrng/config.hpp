#pragma once

// Optional key=value configuration file for the command-line tool.
// Precedence: command-line flag > configuration file > built-in default.
// The file path comes from --config or, failing that, $QRNG_CONFIG.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "qrng/errors.hpp"

namespace qrng::config {

inline constexpr const char* kConfigEnvVar = "QRNG_CONFIG";

class KeyValueConfig {
  public:
    /// Parses `key = value` lines. Blank lines and lines starting with '#'
    /// are skipped; keys may be written with or without leading dashes.
    static KeyValueConfig parse(std::string_view text) {
        KeyValueConfig cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
            }
            std::string key = trim(t.substr(0, eq));
            while (!key.empty() && key[0] == '-') key.erase(0, 1);
            if (key.empty()) {
                throw FormatError("config line " + std::to_string(lineno) + ": empty key");
            }
            cfg.values_[key] = trim(t.substr(eq + 1));
        }
        return cfg;
    }

    static KeyValueConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot open config file '" + path.string() + "'");
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str());
    }

    /// Loads `explicit_path` if non-empty, else the file named by $QRNG_CONFIG, else nothing.
    static KeyValueConfig resolve(const std::string& explicit_path) {
        if (!explicit_path.empty()) return load(explicit_path);
        if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') return load(env);
        return {};
    }

    std::optional<std::string> get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    bool empty() const noexcept { return values_.empty(); }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

  private:
    static std::string trim(std::string_view s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) return {};
        const auto last = s.find_last_not_of(" \t\r");
        return std::string(s.substr(first, last - first + 1));
    }

    std::map<std::string, std::string> values_;
};

}  // namespace qrng::config
