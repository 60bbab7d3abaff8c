#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "metagrav/errors.hpp"

namespace metagrav {

/// Flat `key = value` configuration. Lines starting with '#' are comments.
/// Later assignments override earlier ones, which is how command-line
/// overrides are layered on top of a file.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text, std::string_view origin = "<string>") {
        KeyValueConfig cfg;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;

            if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) {
                if (end == text.size()) break;
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                                  ": expected key=value, got '" + std::string(line) + "'");
            }
            auto key = trim(line.substr(0, eq));
            auto value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
            }
            cfg.set(std::string(key), std::string(value));
            if (end == text.size()) break;
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str(), path);
    }

    void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

    [[nodiscard]] bool contains(const std::string& key) const { return values_.contains(key); }

    [[nodiscard]] std::optional<std::string> get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] std::optional<double> get_double(const std::string& key) const {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        return to_double(key, *s);
    }

    [[nodiscard]] double get_double(const std::string& key, double fallback) const {
        return get_double(key).value_or(fallback);
    }

    [[nodiscard]] double require_double(const std::string& key) const {
        auto v = get_double(key);
        if (!v) throw ConfigError("missing required key '" + key + "'");
        return *v;
    }

    [[nodiscard]] long long get_int(const std::string& key, long long fallback) const {
        auto s = get_string(key);
        if (!s) return fallback;
        long long out = 0;
        auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), out);
        if (ec != std::errc{} || ptr != s->data() + s->size()) {
            throw ConfigError("key '" + key + "': '" + *s + "' is not an integer");
        }
        return out;
    }

    [[nodiscard]] std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        auto s = get_string(key);
        if (!s) return out;
        std::string_view rest = *s;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            auto item = trim(rest.substr(0, comma));
            if (!item.empty()) out.push_back(to_double(key, std::string(item)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    /// Entries in key order; stable input for hashing and manifests.
    [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

    [[nodiscard]] std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
        return out;
    }

private:
    static std::string_view trim(std::string_view s) {
        const char* ws = " \t\r";
        auto b = s.find_first_not_of(ws);
        if (b == std::string_view::npos) return {};
        auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    }

    static double to_double(const std::string& key, const std::string& s) {
        // std::from_chars for double is available in libstdc++ 11.
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw ConfigError("key '" + key + "': '" + s + "' is not a number");
        }
        return out;
    }

    std::map<std::string, std::string> values_;
};

} // namespace metagrav
