#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "equilivest/errors.hpp"

namespace equilivest::config {

// Flat key = value text with [section] headers. Keys address values as
// "section.key" ("key" alone before any section header). '#' and ';' lines
// are comments. Typed getters throw errc::config naming the key when a
// value does not parse.
class Table {
public:
    static Table parse_file(const std::filesystem::path& path);
    static Table parse_string(std::string_view text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> raw(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace equilivest::config
