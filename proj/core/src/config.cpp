#include "equilivest/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace equilivest::config {

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

}  // namespace

Table Table::parse_string(std::string_view text, const std::string& origin) {
    Table table;
    std::string section;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t stop = text.find('\n', start);
        if (stop == std::string_view::npos) stop = text.size();
        ++line_no;
        std::string_view line = trim(text.substr(start, stop - start));
        start = stop + 1;

        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw Error(errc::config,
                            origin + ":" + std::to_string(line_no) + ": malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(errc::config,
                        origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw Error(errc::config, origin + ":" + std::to_string(line_no) + ": empty key");
        }
        table.values_[section.empty() ? key : section + "." + key] = value;
    }
    return table;
}

Table Table::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open config: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path.string());
}

std::optional<std::string> Table::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
    auto v = raw(key);
    return v ? *v : fallback;
}

double Table::get_double(const std::string& key, double fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    double value{};
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw Error(errc::config, "config key '" + key + "': bad number '" + *v + "'");
    }
    return value;
}

int Table::get_int(const std::string& key, int fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    int value{};
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw Error(errc::config, "config key '" + key + "': bad integer '" + *v + "'");
    }
    return value;
}

bool Table::get_bool(const std::string& key, bool fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    std::string lower = *v;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "true" || lower == "1" || lower == "on" || lower == "yes") return true;
    if (lower == "false" || lower == "0" || lower == "off" || lower == "no") return false;
    throw Error(errc::config, "config key '" + key + "': bad boolean '" + *v + "'");
}

}  // namespace equilivest::config
