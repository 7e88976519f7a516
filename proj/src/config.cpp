#include "xla/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <mutex>

#include "xla/errors.hpp"

namespace xla {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::mutex g_config_mutex;
std::shared_ptr<const TunedConfig> g_config;

} // namespace

TunedConfig TunedConfig::parse(std::istream& in) {
    TunedConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected '<operation>.<key> = <value>'");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.') {
            throw ParseError(lineno, "key '" + key + "' is not of the form <operation>.<key>");
        }
        cfg.values_[std::move(key)] = std::move(value);
    }
    return cfg;
}

TunedConfig TunedConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    return parse(in);
}

TunedConfig TunedConfig::load_default() {
    std::filesystem::path path = "xla.conf";
    if (const char* env = std::getenv("XLA_CONFIG"); env && *env) path = env;
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return {};
    return load(path);
}

void TunedConfig::write(std::ostream& out) const {
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

void TunedConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config " + path.string());
    write(out);
}

std::optional<std::string> TunedConfig::get(const std::string& key) const {
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::size_t> TunedConfig::get_size(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::size_t out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || p != v->data() + v->size()) return std::nullopt;
    return out;
}

std::optional<double> TunedConfig::get_double(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    double out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || p != v->data() + v->size()) return std::nullopt;
    return out;
}

std::shared_ptr<const TunedConfig> global_config() {
    std::lock_guard lock(g_config_mutex);
    if (!g_config) g_config = std::make_shared<const TunedConfig>(TunedConfig::load_default());
    return g_config;
}

void set_global_config(TunedConfig config) {
    std::lock_guard lock(g_config_mutex);
    g_config = std::make_shared<const TunedConfig>(std::move(config));
}

} // namespace xla
