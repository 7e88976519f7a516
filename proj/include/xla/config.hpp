#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace xla {

/**
 * Tuned parameters persisted as `<operation>.<key> = <value>` lines, e.g.
 *
 *     mul.threshold = 96
 *     spmv.hyb_min_pm1_fraction = 0.25
 *
 * Blank lines and lines starting with '#' are ignored.
 */
class TunedConfig {
public:
    static TunedConfig parse(std::istream& in);
    static TunedConfig load(const std::filesystem::path& path);
    // From $XLA_CONFIG, else ./xla.conf; empty when neither exists.
    static TunedConfig load_default();

    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;

    std::optional<std::string> get(const std::string& key) const;
    std::optional<std::size_t> get_size(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool empty() const noexcept { return values_.empty(); }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Process-wide tuned configuration, loaded on first use.
std::shared_ptr<const TunedConfig> global_config();
void set_global_config(TunedConfig config);

} // namespace xla
