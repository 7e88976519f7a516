#include "xla/method_table.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace xla {

MethodTable::MethodTable(std::vector<std::pair<std::size_t, std::string>> points) : points_(std::move(points)) {
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].first <= points_[i - 1].first) {
            throw std::invalid_argument("MethodTable: grid sizes must be strictly increasing");
        }
    }
}

MethodTable MethodTable::parse(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> points;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        std::size_t n = 0;
        if (colon == std::string::npos ||
            std::from_chars(item.data(), item.data() + colon, n).ptr != item.data() + colon || colon + 1 == item.size()) {
            throw std::invalid_argument("MethodTable: malformed entry '" + item + "'");
        }
        points.emplace_back(n, item.substr(colon + 1));
    }
    return MethodTable(std::move(points));
}

std::string MethodTable::serialize() const {
    std::string out;
    for (const auto& [n, m] : points_) {
        if (!out.empty()) out += ',';
        out += std::to_string(n) + ':' + m;
    }
    return out;
}

const std::string& MethodTable::lookup(std::size_t n) const {
    if (points_.empty()) throw std::logic_error("MethodTable::lookup on an empty table");
    auto hi = std::lower_bound(points_.begin(), points_.end(), n,
                               [](const auto& p, std::size_t v) { return p.first < v; });
    if (hi == points_.end()) return points_.back().second;
    if (hi == points_.begin() || hi->first == n) return hi->second;
    auto lo = std::prev(hi);
    return (n - lo->first) <= (hi->first - n) ? lo->second : hi->second;
}

std::vector<std::size_t> MethodTable::boundaries() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].second != points_[i - 1].second) out.push_back(points_[i].first);
    }
    return out;
}

} // namespace xla
