#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace xla {

/**
 * Winning method per measured problem size. Sizes between grid points take
 * the winner of the nearer point (the lower one on a tie); sizes outside the
 * grid take the winner at the nearest end, so lookup is total.
 *
 * Serialized as `8:base,16:base,32:winograd`.
 */
class MethodTable {
public:
    MethodTable() = default;
    explicit MethodTable(std::vector<std::pair<std::size_t, std::string>> points);

    static MethodTable parse(const std::string& text);
    std::string serialize() const;

    bool empty() const noexcept { return points_.empty(); }
    const std::vector<std::pair<std::size_t, std::string>>& points() const noexcept { return points_; }

    const std::string& lookup(std::size_t n) const;
    // Grid points where the winner differs from the previous point.
    std::vector<std::size_t> boundaries() const;

    friend bool operator==(const MethodTable&, const MethodTable&) = default;

private:
    std::vector<std::pair<std::size_t, std::string>> points_;
};

} // namespace xla
