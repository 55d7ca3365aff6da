#include "prnu/rng.hpp"

#include <algorithm>
#include <numeric>

#include "prnu/error.hpp"

namespace prnu {

std::vector<int> sample_without_replacement(int pool_size, int count, Rng& rng) {
    if (count < 0 || count > pool_size) {
        throw ConfigError("sample_without_replacement: count out of range");
    }
    std::vector<int> indices(static_cast<std::size_t>(pool_size));
    std::iota(indices.begin(), indices.end(), 0);
    for (int i = 0; i < count; ++i) {
        auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(pool_size - i)));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(static_cast<std::size_t>(count));
    std::sort(indices.begin(), indices.end());
    return indices;
}

} // namespace prnu
