#include "rsq/blocks.hpp"

#include <stdexcept>
#include <string>

namespace rsq {

void validate(const BlockLadder& ladder) {
    if (ladder.n_sites < 2)
        throw std::invalid_argument("blocks: n_sites must be >= 2");
    if (ladder.sizes.empty())
        throw std::invalid_argument("blocks: ladder has no sizes (n_sites too small for the auto ladder?)");
    std::uint32_t last = 0;
    for (std::uint32_t L : ladder.sizes) {
        if (L < 1 || L >= ladder.n_sites)
            throw std::invalid_argument("blocks: every L must lie in [1, n_sites)");
        if (L <= last && last != 0)
            throw std::invalid_argument("blocks: sizes must be strictly increasing");
        last = L;
    }
    if (ladder.anchor >= ladder.n_sites)
        throw std::invalid_argument("blocks: anchor must lie in [0, n_sites)");
    if (ladder.n_anchors < 1 || ladder.n_anchors > ladder.n_sites)
        throw std::invalid_argument("blocks: n_anchors must lie in [1, n_sites]");
}

std::vector<std::uint32_t> default_ladder_sizes(std::uint32_t n_sites) {
    std::vector<std::uint32_t> sizes;
    for (std::uint64_t L = 8; L <= n_sites / 8; L <<= 1)
        sizes.push_back(static_cast<std::uint32_t>(L));
    return sizes;
}

CrossingTable count_crossings(std::span<const DecimationEvent> events, const BlockLadder& ladder) {
    validate(ladder);
    const std::uint32_t n = ladder.n_sites;
    for (const DecimationEvent& ev : events) {
        if (ev.is_singlet() && (ev.a >= n || ev.b >= n))
            throw std::invalid_argument("count_crossings: singlet position outside [0, n_sites)");
    }

    const std::size_t n_sizes = ladder.sizes.size();
    std::vector<double> summed(n_sizes, 0.0);
    std::vector<std::uint64_t> per_anchor(n_sizes);
    for (std::uint32_t k = 0; k < ladder.n_anchors; ++k) {
        const std::uint32_t anchor =
            static_cast<std::uint32_t>((ladder.anchor + static_cast<std::uint64_t>(k) * n / ladder.n_anchors) % n);
        std::fill(per_anchor.begin(), per_anchor.end(), 0);
        for (const DecimationEvent& ev : events) {
            if (!ev.is_singlet()) continue;
            const std::uint32_t da = ev.a >= anchor ? ev.a - anchor : ev.a + n - anchor;
            const std::uint32_t db = ev.b >= anchor ? ev.b - anchor : ev.b + n - anchor;
            for (std::size_t li = 0; li < n_sizes; ++li) {
                const std::uint32_t L = ladder.sizes[li];
                per_anchor[li] += (da < L) != (db < L);
            }
        }
        for (std::size_t li = 0; li < n_sizes; ++li)
            summed[li] += static_cast<double>(per_anchor[li]);
    }

    CrossingTable table;
    table.sizes = ladder.sizes;
    table.counts.resize(n_sizes);
    for (std::size_t li = 0; li < n_sizes; ++li)
        table.counts[li] = summed[li] / ladder.n_anchors;
    return table;
}

} // namespace rsq
