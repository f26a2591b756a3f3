#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsq/sdrg.hpp"

namespace rsq {

/// Ladder of block lengths L over which singlet crossings are counted.
struct BlockLadder {
    std::vector<std::uint32_t> sizes; ///< strictly increasing, each in [1, N)
    std::uint32_t anchor = 0;         ///< left edge of the first window
    std::uint32_t n_sites = 0;
    std::uint32_t n_anchors = 1;      ///< equally spaced windows averaged per configuration
};

void validate(const BlockLadder& ladder);

/// Powers of two from 8 up to n_sites/8; empty when n_sites < 64.
std::vector<std::uint32_t> default_ladder_sizes(std::uint32_t n_sites);

/// Per-configuration crossing counts, one value per ladder size. Integer
/// valued for a single anchor, mean over anchors otherwise.
struct CrossingTable {
    std::vector<std::uint32_t> sizes;
    std::vector<double> counts;
};

/// Number of decimated singlets with exactly one endpoint inside the window
/// [anchor, anchor+L) mod N, for each L. Trio merges contribute nothing.
CrossingTable count_crossings(std::span<const DecimationEvent> events, const BlockLadder& ladder);

} // namespace rsq
