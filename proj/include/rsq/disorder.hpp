#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rsq {

/// Gapless power-law coupling distribution P(J) ∝ J^{-alpha} on (0, support_max],
/// together with the master seed every per-configuration stream derives from.
struct DisorderSpec {
    double exponent_alpha = 0.8;
    double support_max = 1.0;
    std::uint64_t master_seed = 0;
};

/// Throws std::invalid_argument unless 0 <= alpha < 1 and support_max > 0.
void validate(const DisorderSpec& spec);

/// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Generator seed for one configuration, decoupled from every other index so
/// ensembles can be generated in any order and on any number of workers.
std::uint64_t config_seed(std::uint64_t master_seed, std::uint64_t config_index);

/// Inverse CDF J = support_max * u^{1/(1-alpha)} for u in (0, 1].
double coupling_from_uniform(const DisorderSpec& spec, double u);

/// Draws n_sites couplings i.i.d. from P(J). Pure function of
/// (spec.master_seed, config_index): bit-identical output regardless of
/// execution order or thread count.
std::vector<double> sample_couplings(const DisorderSpec& spec, std::size_t n_sites,
                                     std::uint64_t config_index);

} // namespace rsq
