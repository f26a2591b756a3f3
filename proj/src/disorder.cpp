#include "rsq/disorder.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace rsq {

void validate(const DisorderSpec& spec) {
    if (!(spec.exponent_alpha >= 0.0 && spec.exponent_alpha < 1.0))
        throw std::invalid_argument("disorder: exponent_alpha must lie in [0, 1), got " +
                                    std::to_string(spec.exponent_alpha));
    if (!(spec.support_max > 0.0))
        throw std::invalid_argument("disorder: support_max must be positive");
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t config_seed(std::uint64_t master_seed, std::uint64_t config_index) {
    // SplitMix64 stream of master_seed, evaluated at position config_index + 1.
    return mix64(master_seed + (config_index + 1) * 0x9e3779b97f4a7c15ULL);
}

double coupling_from_uniform(const DisorderSpec& spec, double u) {
    validate(spec);
    if (!(u > 0.0 && u <= 1.0))
        throw std::invalid_argument("disorder: u must lie in (0, 1]");
    return spec.support_max * std::pow(u, 1.0 / (1.0 - spec.exponent_alpha));
}

std::vector<double> sample_couplings(const DisorderSpec& spec, std::size_t n_sites,
                                     std::uint64_t config_index) {
    validate(spec);
    if (n_sites < 4 || n_sites % 2 != 0)
        throw std::invalid_argument("disorder: n_sites must be even and >= 4, got " +
                                    std::to_string(n_sites));
    std::mt19937_64 gen(config_seed(spec.master_seed, config_index));
    const double inv_exponent = 1.0 / (1.0 - spec.exponent_alpha);
    std::vector<double> couplings(n_sites);
    for (double& j : couplings) {
        // uniform on the 2^53 grid of (0, 1]; never 0, so no bond vanishes
        const double u = static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
        j = spec.support_max * std::pow(u, inv_exponent);
    }
    return couplings;
}

} // namespace rsq
