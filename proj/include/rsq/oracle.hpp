#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rsq {

/// Explicit product of spin-S singlets on n_sites sites. The block is the
/// window {anchor, ..., anchor + cut - 1} mod n_sites.
struct SingletLayout {
    int n_sites = 0;
    std::vector<std::pair<int, int>> pairing; ///< perfect matching over 0..n_sites-1
    int cut = 0;                              ///< block length
    int anchor = 0;
};

/// Rejects invalid matchings and state dimensions above 2^16.
void validate(const SingletLayout& layout, int two_s);

/// Number of pairs with exactly one endpoint inside the block window.
int crossing_pairs(const SingletLayout& layout);

/// Entropy of a density-matrix spectrum: (sum lambda^q - 1)/(1 - q) over the
/// support, with the von Neumann limit at q -> 1.
double tsallis_entropy_of_spectrum(std::span<const double> spectrum, double q);

/// Spectrum of the reduced density matrix of [0, cut), computed from the full
/// state vector of the singlet product by direct partial trace.
std::vector<double> reduced_spectrum(const SingletLayout& layout, int two_s);

/// Block entropy of the singlet product from the explicit state vector. Must
/// agree with tsallis_singlet_entropy(crossing_pairs(layout), q, two_s).
double exact_block_entropy(const SingletLayout& layout, double q, int two_s);

/// Ground state of the periodic spin-1/2 Heisenberg chain by dense
/// diagonalization (couplings.size() <= 12), then the Tsallis entropy of the
/// block [anchor, anchor+block_len). Throws std::runtime_error when the
/// ground state is degenerate.
double exact_ground_block_entropy(std::span<const double> couplings, std::uint32_t anchor,
                                  std::uint32_t block_len, double q);

} // namespace rsq
