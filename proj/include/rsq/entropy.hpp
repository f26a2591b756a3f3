#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rsq/blocks.hpp"

namespace rsq {

/// Largest exponent argument before D^{n(1-q)} overflows a double.
inline constexpr double kMaxExpArgument = 709.782712893384; // ln(DBL_MAX)

/// Closed-form Tsallis entropy of a block crossed by n spin-S singlets,
/// natural-log convention, D = two_s + 1:
///   S_q(n) = expm1(n (1-q) ln D) / (1-q),
/// with the von Neumann limit n ln D taken for |1-q| < 1e-9. Throws
/// std::overflow_error when the exponent exceeds kMaxExpArgument.
double tsallis_singlet_entropy(double n, double q, int two_s);
double tsallis_singlet_entropy(long n, double q, int two_s);

struct EntropyTable {
    struct Cell {
        double mean = 0.0;
        double stderr_mean = 0.0;
        std::uint64_t samples = 0;
    };

    std::vector<double> q_values;
    std::vector<std::uint32_t> block_sizes;
    std::vector<Cell> cells; ///< q-major: cells[qi * block_sizes.size() + li]

    const Cell& at(std::size_t qi, std::size_t li) const;
};

/// Streaming per-(q, L) mean and variance of per-configuration entropies:
/// Welford update per configuration, pairwise merge for parallel reduction.
class EntropyAccumulator {
public:
    struct Cell {
        std::uint64_t count = 0;
        double mean = 0.0;
        double m2 = 0.0;

        void push(double x);
        void merge(const Cell& other);
    };

    EntropyAccumulator(std::vector<double> q_values, std::vector<std::uint32_t> block_sizes,
                       int two_s);

    /// Folds in one configuration's crossing counts. Mismatched ladders are
    /// rejected; an overflowing cell aborts with (q, L, n) in the message.
    void add(const CrossingTable& counts);

    /// Associative, commutative merge of a partial table over a disjoint
    /// configuration subset.
    void merge(const EntropyAccumulator& other);

    std::uint64_t configurations() const;
    EntropyTable table() const;

    const std::vector<double>& q_values() const { return q_; }
    const std::vector<std::uint32_t>& block_sizes() const { return sizes_; }
    int two_s() const { return two_s_; }
    const std::vector<Cell>& cells() const { return cells_; }

    /// Restores a previously serialized state (checkpoint resume).
    void restore_cells(const std::vector<Cell>& cells);

private:
    std::vector<double> q_;
    std::vector<std::uint32_t> sizes_;
    int two_s_;
    double log_d_;
    std::vector<double> exp_coeff_;  ///< (1-q) ln D per q
    std::vector<double> inv_one_mq_; ///< 1/(1-q) per q
    std::vector<char> von_neumann_;  ///< |1-q| < 1e-9 branch per q
    std::vector<Cell> cells_;
};

/// CSV schema: header "q,L,mean,stderr,M", 12 significant digits.
void write_entropy_csv(std::ostream& os, const EntropyTable& table);
EntropyTable read_entropy_csv(std::istream& is);

} // namespace rsq
