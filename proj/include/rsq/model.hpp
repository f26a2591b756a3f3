#pragma once

#include <string>

namespace rsq {

enum class ModelFamily { Heisenberg, Biquadratic };

/// Model selector: antiferromagnetic Heisenberg chain with spin S = two_s/2,
/// or the spin-1 biquadratic chain.
struct ModelKind {
    ModelFamily family = ModelFamily::Heisenberg;
    int two_s = 1;

    static ModelKind heisenberg(int two_s);
    static ModelKind biquadratic(); // fixes S = 1

    double spin() const { return 0.5 * two_s; }
    int local_dim() const { return two_s + 1; } // D = 2S+1
    std::string name() const;
};

void validate(const ModelKind& model);
ModelKind parse_model(const std::string& family, int two_s);

/// Effective coupling left behind when the strongest bond omega is decimated
/// and its neighbor bonds j1, j2 are joined perturbatively.
double renormalized_coupling(const ModelKind& model, double j1, double j2, double omega);

/// Largest neighbor strength at which the perturbative singlet decimation is
/// still valid; above it the trio has to be solved exactly. Infinite for the
/// biquadratic chain, which only ever forms singlets.
double trio_threshold(const ModelKind& model, double omega);

/// True when j_max_neighbor exceeds trio_threshold. Always false for spin-1/2
/// (the threshold 2*omega is out of reach for j <= omega) and for biquadratic.
bool trio_condition(const ModelKind& model, double j_max_neighbor, double omega);

// Log-domain forms used by the decimation engine: effective couplings decay
// doubly exponentially toward the infinite-randomness fixed point and
// underflow doubles long before chains reach production sizes.

/// ln of the renormalization prefactor: ln((2/3)S(S+1)) or ln(2/9).
double log_renorm_prefactor(const ModelKind& model);

/// Trio when ln(j_max_neighbor) - ln(omega) exceeds this gap;
/// ln(3/[2S(S+1)]) for Heisenberg, +infinity for biquadratic.
double log_trio_gap(const ModelKind& model);

} // namespace rsq
