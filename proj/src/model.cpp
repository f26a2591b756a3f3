#include "rsq/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsq {

ModelKind ModelKind::heisenberg(int two_s) {
    ModelKind m{ModelFamily::Heisenberg, two_s};
    validate(m);
    return m;
}

ModelKind ModelKind::biquadratic() { return ModelKind{ModelFamily::Biquadratic, 2}; }

std::string ModelKind::name() const {
    return family == ModelFamily::Biquadratic ? "biquadratic" : "heisenberg";
}

void validate(const ModelKind& model) {
    if (model.two_s < 1)
        throw std::invalid_argument("model: two_s must be >= 1");
    if (model.family == ModelFamily::Biquadratic && model.two_s != 2)
        throw std::invalid_argument("model: the biquadratic chain is defined for S = 1 (two_s = 2)");
}

ModelKind parse_model(const std::string& family, int two_s) {
    if (family == "heisenberg") return ModelKind::heisenberg(two_s);
    if (family == "biquadratic") return ModelKind::biquadratic();
    throw std::invalid_argument("model: unknown family '" + family + "' (expected heisenberg or biquadratic)");
}

namespace {

void check_bond_triple(double j1, double j2, double omega) {
    if (!(j1 > 0.0) || !(j2 > 0.0) || !(omega > 0.0))
        throw std::invalid_argument("renormalized_coupling: couplings must be positive");
    if (j1 > omega || j2 > omega)
        throw std::invalid_argument("renormalized_coupling: omega must be the strongest coupling");
}

} // namespace

double renormalized_coupling(const ModelKind& model, double j1, double j2, double omega) {
    validate(model);
    check_bond_triple(j1, j2, omega);
    if (model.family == ModelFamily::Biquadratic)
        return (2.0 / 9.0) * j1 * j2 / omega;
    // (2/3) S(S+1) = two_s (two_s + 2) / 6
    const double prefactor = model.two_s * (model.two_s + 2.0) / 6.0;
    return prefactor * j1 * j2 / omega;
}

double trio_threshold(const ModelKind& model, double omega) {
    validate(model);
    if (!(omega > 0.0))
        throw std::invalid_argument("trio_threshold: omega must be positive");
    if (model.family == ModelFamily::Biquadratic)
        return std::numeric_limits<double>::infinity();
    // 3 omega / [2 S(S+1)]
    return 6.0 * omega / (model.two_s * (model.two_s + 2.0));
}

bool trio_condition(const ModelKind& model, double j_max_neighbor, double omega) {
    validate(model);
    if (!(j_max_neighbor > 0.0) || !(omega > 0.0) || j_max_neighbor > omega)
        throw std::invalid_argument("trio_condition: expected 0 < j_max_neighbor <= omega");
    if (model.family == ModelFamily::Biquadratic) return false;
    if (model.two_s == 1) return false; // threshold 2*omega, unreachable
    return j_max_neighbor > trio_threshold(model, omega);
}

double log_renorm_prefactor(const ModelKind& model) {
    validate(model);
    if (model.family == ModelFamily::Biquadratic) return std::log(2.0 / 9.0);
    return std::log(model.two_s * (model.two_s + 2.0) / 6.0);
}

double log_trio_gap(const ModelKind& model) {
    validate(model);
    if (model.family == ModelFamily::Biquadratic)
        return std::numeric_limits<double>::infinity();
    // for spin-1/2 the gap is ln 2 > 0, never reached by a neighbor of omega
    return std::log(6.0 / (model.two_s * (model.two_s + 2.0)));
}

} // namespace rsq
