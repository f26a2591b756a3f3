#include "rsq/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsq {

namespace {

constexpr double kSpectrumFloor = 1e-12; // below this an eigenvalue counts as zero
constexpr std::int64_t kMaxStateDim = 1 << 16;

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

std::vector<double> spectrum_of_density_matrix(const Eigen::MatrixXd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("oracle: eigenvalue solve failed");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

} // namespace

void validate(const SingletLayout& layout, int two_s) {
    if (two_s < 1) throw std::invalid_argument("oracle: two_s must be >= 1");
    if (layout.n_sites < 2 || layout.n_sites % 2 != 0)
        throw std::invalid_argument("oracle: n_sites must be even and >= 2");
    if (layout.cut < 0 || layout.cut > layout.n_sites)
        throw std::invalid_argument("oracle: cut must lie in [0, n_sites]");
    if (layout.anchor < 0 || layout.anchor >= layout.n_sites)
        throw std::invalid_argument("oracle: anchor must lie in [0, n_sites)");
    if (ipow(two_s + 1, layout.n_sites) > kMaxStateDim)
        throw std::invalid_argument("oracle: state dimension above the 2^16 cap");
    std::vector<char> used(static_cast<std::size_t>(layout.n_sites), 0);
    if (layout.pairing.size() != static_cast<std::size_t>(layout.n_sites) / 2)
        throw std::invalid_argument("oracle: pairing must cover every site exactly once");
    for (const auto& [a, b] : layout.pairing) {
        if (a < 0 || b < 0 || a >= layout.n_sites || b >= layout.n_sites || a == b)
            throw std::invalid_argument("oracle: pairing index out of range");
        if (used[static_cast<std::size_t>(a)] || used[static_cast<std::size_t>(b)])
            throw std::invalid_argument("oracle: site paired twice");
        used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = 1;
    }
}

int crossing_pairs(const SingletLayout& layout) {
    int n = 0;
    for (const auto& [a, b] : layout.pairing) {
        const int da = (a - layout.anchor + layout.n_sites) % layout.n_sites;
        const int db = (b - layout.anchor + layout.n_sites) % layout.n_sites;
        n += (da < layout.cut) != (db < layout.cut);
    }
    return n;
}

double tsallis_entropy_of_spectrum(std::span<const double> spectrum, double q) {
    if (!std::isfinite(q)) throw std::invalid_argument("oracle: q must be finite");
    if (std::abs(1.0 - q) < 1e-9) {
        double s = 0.0;
        for (double lam : spectrum)
            if (lam > kSpectrumFloor) s -= lam * std::log(lam);
        return s;
    }
    double trace_q = 0.0;
    for (double lam : spectrum)
        if (lam > kSpectrumFloor) trace_q += std::pow(lam, q);
    return (trace_q - 1.0) / (1.0 - q);
}

std::vector<double> reduced_spectrum(const SingletLayout& layout, int two_s) {
    validate(layout, two_s);
    const int d = two_s + 1;
    const int n = layout.n_sites;
    const std::int64_t dim = ipow(d, n);
    const std::int64_t dim_block = ipow(d, layout.cut);
    const std::int64_t dim_env = dim / dim_block;

    // relabel so the window starts at site 0; the spectrum is label invariant
    std::vector<std::pair<int, int>> pairing = layout.pairing;
    for (auto& [a, b] : pairing) {
        a = (a - layout.anchor + n) % n;
        b = (b - layout.anchor + n) % n;
    }

    // full state vector of the singlet product; site i is digit i (base D)
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(dim);
    std::vector<int> digits(static_cast<std::size_t>(n));
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        std::int64_t rest = idx;
        for (int site = 0; site < n; ++site) {
            digits[static_cast<std::size_t>(site)] = static_cast<int>(rest % d);
            rest /= d;
        }
        double amp = 1.0;
        for (const auto& [a, b] : pairing) {
            const int ma = digits[static_cast<std::size_t>(a)];
            const int mb = digits[static_cast<std::size_t>(b)];
            if (mb != d - 1 - ma) {
                amp = 0.0;
                break;
            }
            if (ma % 2 == 1) amp = -amp; // alternating singlet signs, global phase irrelevant
        }
        psi(idx) = amp;
    }
    psi.normalize();

    // block digits are the low ones, so psi reshapes without permutation;
    // trace out whichever side is larger (pure state: equal spectra)
    Eigen::Map<const Eigen::MatrixXd> m(psi.data(), dim_block, dim_env);
    Eigen::MatrixXd rho;
    if (dim_block <= dim_env)
        rho = m * m.transpose();
    else
        rho = m.transpose() * m;
    return spectrum_of_density_matrix(rho);
}

double exact_block_entropy(const SingletLayout& layout, double q, int two_s) {
    const std::vector<double> spectrum = reduced_spectrum(layout, two_s);
    return tsallis_entropy_of_spectrum(spectrum, q);
}

double exact_ground_block_entropy(std::span<const double> couplings, std::uint32_t anchor,
                                  std::uint32_t block_len, double q) {
    const int n = static_cast<int>(couplings.size());
    if (n < 2 || n > 12)
        throw std::invalid_argument("exact_ground_block_entropy: 2 <= n_sites <= 12");
    if (block_len < 1 || block_len >= static_cast<std::uint32_t>(n))
        throw std::invalid_argument("exact_ground_block_entropy: block_len must lie in [1, n)");
    if (anchor + block_len > static_cast<std::uint32_t>(n))
        throw std::invalid_argument("exact_ground_block_entropy: block must not wrap the boundary");
    for (double j : couplings)
        if (!(j > 0.0)) throw std::invalid_argument("exact_ground_block_entropy: couplings must be positive");

    // periodic spin-1/2 Heisenberg chain in the full 2^n basis
    const std::int64_t dim = std::int64_t{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t s = 0; s < dim; ++s) {
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            const double coupling = couplings[static_cast<std::size_t>(i)];
            const bool up_i = (s >> i) & 1;
            const bool up_j = (s >> j) & 1;
            if (up_i == up_j) {
                h(s, s) += 0.25 * coupling;
            } else {
                h(s, s) -= 0.25 * coupling;
                const std::int64_t t = s ^ ((std::int64_t{1} << i) | (std::int64_t{1} << j));
                h(t, s) += 0.5 * coupling;
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("exact_ground_block_entropy: diagonalization failed");
    const Eigen::VectorXd& energies = solver.eigenvalues();
    if (dim > 1 && energies(1) - energies(0) < 1e-10)
        throw std::runtime_error("exact_ground_block_entropy: degenerate ground state");
    const Eigen::VectorXd ground = solver.eigenvectors().col(0);

    // reduced density matrix of the block bits [anchor, anchor + block_len)
    const std::int64_t dim_block = std::int64_t{1} << block_len;
    const std::int64_t dim_env = dim / dim_block;
    const std::int64_t low_mask = (std::int64_t{1} << anchor) - 1;
    Eigen::MatrixXd amp(dim_block, dim_env);
    for (std::int64_t s = 0; s < dim; ++s) {
        const std::int64_t blk = (s >> anchor) & (dim_block - 1);
        const std::int64_t env = (s & low_mask) | ((s >> (anchor + block_len)) << anchor);
        amp(blk, env) = ground(s);
    }
    Eigen::MatrixXd rho;
    if (dim_block <= dim_env)
        rho = amp * amp.transpose();
    else
        rho = amp.transpose() * amp;
    return tsallis_entropy_of_spectrum(spectrum_of_density_matrix(rho), q);
}

} // namespace rsq
