#include "rsq/sdrg.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rsq {

DecimationEvent DecimationEvent::singlet(std::uint32_t pos_a, std::uint32_t pos_b) {
    DecimationEvent ev;
    ev.kind = Kind::Singlet;
    ev.a = pos_a;
    ev.b = pos_b;
    return ev;
}

DecimationEvent DecimationEvent::trio_merge(std::uint32_t left, std::uint32_t mid,
                                            std::uint32_t right, std::uint32_t surviving_position) {
    DecimationEvent ev;
    ev.kind = Kind::TrioMerge;
    ev.a = left;
    ev.b = mid;
    ev.c = right;
    ev.surviving = surviving_position;
    return ev;
}

bool operator==(const DecimationEvent& lhs, const DecimationEvent& rhs) {
    if (lhs.kind != rhs.kind) return false;
    if (lhs.kind == DecimationEvent::Kind::Singlet) return lhs.a == rhs.a && lhs.b == rhs.b;
    return lhs.a == rhs.a && lhs.b == rhs.b && lhs.c == rhs.c && lhs.surviving == rhs.surviving;
}

ChainState::ChainState(const ModelKind& model, std::span<const double> couplings,
                       double kappa_left, double kappa_right, bool debug_checks)
    : model_(model), debug_checks_(debug_checks) {
    validate(model_);
    const std::size_t n = couplings.size();
    if (n < 2)
        throw std::invalid_argument("ChainState: need at least 2 sites");
    if (!(kappa_left > 0.0) || !(kappa_right > 0.0))
        throw std::invalid_argument("ChainState: kappa coefficients must be positive");
    log_kappa_left_ = std::log(kappa_left);
    log_kappa_right_ = std::log(kappa_right);
    log_prefactor_ = log_renorm_prefactor(model_);
    log_gap_ = log_trio_gap(model_);

    next_.resize(n);
    prev_.resize(n);
    pos_.resize(n);
    log_bond_.resize(n);
    stamp_.assign(n, 0);
    active_.assign(n, 1);
    n_active_ = n;
    cursor_ = 0;

    std::vector<Entry> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(couplings[i] > 0.0) || !std::isfinite(couplings[i]))
            throw std::invalid_argument("ChainState: coupling " + std::to_string(i) +
                                        " must be positive and finite");
        const auto u = static_cast<std::uint32_t>(i);
        next_[i] = static_cast<std::uint32_t>((i + 1) % n);
        prev_[i] = static_cast<std::uint32_t>((i + n - 1) % n);
        pos_[i] = u;
        log_bond_[i] = std::log(couplings[i]);
        entries.push_back(Entry{log_bond_[i], u, u, 0});
    }
    queue_ = decltype(queue_)(EntryLess{}, std::move(entries));
}

double ChainState::coupling(std::uint32_t slot) const { return std::exp(log_bond_[slot]); }

void ChainState::set_bond(std::uint32_t slot, double log_strength) {
    log_bond_[slot] = log_strength;
    ++stamp_[slot];
    queue_.push(Entry{log_strength, pos_[slot], slot, stamp_[slot]});
}

void ChainState::deactivate(std::uint32_t slot) {
    active_[slot] = 0;
    ++stamp_[slot]; // retire the bond this slot owned
}

std::optional<ChainState::Bond> ChainState::strongest_bond() {
    while (!queue_.empty()) {
        const Entry& e = queue_.top();
        if (!active_[e.slot] || stamp_[e.slot] != e.stamp) {
            queue_.pop();
            continue;
        }
        return Bond{e.slot, std::exp(e.log_strength), e.log_strength};
    }
    return std::nullopt;
}

std::pair<ChainState::Side, double> ChainState::strongest_neighbor(std::uint32_t slot) const {
    if (n_active_ < 4)
        throw std::logic_error("strongest_neighbor: needs at least 4 active sites");
    const std::uint32_t left_owner = prev_[slot];
    const std::uint32_t right_owner = next_[slot];
    const double jl = log_bond_[left_owner];
    const double jr = log_bond_[right_owner];
    if (jl != jr) return jl > jr ? std::pair{Side::Left, jl} : std::pair{Side::Right, jr};
    // exact tie: smaller representative position wins
    return pos_[left_owner] <= pos_[right_owner] ? std::pair{Side::Left, jl}
                                                 : std::pair{Side::Right, jr};
}

DecimationEvent ChainState::decimate_pair(const Bond& bond) {
    const std::uint32_t i = bond.slot;
    if (n_active_ < 2) throw std::logic_error("decimate_pair: fewer than 2 active sites");
    if (!active_[i]) throw std::logic_error("decimate_pair: bond slot is not active");
    const std::uint32_t j = next_[i];
    const double log_omega = log_bond_[i];
    const DecimationEvent ev = DecimationEvent::singlet(pos_[i], pos_[j]);

    if (n_active_ == 2) { // terminal pair; no new bond
        deactivate(i);
        deactivate(j);
        n_active_ = 0;
        return ev;
    }

    const std::uint32_t l = prev_[i];
    const std::uint32_t r = next_[j];
    const double log_left = log_bond_[l];
    const double log_right = log_bond_[j];
    deactivate(i);
    deactivate(j);
    n_active_ -= 2;

    if (l == r) {
        // only three sites were left; the survivor becomes a lone site
        next_[l] = l;
        prev_[l] = l;
        ++stamp_[l];
        cursor_ = l;
        return ev;
    }

    const double log_new = log_prefactor_ + log_left + log_right - log_omega;
    next_[l] = r;
    prev_[r] = l;
    set_bond(l, log_new);
    cursor_ = l;

    if (debug_checks_ && !(std::max(log_left, log_right) - log_omega > log_gap_) &&
        !(log_new < log_omega))
        throw std::logic_error("decimate_pair: renormalized coupling not below omega");
    return ev;
}

DecimationEvent ChainState::decimate_trio(const Bond& bond, Side strong_side) {
    if (model_.family != ModelFamily::Heisenberg || model_.two_s < 2)
        throw std::logic_error("decimate_trio: only defined for Heisenberg chains with S >= 1");
    if (n_active_ < 4)
        throw std::logic_error("decimate_trio: needs at least 4 active sites");
    const std::uint32_t b = bond.slot;
    if (!active_[b]) throw std::logic_error("decimate_trio: bond slot is not active");
    const std::uint32_t c = next_[b];

    if (strong_side == Side::Left) {
        // trio (a, b, c); survivor keeps slot b (middle position)
        const std::uint32_t a = prev_[b];
        const std::uint32_t p = prev_[a];
        const std::uint32_t d = next_[c];
        const DecimationEvent ev = DecimationEvent::trio_merge(pos_[a], pos_[b], pos_[c], pos_[b]);
        const double log_outer_left = log_bond_[p];
        const double log_outer_right = log_bond_[c];
        deactivate(a);
        deactivate(c);
        n_active_ -= 2;
        next_[p] = b;
        prev_[b] = p;
        next_[b] = d;
        prev_[d] = b;
        set_bond(p, log_kappa_left_ + log_outer_left);
        set_bond(b, log_kappa_right_ + log_outer_right);
        cursor_ = b;
        return ev;
    }

    // trio (b, c, d); survivor keeps slot c (middle position)
    const std::uint32_t d = next_[c];
    const std::uint32_t a = prev_[b];
    const std::uint32_t e = next_[d];
    const DecimationEvent ev = DecimationEvent::trio_merge(pos_[b], pos_[c], pos_[d], pos_[c]);
    const double log_outer_left = log_bond_[a];
    const double log_outer_right = log_bond_[d];
    deactivate(b);
    deactivate(d);
    n_active_ -= 2;
    next_[a] = c;
    prev_[c] = a;
    next_[c] = e;
    prev_[e] = c;
    set_bond(a, log_kappa_left_ + log_outer_left);
    set_bond(c, log_kappa_right_ + log_outer_right);
    cursor_ = c;
    return ev;
}

void ChainState::validate_cycle() const {
    if (n_active_ == 0) return;
    std::uint32_t start = cursor_;
    if (!active_[start]) {
        start = 0;
        while (start < active_.size() && !active_[start]) ++start;
        if (start == active_.size())
            throw std::logic_error("validate_cycle: n_active > 0 but no active slot found");
    }
    std::uint32_t slot = start;
    for (std::size_t step = 0; step < n_active_; ++step) {
        if (!active_[slot])
            throw std::logic_error("validate_cycle: walk reached an inactive slot");
        const std::uint32_t nxt = next_[slot];
        if (prev_[nxt] != slot)
            throw std::logic_error("validate_cycle: broken back link");
        if (n_active_ >= 2 && !std::isfinite(log_bond_[slot]))
            throw std::logic_error("validate_cycle: bond log is not finite");
        slot = nxt;
    }
    if (slot != start)
        throw std::logic_error("validate_cycle: active sites do not close into one cycle");
}

double RunResult::trio_fraction() const {
    const std::size_t total = singlet_count + trio_count;
    return total == 0 ? 0.0 : static_cast<double>(trio_count) / static_cast<double>(total);
}

RunResult run_configuration(const ModelKind& model, std::span<const double> couplings,
                            const RunOptions& opts) {
    validate(model);
    if (couplings.size() < 2 || couplings.size() % 2 != 0)
        throw std::invalid_argument("run_configuration: n_sites must be even and >= 2");

    ChainState chain(model, couplings, opts.kappa_left, opts.kappa_right, opts.check_invariants);
    const bool trio_capable = model.family == ModelFamily::Heisenberg && model.two_s >= 2;
    const double log_gap = log_trio_gap(model);

    RunResult out;
    out.events.reserve(couplings.size() / 2 + 2);
    while (auto bond = chain.strongest_bond()) {
        bool trio = false;
        ChainState::Side side = ChainState::Side::Left;
        if (trio_capable && chain.n_active() >= 4) {
            const auto [s, log_j_max] = chain.strongest_neighbor(bond->slot);
            if (log_j_max - bond->log_strength > log_gap) {
                trio = true;
                side = s;
            }
        }
        if (trio) {
            out.events.push_back(chain.decimate_trio(*bond, side));
            ++out.trio_count;
        } else {
            out.events.push_back(chain.decimate_pair(*bond));
            ++out.singlet_count;
        }
        if (opts.check_invariants) chain.validate_cycle();
    }
    out.residual_sites = chain.n_active();
    if (out.residual_sites > 1)
        throw std::logic_error("run_configuration: more than one residual site at termination");
    return out;
}

void write_event_log(std::ostream& os, std::span<const DecimationEvent> events) {
    for (const DecimationEvent& ev : events) {
        if (ev.is_singlet())
            os << "S " << ev.a << ' ' << ev.b << '\n';
        else
            os << "T " << ev.a << ' ' << ev.b << ' ' << ev.c << ' ' << ev.surviving << '\n';
    }
}

} // namespace rsq
