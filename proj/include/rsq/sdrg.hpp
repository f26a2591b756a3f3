#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "rsq/model.hpp"

namespace rsq {

/// One decimation step, recorded in original-lattice coordinates.
struct DecimationEvent {
    enum class Kind : std::uint8_t { Singlet, TrioMerge };

    Kind kind = Kind::Singlet;
    std::uint32_t a = 0;         ///< singlet endpoint / trio left position
    std::uint32_t b = 0;         ///< singlet endpoint / trio middle position
    std::uint32_t c = 0;         ///< trio right position
    std::uint32_t surviving = 0; ///< position of the effective spin (trio only)

    static DecimationEvent singlet(std::uint32_t pos_a, std::uint32_t pos_b);
    static DecimationEvent trio_merge(std::uint32_t left, std::uint32_t mid,
                                      std::uint32_t right, std::uint32_t surviving_position);
    bool is_singlet() const { return kind == Kind::Singlet; }
};

bool operator==(const DecimationEvent& lhs, const DecimationEvent& rhs);

/// Active sites of a periodic chain under decimation: a circular doubly-linked
/// structure over site slots plus a max-priority queue of bonds with lazy
/// deletion. Bond i joins slot i to next(i); every mutation of a bond bumps
/// its validity stamp, so stale queue entries are discarded on pop.
///
/// Bond strengths live in log space: effective couplings near the
/// infinite-randomness fixed point underflow doubles at production sizes.
class ChainState {
public:
    /// couplings[i] joins site i and site (i+1) mod N; all must be positive.
    ChainState(const ModelKind& model, std::span<const double> couplings,
               double kappa_left = 1.0, double kappa_right = 1.0,
               bool debug_checks = false);

    struct Bond {
        std::uint32_t slot = 0;
        double strength = 0.0;     ///< linear units; 0 when the log underflows
        double log_strength = 0.0;
    };

    enum class Side { Left, Right };

    std::size_t n_sites() const { return pos_.size(); }
    std::size_t n_active() const { return n_active_; }
    const ModelKind& model() const { return model_; }

    /// Strongest live bond, or nullopt once the chain is fully decimated.
    /// Ties break toward the smallest representative position.
    std::optional<Bond> strongest_bond();

    /// Which side of `slot`'s bond carries the stronger adjacent bond, and the
    /// log of its strength. Requires n_active() >= 4 so the two neighbors are
    /// distinct bonds.
    std::pair<Side, double> strongest_neighbor(std::uint32_t slot) const;

    /// Removes the pair joined by the strongest bond and rejoins its outer
    /// neighbors with the renormalized coupling. Terminal 2-site chains form
    /// the last singlet with no new bond.
    DecimationEvent decimate_pair(const Bond& bond);

    /// Replaces the trio joined by the strongest bond and its strongest
    /// neighbor with one effective spin at the middle site's position.
    DecimationEvent decimate_trio(const Bond& bond, Side strong_side);

    // introspection, used by tests
    bool active(std::uint32_t slot) const { return active_[slot] != 0; }
    std::uint32_t next(std::uint32_t slot) const { return next_[slot]; }
    std::uint32_t prev(std::uint32_t slot) const { return prev_[slot]; }
    std::uint32_t position(std::uint32_t slot) const { return pos_[slot]; }
    double log_coupling(std::uint32_t slot) const { return log_bond_[slot]; }
    double coupling(std::uint32_t slot) const;

    /// Full traversal check: the active sites form a single cycle with
    /// consistent back links and finite bond logs. Throws std::logic_error.
    void validate_cycle() const;

private:
    struct Entry {
        double log_strength;
        std::uint32_t pos;
        std::uint32_t slot;
        std::uint32_t stamp;
    };
    struct EntryLess {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.log_strength != b.log_strength) return a.log_strength < b.log_strength;
            return a.pos > b.pos; // smaller position wins ties
        }
    };

    void set_bond(std::uint32_t slot, double log_strength);
    void deactivate(std::uint32_t slot);

    ModelKind model_;
    double log_kappa_left_;
    double log_kappa_right_;
    double log_prefactor_;
    double log_gap_;
    bool debug_checks_;
    std::vector<std::uint32_t> next_, prev_, pos_;
    std::vector<double> log_bond_;
    std::vector<std::uint32_t> stamp_;
    std::vector<char> active_;
    std::size_t n_active_;
    std::uint32_t cursor_; // some active slot, start point for validation
    std::priority_queue<Entry, std::vector<Entry>, EntryLess> queue_;
};

struct RunOptions {
    double kappa_left = 1.0;  ///< trio passthrough coefficient, left outer bond
    double kappa_right = 1.0; ///< trio passthrough coefficient, right outer bond
    bool check_invariants = false; ///< validate the cycle after every step (slow)
};

struct RunResult {
    std::vector<DecimationEvent> events;
    std::size_t singlet_count = 0;
    std::size_t trio_count = 0;
    std::size_t residual_sites = 0; ///< 0 normally; 1 after an odd trio history
    double trio_fraction() const;
};

/// Decimates one disorder configuration to exhaustion: repeatedly pick the
/// strongest active bond, branch on the trio condition, apply the matching
/// decimation.
RunResult run_configuration(const ModelKind& model, std::span<const double> couplings,
                            const RunOptions& opts = {});

/// One line per event: "S a b" or "T left mid right surviving".
void write_event_log(std::ostream& os, std::span<const DecimationEvent> events);

} // namespace rsq
