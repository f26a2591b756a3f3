#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rsq/disorder.hpp"
#include "rsq/sdrg.hpp"

using namespace rsq;

TEST_SUITE("sdrg") {

TEST_CASE("renormalized coupling follows the recursion relations") {
    const ModelKind half = ModelKind::heisenberg(1);
    CHECK(renormalized_coupling(half, 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));

    const ModelKind one = ModelKind::heisenberg(2);
    // prefactor (2/3) S(S+1) = 4/3
    CHECK(renormalized_coupling(one, 0.3, 0.2, 0.6) ==
          doctest::Approx(4.0 / 3.0 * 0.1).epsilon(1e-14));

    const ModelKind biq = ModelKind::biquadratic();
    CHECK(renormalized_coupling(biq, 0.9, 0.9, 1.0) == doctest::Approx(0.18).epsilon(1e-14));

    CHECK_THROWS_AS(renormalized_coupling(half, -0.1, 0.2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(renormalized_coupling(half, 0.1, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(renormalized_coupling(half, 0.6, 0.2, 0.5), std::invalid_argument);
}

TEST_CASE("trio condition thresholds") {
    const ModelKind half = ModelKind::heisenberg(1);
    CHECK_FALSE(trio_condition(half, 1.0, 1.0)); // threshold 2*omega is out of reach
    CHECK_FALSE(trio_condition(half, 0.99, 1.0));

    const ModelKind one = ModelKind::heisenberg(2);
    CHECK(trio_threshold(one, 1.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(trio_condition(one, 0.8, 1.0));
    CHECK_FALSE(trio_condition(one, 0.7, 1.0));

    const ModelKind threehalf = ModelKind::heisenberg(3);
    CHECK(trio_threshold(threehalf, 1.0) == doctest::Approx(0.4).epsilon(1e-14));

    CHECK_FALSE(trio_condition(ModelKind::biquadratic(), 0.99, 1.0));
    CHECK_THROWS_AS(trio_condition(one, 1.2, 1.0), std::invalid_argument);
}

TEST_CASE("pair decimation on the periodic 4-cycle") {
    const ModelKind half = ModelKind::heisenberg(1);
    const std::vector<double> couplings{0.9, 0.1, 0.2, 0.15};
    ChainState chain(half, couplings, 1.0, 1.0, true);

    auto bond = chain.strongest_bond();
    REQUIRE(bond.has_value());
    CHECK(bond->slot == 0);
    CHECK(bond->strength == doctest::Approx(0.9));

    const DecimationEvent ev = chain.decimate_pair(*bond);
    CHECK(ev == DecimationEvent::singlet(0, 1));
    CHECK(chain.n_active() == 2);
    CHECK(chain.active(2));
    CHECK(chain.active(3));
    // new bond 3 -> 2 alongside the untouched 0.2 bond 2 -> 3
    CHECK(chain.next(3) == 2);
    CHECK(chain.coupling(3) == doctest::Approx(0.5 * 0.15 * 0.1 / 0.9).epsilon(1e-14));
    CHECK(chain.coupling(2) == doctest::Approx(0.2));
    chain.validate_cycle();
}

TEST_CASE("terminal 2-site chain forms the last singlet") {
    const ModelKind half = ModelKind::heisenberg(1);
    const std::vector<double> couplings{0.7, 0.3};
    ChainState chain(half, couplings);
    auto bond = chain.strongest_bond();
    REQUIRE(bond.has_value());
    const DecimationEvent ev = chain.decimate_pair(*bond);
    CHECK(ev == DecimationEvent::singlet(0, 1));
    CHECK(chain.n_active() == 0);
    CHECK_FALSE(chain.strongest_bond().has_value());
    CHECK_THROWS_AS(chain.decimate_pair(*bond), std::logic_error);
}

TEST_CASE("equal strongest bonds break ties toward the smallest position") {
    const ModelKind half = ModelKind::heisenberg(1);
    const std::vector<double> couplings{1.0, 1.0, 1.0, 1.0};
    const RunResult run = run_configuration(half, couplings);
    REQUIRE(run.events.size() == 2);
    CHECK(run.events[0] == DecimationEvent::singlet(0, 1));
    CHECK(run.events[1] == DecimationEvent::singlet(2, 3));
}

TEST_CASE("trio merge replaces three sites by the middle one") {
    const ModelKind one = ModelKind::heisenberg(2);
    const std::vector<double> couplings{0.1, 0.1, 0.1, 0.1, 0.9, 1.0, 0.2, 0.1};
    ChainState chain(one, couplings, 1.0, 1.0, true);

    auto bond = chain.strongest_bond();
    REQUIRE(bond.has_value());
    CHECK(bond->slot == 5); // omega joins sites (5, 6)
    const auto [side, j_max] = chain.strongest_neighbor(bond->slot);
    CHECK(side == ChainState::Side::Left);
    CHECK(std::exp(j_max) == doctest::Approx(0.9));
    CHECK(trio_condition(one, std::exp(j_max), bond->strength));

    const DecimationEvent ev = chain.decimate_trio(*bond, side);
    CHECK(ev == DecimationEvent::trio_merge(4, 5, 6, 5));
    CHECK(chain.n_active() == 6);
    chain.validate_cycle();
    // kappa = 1: the outer couplings pass through unchanged
    CHECK(chain.next(3) == 5);
    CHECK(chain.coupling(3) == doctest::Approx(0.1));
    CHECK(chain.next(5) == 7);
    CHECK(chain.coupling(5) == doctest::Approx(0.2));
    CHECK(chain.position(5) == 5);
}

TEST_CASE("trio on the right side of omega") {
    const ModelKind one = ModelKind::heisenberg(2);
    const std::vector<double> couplings{0.1, 0.1, 0.1, 0.1, 0.2, 1.0, 0.9, 0.1};
    ChainState chain(one, couplings, 1.0, 1.0, true);
    auto bond = chain.strongest_bond();
    REQUIRE(bond.has_value());
    CHECK(bond->slot == 5);
    const auto [side, j_max] = chain.strongest_neighbor(bond->slot);
    CHECK(side == ChainState::Side::Right);
    CHECK(std::exp(j_max) == doctest::Approx(0.9));
    const DecimationEvent ev = chain.decimate_trio(*bond, side);
    CHECK(ev == DecimationEvent::trio_merge(5, 6, 7, 6));
    chain.validate_cycle();
    CHECK(chain.next(4) == 6);
    CHECK(chain.coupling(4) == doctest::Approx(0.2));
    CHECK(chain.next(6) == 0);
    CHECK(chain.coupling(6) == doctest::Approx(0.1));
}

TEST_CASE("trio coefficients scale the outer couplings") {
    const ModelKind one = ModelKind::heisenberg(2);
    const std::vector<double> couplings{0.1, 0.1, 0.1, 0.1, 0.9, 1.0, 0.2, 0.1};
    ChainState chain(one, couplings, 0.5, 2.0, true);
    auto bond = chain.strongest_bond();
    const DecimationEvent ev = chain.decimate_trio(*bond, ChainState::Side::Left);
    CHECK(ev == DecimationEvent::trio_merge(4, 5, 6, 5));
    CHECK(chain.coupling(3) == doctest::Approx(0.5 * 0.1));
    CHECK(chain.coupling(5) == doctest::Approx(2.0 * 0.2));
}

TEST_CASE("trio merge is rejected for spin-1/2 and biquadratic chains") {
    const std::vector<double> couplings{0.1, 0.1, 0.9, 1.0, 0.2, 0.1};
    ChainState half(ModelKind::heisenberg(1), couplings);
    auto bond = half.strongest_bond();
    CHECK_THROWS_AS(half.decimate_trio(*bond, ChainState::Side::Left), std::logic_error);

    ChainState biq(ModelKind::biquadratic(), couplings);
    bond = biq.strongest_bond();
    CHECK_THROWS_AS(biq.decimate_trio(*bond, ChainState::Side::Left), std::logic_error);
}

TEST_CASE("hand-traced 4-site run") {
    const ModelKind half = ModelKind::heisenberg(1);
    const std::vector<double> couplings{0.9, 0.01, 0.5, 0.02};
    const RunResult run = run_configuration(half, couplings);
    REQUIRE(run.events.size() == 2);
    CHECK(run.events[0] == DecimationEvent::singlet(0, 1));
    CHECK(run.events[1] == DecimationEvent::singlet(2, 3));
    CHECK(run.singlet_count == 2);
    CHECK(run.trio_count == 0);
    CHECK(run.residual_sites == 0);
}

TEST_CASE("full runs conserve sites and never break the cycle") {
    DisorderSpec spec;
    spec.master_seed = 99;
    RunOptions opts;
    opts.check_invariants = true;
    for (const ModelKind& model : {ModelKind::heisenberg(1), ModelKind::heisenberg(2),
                                   ModelKind::heisenberg(3), ModelKind::biquadratic()}) {
        for (std::uint64_t idx = 0; idx < 4; ++idx) {
            const auto couplings = sample_couplings(spec, 256, idx);
            const RunResult run = run_configuration(model, couplings, opts);
            CHECK(2 * (run.singlet_count + run.trio_count) == 256 - run.residual_sites);
            CHECK(run.residual_sites == 0);
            if (model.two_s == 1 || model.family == ModelFamily::Biquadratic)
                CHECK(run.trio_count == 0);
        }
    }
}

TEST_CASE("spin-1/2 runs produce exactly N/2 singlets") {
    DisorderSpec spec;
    const auto couplings = sample_couplings(spec, 1024, 3);
    const RunResult run = run_configuration(ModelKind::heisenberg(1), couplings);
    CHECK(run.singlet_count == 512);
    CHECK(run.events.size() == 512);
}

TEST_CASE("trio events are rare under the default power law") {
    DisorderSpec spec;
    spec.master_seed = 5;
    const auto couplings = sample_couplings(spec, 10000, 0);
    const RunResult run = run_configuration(ModelKind::heisenberg(2), couplings);
    CHECK(run.trio_fraction() < 0.2);
    MESSAGE("spin-1 trio fraction at N=10^4: ", run.trio_fraction());
}

TEST_CASE("identical couplings give identical event sequences") {
    DisorderSpec spec;
    const auto couplings = sample_couplings(spec, 512, 11);
    const RunResult a = run_configuration(ModelKind::heisenberg(2), couplings);
    const RunResult b = run_configuration(ModelKind::heisenberg(2), couplings);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) CHECK(a.events[i] == b.events[i]);
}

TEST_CASE("event log format") {
    std::vector<DecimationEvent> events{DecimationEvent::singlet(0, 3),
                                        DecimationEvent::trio_merge(1, 2, 4, 2)};
    std::ostringstream os;
    write_event_log(os, events);
    CHECK(os.str() == "S 0 3\nT 1 2 4 2\n");
}

TEST_CASE("rejects bad inputs") {
    const ModelKind half = ModelKind::heisenberg(1);
    CHECK_THROWS_AS(run_configuration(half, std::vector<double>{1.0, 2.0, 3.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_configuration(half, std::vector<double>{1.0, -2.0, 3.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ChainState(half, std::vector<double>{1.0}), std::invalid_argument);
}

} // TEST_SUITE
