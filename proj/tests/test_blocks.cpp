#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "rsq/blocks.hpp"
#include "rsq/disorder.hpp"

using namespace rsq;

TEST_SUITE("blocks") {

TEST_CASE("crossing counts on hand examples") {
    BlockLadder ladder{{2}, 0, 4, 1};

    std::vector<DecimationEvent> inside{DecimationEvent::singlet(0, 1),
                                        DecimationEvent::singlet(2, 3)};
    CHECK(count_crossings(inside, ladder).counts[0] == 0.0);

    std::vector<DecimationEvent> straddle{DecimationEvent::singlet(1, 2)};
    CHECK(count_crossings(straddle, ladder).counts[0] == 1.0);
}

TEST_CASE("trio merges contribute nothing") {
    BlockLadder ladder{{2}, 0, 6, 1};
    std::vector<DecimationEvent> events{DecimationEvent::trio_merge(0, 1, 2, 1),
                                        DecimationEvent::singlet(1, 4)};
    CHECK(count_crossings(events, ladder).counts[0] == 1.0);
}

TEST_CASE("windows wrap around the periodic boundary") {
    // window [3, 3+2) = {3, 0} on a 4-site ring
    BlockLadder ladder{{2}, 3, 4, 1};
    std::vector<DecimationEvent> events{DecimationEvent::singlet(0, 1)};
    CHECK(count_crossings(events, ladder).counts[0] == 1.0);
    std::vector<DecimationEvent> both_in{DecimationEvent::singlet(3, 0)};
    CHECK(count_crossings(both_in, ladder).counts[0] == 0.0);
}

TEST_CASE("a window and its complement see the same crossings") {
    DisorderSpec spec;
    spec.master_seed = 2;
    const std::uint32_t n = 64;
    const auto couplings = sample_couplings(spec, n, 0);
    const RunResult run = run_configuration(ModelKind::heisenberg(1), couplings);
    for (std::uint32_t L : {8u, 24u, 32u, 48u}) {
        BlockLadder window{{L}, 0, n, 1};
        BlockLadder complement{{n - L}, L, n, 1};
        CHECK(count_crossings(run.events, window).counts[0] ==
              count_crossings(run.events, complement).counts[0]);
    }
}

TEST_CASE("counts are bounded and order independent") {
    DisorderSpec spec;
    spec.master_seed = 3;
    const std::uint32_t n = 128;
    const auto couplings = sample_couplings(spec, n, 1);
    RunResult run = run_configuration(ModelKind::heisenberg(1), couplings);
    BlockLadder ladder{{4, 16, 64, 100}, 0, n, 1};
    const CrossingTable counts = count_crossings(run.events, ladder);
    for (std::size_t li = 0; li < ladder.sizes.size(); ++li) {
        CHECK(counts.counts[li] >= 0.0);
        CHECK(counts.counts[li] <=
              std::min(ladder.sizes[li], n - ladder.sizes[li]));
    }
    std::mt19937 gen(5);
    std::shuffle(run.events.begin(), run.events.end(), gen);
    CHECK(count_crossings(run.events, ladder).counts == counts.counts);
}

TEST_CASE("multiple anchors average the counts") {
    // singlet (0,1) on a 4-ring, L=1: windows {0},{1},{2},{3} see 1,1,0,0
    BlockLadder ladder{{1}, 0, 4, 4};
    std::vector<DecimationEvent> events{DecimationEvent::singlet(0, 1)};
    CHECK(count_crossings(events, ladder).counts[0] == doctest::Approx(0.5));
}

TEST_CASE("default ladder spans 8 to N/8 in powers of two") {
    CHECK(default_ladder_sizes(50000) ==
          std::vector<std::uint32_t>{8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096});
    CHECK(default_ladder_sizes(64) == std::vector<std::uint32_t>{8});
    CHECK(default_ladder_sizes(60).empty());
}

TEST_CASE("validation rejects malformed ladders and positions") {
    CHECK_THROWS_AS(validate(BlockLadder{{}, 0, 16, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BlockLadder{{4, 4}, 0, 16, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BlockLadder{{16}, 0, 16, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BlockLadder{{4}, 16, 16, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BlockLadder{{4}, 0, 16, 0}), std::invalid_argument);

    BlockLadder ladder{{2}, 0, 4, 1};
    std::vector<DecimationEvent> events{DecimationEvent::singlet(0, 7)};
    CHECK_THROWS_AS(count_crossings(events, ladder), std::invalid_argument);
}

} // TEST_SUITE
