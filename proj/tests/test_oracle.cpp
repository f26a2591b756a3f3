#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rsq/blocks.hpp"
#include "rsq/entropy.hpp"
#include "rsq/oracle.hpp"

using namespace rsq;

namespace {

// all perfect matchings of {0..n-1}, n even
void enumerate_pairings(std::vector<int> sites, std::vector<std::pair<int, int>>& current,
                        std::vector<std::vector<std::pair<int, int>>>& out) {
    if (sites.empty()) {
        out.push_back(current);
        return;
    }
    const int first = sites.front();
    for (std::size_t i = 1; i < sites.size(); ++i) {
        std::vector<int> rest;
        for (std::size_t k = 1; k < sites.size(); ++k)
            if (k != i) rest.push_back(sites[k]);
        current.emplace_back(first, sites[i]);
        enumerate_pairings(rest, current, out);
        current.pop_back();
    }
}

std::vector<std::vector<std::pair<int, int>>> all_pairings(int n) {
    std::vector<int> sites(static_cast<std::size_t>(n));
    std::iota(sites.begin(), sites.end(), 0);
    std::vector<std::vector<std::pair<int, int>>> out;
    std::vector<std::pair<int, int>> current;
    enumerate_pairings(sites, current, out);
    return out;
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("single crossing spin-1/2 singlet at q = 2") {
    SingletLayout layout{2, {{0, 1}}, 1};
    CHECK(crossing_pairs(layout) == 1);
    CHECK(exact_block_entropy(layout, 2.0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("nested pairing leaves the centered block pure") {
    // window {1, 2}: pair (1,2) lies inside, pair (0,3) nests around it
    SingletLayout layout{4, {{0, 3}, {1, 2}}, 2, 1};
    CHECK(crossing_pairs(layout) == 0);
    for (double q : {-1.5, 0.0, 0.5, 1.0, 2.0})
        CHECK(exact_block_entropy(layout, q, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // the same pairing cut at [0, 2) crosses both singlets instead
    SingletLayout shifted{4, {{0, 3}, {1, 2}}, 2, 0};
    CHECK(crossing_pairs(shifted) == 2);
}

TEST_CASE("two crossing singlets give a maximally mixed 4-dimensional block") {
    SingletLayout layout{4, {{0, 2}, {1, 3}}, 2, 1};
    CHECK(crossing_pairs(layout) == 2);
    CHECK(exact_block_entropy(layout, 1.0, 1) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("reduced density matrices are normalized and positive") {
    SingletLayout layout{6, {{0, 4}, {1, 2}, {3, 5}}, 3};
    for (int two_s : {1, 2}) {
        const std::vector<double> spectrum = reduced_spectrum(layout, two_s);
        double trace = 0.0;
        for (double lam : spectrum) {
            CHECK(lam >= -1e-12);
            trace += lam;
        }
        CHECK(trace == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("spectrum entropy special cases") {
    const std::vector<double> spectrum{0.5, 0.25, 0.25, 0.0};
    // q = 0 counts the support: rank - 1
    CHECK(tsallis_entropy_of_spectrum(spectrum, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
    const double vn = -(0.5 * std::log(0.5) + 2 * 0.25 * std::log(0.25));
    CHECK(tsallis_entropy_of_spectrum(spectrum, 1.0) == doctest::Approx(vn).epsilon(1e-12));
}

TEST_CASE("explicit states agree with the closed form on every small layout") {
    const std::vector<double> q_set{-1.5, -0.5, 0.0, 0.5, 1.0, 2.0};
    for (int n : {2, 4, 6}) {
        for (const auto& pairing : all_pairings(n)) {
            for (int anchor : {0, 1}) {
                for (int cut = 0; cut <= n; ++cut) {
                    SingletLayout layout{n, pairing, cut, anchor};
                    const int crossings = crossing_pairs(layout);
                    for (double q : q_set) {
                        const double exact = exact_block_entropy(layout, q, 1);
                        const double closed = tsallis_singlet_entropy(long(crossings), q, 1);
                        const double scale = std::max(1.0, std::abs(closed));
                        CHECK(std::abs(exact - closed) <= 1e-10 * scale);
                    }
                }
            }
        }
    }
    // spin-1 spot checks at the 4-site layouts
    for (const auto& pairing : all_pairings(4)) {
        for (int cut : {1, 2, 3}) {
            SingletLayout layout{4, pairing, cut};
            const int crossings = crossing_pairs(layout);
            for (double q : q_set) {
                const double exact = exact_block_entropy(layout, q, 2);
                const double closed = tsallis_singlet_entropy(long(crossings), q, 2);
                const double scale = std::max(1.0, std::abs(closed));
                CHECK(std::abs(exact - closed) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("layout validation") {
    CHECK_THROWS_AS(validate(SingletLayout{3, {{0, 1}}, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(validate(SingletLayout{4, {{0, 1}, {1, 2}}, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(validate(SingletLayout{4, {{0, 1}}, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(validate(SingletLayout{4, {{0, 1}, {2, 3}}, 5}, 1), std::invalid_argument);
    CHECK_THROWS_AS(validate(SingletLayout{18, {}, 1}, 1), std::invalid_argument);
    // spin-1 on 16 sites exceeds the 2^16 state cap
    CHECK_THROWS_AS(validate(SingletLayout{16, {}, 1}, 2), std::invalid_argument);
}

TEST_CASE("two-site ground state is the exact singlet") {
    const std::vector<double> couplings{1.0, 1.0};
    CHECK(exact_ground_block_entropy(couplings, 0, 1, 1.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("strong disorder puts the ground state close to the decimation prediction") {
    const std::vector<double> couplings{1.0, 1e-3, 0.9, 1e-3};
    const RunResult run = run_configuration(ModelKind::heisenberg(1), couplings);
    const BlockLadder window{{2}, 1, 4, 1}; // block {1, 2}
    const double n = count_crossings(run.events, window).counts[0];
    CHECK(n == 2.0);
    for (double q : {0.5, 1.0, 2.0}) {
        const double predicted = tsallis_singlet_entropy(n, q, 1);
        const double exact = exact_ground_block_entropy(couplings, 1, 2, q);
        CHECK(std::abs(exact - predicted) <= 0.05 * std::abs(predicted));
    }
}

TEST_CASE("uniform couplings expose the perturbative limit of the decimation") {
    const std::vector<double> couplings{1.0, 1.0, 1.0, 1.0};
    const RunResult run = run_configuration(ModelKind::heisenberg(1), couplings);
    const BlockLadder window{{2}, 1, 4, 1};
    const double n = count_crossings(run.events, window).counts[0];
    const double predicted = tsallis_singlet_entropy(n, 1.0, 1);
    const double exact = exact_ground_block_entropy(couplings, 1, 2, 1.0);
    CHECK(std::abs(exact - predicted) > 0.05 * std::abs(predicted));
}

TEST_CASE("degenerate ground states are reported") {
    // odd antiferromagnetic ring: Kramers-degenerate ground state
    const std::vector<double> couplings{1.0, 0.9, 0.8};
    CHECK_THROWS_AS(exact_ground_block_entropy(couplings, 0, 1, 1.0), std::runtime_error);
}

TEST_CASE("diagonalization input limits") {
    std::vector<double> too_long(14, 1.0);
    CHECK_THROWS_AS(exact_ground_block_entropy(too_long, 0, 2, 1.0), std::invalid_argument);
    const std::vector<double> couplings{1.0, 0.5, 0.7, 0.2};
    CHECK_THROWS_AS(exact_ground_block_entropy(couplings, 3, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(exact_ground_block_entropy(couplings, 0, 4, 1.0), std::invalid_argument);
}

} // TEST_SUITE
