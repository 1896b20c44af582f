#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "strahler/degree_tree.hpp"
#include "strahler/errors.hpp"
#include "strahler/offspring.hpp"
#include "strahler/rng.hpp"

using namespace strahler;

TEST_CASE("from_degree_sequence accepts exactly one complete tree") {
    CHECK(from_degree_sequence({2, 0, 0}).size() == 3);
    CHECK(from_degree_sequence({0}).size() == 1);
    CHECK_THROWS_AS(from_degree_sequence({1, 2, 0, 0, 0}), TreeCompletesEarly);
    CHECK_THROWS_AS(from_degree_sequence({1, 1, 1}), TreeUnfinished);
    CHECK_THROWS_AS(from_degree_sequence({}), TreeUnfinished);
}

TEST_CASE("tree_size_prefix") {
    const std::vector<std::uint32_t> a{0, 5, 5};
    CHECK(tree_size_prefix(a).value() == 1);
    const std::vector<std::uint32_t> b{2, 0, 0, 1, 0};
    CHECK(tree_size_prefix(b).value() == 3);
    const std::vector<std::uint32_t> c{2, 2, 0};
    CHECK_FALSE(tree_size_prefix(c).has_value());
}

TEST_CASE("rotate_to_valid on the worked examples") {
    const std::vector<std::uint32_t> a{0, 2, 0};
    CHECK(rotate_to_valid(a) == 2);
    CHECK(rotated_tree(a).degrees == std::vector<std::uint32_t>{2, 0, 0});
    const std::vector<std::uint32_t> b{2, 0, 0};
    CHECK(rotate_to_valid(b) == 1);
    const std::vector<std::uint32_t> c{0, 0, 2};
    CHECK(rotate_to_valid(c) == 3);
    const std::vector<std::uint32_t> bad{1, 1, 1};
    CHECK_THROWS_AS(rotate_to_valid(bad), SumMismatch);
}

// Cycle lemma: among the n rotations of any sequence summing to n - 1,
// exactly one is a valid tree, and it is the one rotate_to_valid returns.
TEST_CASE("exactly one rotation is valid") {
    Rng rng(2024);
    const auto geo = OffspringDistribution::builtin("geometric-half");
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng.next_below(11);
        // random degrees conditioned on the right sum, by rejection
        std::vector<std::uint32_t> seq(n);
        for (;;) {
            std::int64_t sum = 0;
            for (auto& d : seq) {
                d = geo.sample_degree(rng);
                sum += d;
            }
            if (sum == static_cast<std::int64_t>(n) - 1) break;
        }
        int valid = 0;
        std::size_t valid_at = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::uint32_t> rot;
            rot.insert(rot.end(), seq.begin() + static_cast<std::ptrdiff_t>(i), seq.end());
            rot.insert(rot.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(i));
            if (tree_size_prefix(rot) == rot.size()) {
                ++valid;
                valid_at = i + 1;
            }
        }
        CHECK(valid == 1);
        CHECK(rotate_to_valid(seq) == valid_at);
    }
}

TEST_CASE("height") {
    CHECK(height(DegreeTree{{0}}) == 0);
    CHECK(height(DegreeTree{{1, 1, 0}}) == 2);
    CHECK(height(DegreeTree{{2, 0, 0}}) == 1);
    CHECK(height(DegreeTree{{2, 2, 0, 0, 0}}) == 2);
}

TEST_CASE("enumerate catalan n=3") {
    const auto catalan = OffspringDistribution::builtin("catalan");
    std::map<std::vector<std::uint32_t>, double> seen;
    enumerate_trees(catalan, 3, [&](const WeightedTree& wt) {
        seen[wt.tree.degrees] = std::exp(wt.log_weight);
    });
    REQUIRE(seen.size() == 2);
    CHECK(seen.at({1, 1, 0}) == doctest::Approx(1.0 / 16).epsilon(1e-12));
    CHECK(seen.at({2, 0, 0}) == doctest::Approx(1.0 / 64).epsilon(1e-12));
    // total mass is P{|T| = 3} = 5/64
    double total = 0;
    for (const auto& [k, w] : seen) total += w;
    CHECK(total == doctest::Approx(5.0 / 64).epsilon(1e-12));
}

TEST_CASE("enumerate edge cases") {
    const auto catalan = OffspringDistribution::builtin("catalan");
    int leaves = 0;
    enumerate_trees(catalan, 1, [&](const WeightedTree& wt) {
        ++leaves;
        CHECK(wt.tree.degrees == std::vector<std::uint32_t>{0});
        CHECK(std::exp(wt.log_weight) == doctest::Approx(0.25));
    });
    CHECK(leaves == 1);

    const auto binary = OffspringDistribution::builtin("full-binary");
    int calls = 0;
    enumerate_trees(binary, 2, [&](const WeightedTree&) { ++calls; });
    CHECK(calls == 0);  // parity makes n = 2 infeasible

    CHECK_THROWS_AS(enumerate_trees(catalan, 17, [](const WeightedTree&) {}), TooLarge);
}

TEST_CASE("every enumerated tree validates and enumeration counts ordered trees") {
    const auto catalan = OffspringDistribution::builtin("catalan");
    // with degrees <= 2 the size-n count is the Motzkin number M_{n-1}
    const std::size_t expected[] = {1, 1, 2, 4, 9, 21, 51};
    for (std::size_t n = 1; n <= 7; ++n) {
        std::size_t count = 0;
        enumerate_trees(catalan, n, [&](const WeightedTree& wt) {
            ++count;
            CHECK(tree_size_prefix(wt.tree.degrees) == n);
        });
        CHECK(count == expected[n - 1]);
    }
}
