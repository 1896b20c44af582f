#include <doctest.h>

#include <cmath>
#include <map>

#include "strahler/degree_tree.hpp"
#include "strahler/errors.hpp"
#include "strahler/offspring.hpp"
#include "strahler/rng.hpp"
#include "strahler/sampler.hpp"

using namespace strahler;

TEST_CASE("point mass at zero always yields the single leaf") {
    // mean 0: not critical, so build a barely-critical law instead and use
    // the genuinely degenerate one only for degree draws elsewhere
    const auto catalan = OffspringDistribution::builtin("catalan");
    Rng rng(1);
    // n = 1 conditional: always the leaf
    for (int i = 0; i < 20; ++i) {
        CHECK(sample_conditional(catalan, 1, rng).degrees == std::vector<std::uint32_t>{0});
    }
}

TEST_CASE("unconditional size-1 fraction matches p0") {
    // the size tail is ~ t^-1/2, so some trees always blow any node cap;
    // a capped tree has size > 1 and the proportion test is unaffected
    SampleBudget budget;
    budget.max_nodes = 10'000;
    const auto one_fraction = [&](const char* name, std::uint64_t seed, int reps) {
        const auto dist = OffspringDistribution::builtin(name);
        Rng rng(seed);
        int singles = 0;
        for (int i = 0; i < reps; ++i) {
            try {
                singles += sample_unconditional(dist, rng, budget).size() == 1;
            } catch (const BudgetExceeded&) {
            }
        }
        return singles / static_cast<double>(reps);
    };
    CHECK(std::fabs(one_fraction("catalan", 17, 300'000) - 0.25) < 0.005);
    CHECK(std::fabs(one_fraction("geometric-half", 18, 300'000) - 0.5) < 0.005);
}

TEST_CASE("unconditional sampler requires criticality and a budget") {
    const auto sub = OffspringDistribution::from_pmf({0.5, 0.5});
    Rng rng(1);
    CHECK_THROWS_AS(sample_unconditional(sub, rng), NotCritical);

    const auto catalan = OffspringDistribution::builtin("catalan");
    SampleBudget tiny;
    tiny.max_nodes = 2;
    int exceeded = 0;
    for (int i = 0; i < 200; ++i) {
        try {
            (void)sample_unconditional(catalan, rng, tiny);
        } catch (const BudgetExceeded&) {
            ++exceeded;
        }
    }
    CHECK(exceeded > 0);
}

TEST_CASE("conditional trees of size 3 follow the exact conditional law") {
    const auto catalan = OffspringDistribution::builtin("catalan");
    Rng rng(23);
    const int reps = 1'000'000;
    int paths = 0, cherries = 0;
    for (int i = 0; i < reps; ++i) {
        const auto t = sample_conditional(catalan, 3, rng);
        if (t.degrees == std::vector<std::uint32_t>{1, 1, 0}) {
            ++paths;
        } else {
            REQUIRE(t.degrees == std::vector<std::uint32_t>{2, 0, 0});
            ++cherries;
        }
    }
    CHECK(std::fabs(paths / static_cast<double>(reps) - 0.8) < 0.002);
    CHECK(std::fabs(cherries / static_cast<double>(reps) - 0.2) < 0.002);
}

TEST_CASE("infeasible sizes are rejected upfront") {
    const auto binary = OffspringDistribution::builtin("full-binary");
    Rng rng(4);
    CHECK_THROWS_AS(sample_conditional(binary, 4, rng), InfeasibleSize);
    CHECK(conditional_size_feasible(binary, 5));
    CHECK_FALSE(conditional_size_feasible(binary, 4));
    CHECK(sample_conditional(binary, 5, rng).size() == 5);
}

TEST_CASE("every sampled tree validates") {
    const auto poisson = OffspringDistribution::builtin("poisson1");
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        CHECK(tree_size_prefix(sample_conditional(poisson, 25, rng).degrees) == 25);
        const auto u = sample_unconditional(poisson, rng);
        CHECK(tree_size_prefix(u.degrees) == u.size());
        const auto kt = sample_kesten_truncated(poisson, 4, rng);
        CHECK(tree_size_prefix(kt.tree.degrees) == kt.tree.size());
    }
}

TEST_CASE("identical seeds give identical trees") {
    const auto geo = OffspringDistribution::builtin("geometric-half");
    Rng a(555), b(555);
    for (int i = 0; i < 50; ++i) {
        CHECK(sample_conditional(geo, 21, a).degrees == sample_conditional(geo, 21, b).degrees);
    }
    Rng c(556);
    CHECK(sample_kesten_truncated(geo, 6, a).tree.degrees !=
          sample_kesten_truncated(geo, 6, c).tree.degrees);
}

TEST_CASE("truncated limit tree at level 0 with point branching") {
    const auto three = OffspringDistribution::from_pmf({2.0 / 3, 0.0, 0.0, 1.0 / 3});
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto kt = sample_kesten_truncated(three, 0, rng);
        REQUIRE(kt.spine_degrees.size() == 1);
        CHECK(kt.spine_degrees[0] == 3);  // size-biased law is a point mass at 3
        CHECK(kt.hanging_count == 2);
        CHECK(kt.tree.degrees[0] == 2);  // continuing child cut at the last level
        CHECK(kt.spine_positions == std::vector<std::size_t>{0});
    }
}

TEST_CASE("truncated limit tree spine structure") {
    const auto catalan = OffspringDistribution::builtin("catalan");
    Rng rng(9);
    const std::size_t ell = 5;
    for (int i = 0; i < 100; ++i) {
        const auto kt = sample_kesten_truncated(catalan, ell, rng);
        REQUIRE(kt.spine_degrees.size() == ell + 1);
        REQUIRE(kt.spine_positions.size() == ell + 1);
        std::uint64_t hanging = 0;
        for (const auto z : kt.spine_degrees) {
            CHECK(z >= 1);
            hanging += z - 1;
        }
        CHECK(kt.hanging_count == hanging);
        CHECK(kt.tree.size() >= ell + 1 + hanging);  // each hanging tree has >= 1 node
        // spine positions are increasing preorder indices starting at the root,
        // and the recorded spine degrees match the tree (last level has its
        // continuing child cut)
        CHECK(kt.spine_positions.front() == 0);
        for (std::size_t j = 1; j < kt.spine_positions.size(); ++j) {
            CHECK(kt.spine_positions[j] > kt.spine_positions[j - 1]);
        }
        for (std::size_t j = 0; j < ell; ++j) {
            CHECK(kt.tree.degrees[kt.spine_positions[j]] == kt.spine_degrees[j]);
        }
        CHECK(kt.tree.degrees[kt.spine_positions[ell]] == kt.spine_degrees[ell] - 1);
    }
}

TEST_CASE("mean hanging-tree count per spine node approaches the variance") {
    const auto catalan = OffspringDistribution::builtin("catalan");
    Rng rng(10);
    SampleBudget budget;
    budget.max_nodes = 1'000'000;
    std::uint64_t hanging = 0;
    std::uint64_t spine_nodes = 0;
    while (spine_nodes < 100'000) {
        try {
            const auto kt = sample_kesten_truncated(catalan, 9, rng, budget);
            hanging += kt.hanging_count;
            spine_nodes += kt.spine_degrees.size();
        } catch (const BudgetExceeded&) {
            // a hanging tree blew the cap; rare enough not to bias the mean
        }
    }
    CHECK(std::fabs(hanging / static_cast<double>(spine_nodes) - catalan.variance()) < 0.01);
}

TEST_CASE("kolchin rate") {
    const auto catalan = OffspringDistribution::builtin("catalan");
    CHECK(kolchin_rate(catalan, 100) == doctest::Approx(0.05641895835477563).epsilon(1e-9));
    const auto binary = OffspringDistribution::builtin("full-binary");
    CHECK(kolchin_rate(binary, 101) == doctest::Approx(0.07939248114932144).epsilon(1e-9));
    CHECK(kolchin_rate(binary, 100) == 0.0);
}

TEST_CASE("rejection cap raises instead of spinning") {
    const auto binary = OffspringDistribution::builtin("full-binary");
    Rng rng(77);
    SampleBudget budget;
    budget.max_rejections = 1;  // nearly always insufficient at n = 101
    int exceeded = 0;
    for (int i = 0; i < 100; ++i) {
        try {
            (void)sample_conditional(binary, 101, rng, budget);
        } catch (const BudgetExceeded&) {
            ++exceeded;
        }
    }
    CHECK(exceeded > 50);
}

TEST_CASE("empirical acceptance rate tracks the asymptotic rate") {
    // loose check at a modest n; the acceptance suite pins n = 10^4 at 15%
    const auto catalan = OffspringDistribution::builtin("catalan");
    Rng rng(123);
    const std::size_t n = 1001;
    std::uint64_t attempts = 0;
    const int accepted = 400;
    for (int i = 0; i < accepted; ++i) {
        attempts += sample_conditional_counted(catalan, n, rng).attempts;
    }
    const double rate = accepted / static_cast<double>(attempts);
    CHECK(std::fabs(rate - kolchin_rate(catalan, n)) / kolchin_rate(catalan, n) < 0.25);
}
