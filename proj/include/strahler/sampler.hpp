#pragma once

/**
 * Random generation of Galton-Watson trees.
 *
 * Three samplers, all returning preorder degree sequences:
 *   - unconditional: i.i.d. degrees until the pending-node counter hits zero;
 *   - conditional on size n: plain rejection on the degree-sum event
 *     (sum = n - 1), then the unique valid cycle-lemma rotation. Exactly the
 *     conditional law; expected retries ~ sigma sqrt(2 pi n) / h;
 *   - truncated limit tree: a spine of ell + 1 nodes reproducing by the
 *     size-biased law, unconditional trees hanging off it.
 *
 * Determinism contract for the truncated limit tree: the generator is
 * consumed in the order (spine degrees zeta_0..zeta_ell) then (spine child
 * positions for levels 0..ell-1) then (hanging-tree degrees in preorder
 * order of the assembled tree).
 *
 * Critical trees are finite a.s. but have infinite expected size, so every
 * sampler takes a node budget; exceeding it raises BudgetExceeded rather
 * than silently truncating.
 */

#include <cstdint>
#include <vector>

#include "strahler/degree_tree.hpp"
#include "strahler/offspring.hpp"
#include "strahler/rng.hpp"

namespace strahler {

struct SampleBudget {
    std::uint64_t max_nodes = 10'000'000;
    std::uint64_t max_rejections = 0;  // 0: derive 10^4 * sqrt(n) at use site

    static SampleBudget defaults() { return {}; }
};

DegreeTree sample_unconditional(const OffspringDistribution& dist, Rng& rng,
                                const SampleBudget& budget = {});

struct ConditionalSample {
    DegreeTree tree;
    std::uint64_t attempts;  // rejection attempts including the accepted one
};

ConditionalSample sample_conditional_counted(const OffspringDistribution& dist, std::size_t n,
                                             Rng& rng, const SampleBudget& budget = {});

DegreeTree sample_conditional(const OffspringDistribution& dist, std::size_t n, Rng& rng,
                              const SampleBudget& budget = {});

/// Whether a conditional tree of size n exists: n >= 1 and n = 1 (mod h).
bool conditional_size_feasible(const OffspringDistribution& dist, std::size_t n);

struct KestenTruncatedTree {
    DegreeTree tree;
    std::vector<std::uint32_t> spine_degrees;   // zeta_0 .. zeta_ell, all >= 1
    std::vector<std::size_t> spine_positions;   // preorder indices of spine nodes
    std::uint64_t hanging_count;                // sum (zeta_i - 1)
};

/// The limit tree truncated after spine level `ell`; the level-ell spine
/// node has its continuing child cut, so its tree degree is zeta_ell - 1.
KestenTruncatedTree sample_kesten_truncated(const OffspringDistribution& dist, std::size_t ell,
                                            Rng& rng, const SampleBudget& budget = {});

/// Asymptotic probability of the degree-sum event: h / (sigma sqrt(2 pi n))
/// for feasible n, 0 otherwise.
double kolchin_rate(const OffspringDistribution& dist, std::size_t n);

}  // namespace strahler
