#pragma once

/**
 * Trees as preorder degree sequences.
 *
 * A sequence (d_1, .., d_n) encodes a rooted ordered tree exactly when the
 * walk W_t = sum_{i<=t} (d_i - 1) stays >= 0 for t < n and first hits -1 at
 * t = n. No pointer structure is ever built; every algorithm streams over
 * the sequence with an explicit stack.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace strahler {

class OffspringDistribution;

struct DegreeTree {
    std::vector<std::uint32_t> degrees;

    std::size_t size() const { return degrees.size(); }
};

/// First t with sum_{i<=t} d_i = t - 1, i.e. the size of the tree spanned by
/// the head of the sequence; nullopt when the sequence ends before the tree
/// completes.
std::optional<std::size_t> tree_size_prefix(std::span<const std::uint32_t> seq);

/// Validates that the sequence is exactly one complete tree.
/// Throws TreeCompletesEarly / TreeUnfinished.
DegreeTree from_degree_sequence(std::vector<std::uint32_t> seq);

/// For a sequence with sum = n - 1, the unique 1-based rotation index i such
/// that (d_i, .., d_n, d_1, .., d_{i-1}) is a single valid tree.
/// Throws SumMismatch.
std::size_t rotate_to_valid(std::span<const std::uint32_t> seq);

/// Applies rotate_to_valid and materializes the rotated tree.
DegreeTree rotated_tree(std::span<const std::uint32_t> seq);

/// Number of edges on the longest root-to-leaf path.
std::size_t height(const DegreeTree& tree);

struct WeightedTree {
    DegreeTree tree;
    double log_weight;  // sum of log p_{degree} over nodes
};

inline constexpr std::size_t kEnumerationLimit = 16;

/// Exhaustive enumeration of all size-n trees with degrees in the support of
/// `dist`, weighted by their unconditional probability. The callback receives
/// every tree; weights renormalized over the stream give the exact
/// conditional law. Throws TooLarge for n > 16; infeasible n yields no calls.
void enumerate_trees(const OffspringDistribution& dist, std::size_t n,
                     const std::function<void(const WeightedTree&)>& yield);

}  // namespace strahler
