#pragma once

/**
 * Horton-Strahler-type statistics over preorder degree sequences.
 *
 * Every variant is a symmetric function of the multiset of child values,
 * combined bottom-up. All traversals use an explicit stack (conditioned
 * trees reach depth Theta(sqrt n), unconditional ones Theta(n)); recursion
 * is reserved for test oracles. Leaves score 0 in every variant; the
 * classical register-function convention is this value plus one.
 *
 * Frame state is O(1) per open node except for the French variant, which
 * keeps a value -> count map (values are bounded by the height, so these
 * maps stay tiny in practice).
 */

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strahler/degree_tree.hpp"

namespace strahler {

enum class Variant { hs, french, canadian, rigid };

const char* variant_name(Variant v);

/// One statistic; optionally fills `per_node` with the value of every node
/// indexed by preorder position.
std::uint32_t strahler_number(const DegreeTree& tree, Variant variant,
                              std::vector<std::uint32_t>* per_node = nullptr);

/// Height of the largest embedded complete k-ary tree, k >= 2.
/// k = 2 coincides with the standard Horton-Strahler number.
std::uint32_t k_register(const DegreeTree& tree, unsigned k,
                         std::vector<std::uint32_t>* per_node = nullptr);

/// Maximum over all n rotations of the Horton-Strahler number of the first
/// complete tree in the rotated sequence (0 when unfinished). Requires
/// sum(deg) = n - 1. A verification device: O(n^2), n capped at 10^4.
std::uint32_t rotational_max(std::span<const std::uint32_t> seq);

inline constexpr std::size_t kRotationalMaxLimit = 10'000;

struct StrahlerValues {
    std::uint32_t hs = 0;
    std::uint32_t french = 0;
    std::uint32_t canadian = 0;
    std::uint32_t rigid = 0;
    std::map<unsigned, std::uint32_t> kary;  // requested k -> value
};

StrahlerValues compute_statistics(const DegreeTree& tree,
                                  std::span<const unsigned> kary_orders = {});

/// A named statistic as it appears on the command line and in configs:
/// hs | french | canadian | rigid | kary:<k> | hsstar.
struct StatSpec {
    enum class Kind { hs, french, canadian, rigid, kary, hsstar };
    Kind kind = Kind::hs;
    unsigned k = 0;  // for kary

    static StatSpec parse(const std::string& text);
    std::string to_string() const;
};

std::uint32_t evaluate_statistic(const DegreeTree& tree, const StatSpec& stat);

}  // namespace strahler
