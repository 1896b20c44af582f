#pragma once

/**
 * Exact tail distributions of tree statistics on unconditional trees.
 *
 * Each solver runs a fixed-point recursion over the offspring generating
 * function f in software floating point (configurable mantissa, unbounded
 * exponent): the tails reach beta^((d/2)^x), far outside hardware range.
 *
 *   - hs: the single-child transform is applied first (it preserves the law
 *     of the statistic), then the pmf recursion
 *         q_x = (f(F_{x-1}) - f(F_{x-2}) - q_{x-1} f'(F_{x-2})) / (1 - f'(F_{x-1})),
 *     with F_{-1} = 0, F_0 = q_0 = p_0.
 *   - rigid: same transform, q_0 = p_0; each q_x is the unique root of
 *         f(q_{x-1}) - f(q) + f(F_{x-1} + q) - f(F_{x-1}) - q = 0
 *     on [0, 1 - F_{x-1}] (strictly decreasing there), found by bisection.
 *   - kary (k >= 3, no transform): F_0 solves z = sum_{l<k} p_l z^l; then
 *     F_x solves the truncated-binomial fixed point by bisection on
 *     [F_{x-1}, 1].
 *
 * All pgf combinations are evaluated in cancellation-free difference form
 * (powers differenced term by term), so accuracy is limited by the mantissa,
 * not by F -> 1. Bisection resolves each root to nearly full working
 * precision (the recursion amplifies per-step slack by ~s_x/s_{x+1}, so
 * anything less destroys the deep tail when d >= 3), capped at 10 * bits
 * iterations; brackets are verified before iterating (NoBracket on failure).
 * PrecisionExhausted is raised when the working precision can no longer
 * separate the survival from zero.
 */

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strahler/bigfloat.hpp"
#include "strahler/degree_tree.hpp"
#include "strahler/offspring.hpp"
#include "strahler/statistics.hpp"

namespace strahler {

enum class TailStatistic { hs, rigid, kary };

struct TailTable {
    TailStatistic statistic;
    unsigned kary_k = 0;  // set for kary
    std::string dist_id;
    mpfr_prec_t precision_bits;
    bool transform_applied;
    double truncation_mass;
    std::vector<BigFloat> q;  // q[0..x_max], pmf
    std::vector<BigFloat> s;  // s[0..x_max+1], survival; s[0] = 1

    std::size_t x_max() const { return q.size() - 1; }
    std::string statistic_label() const;
};

TailTable hs_tail_table(const OffspringDistribution& dist, std::size_t x_max,
                        mpfr_prec_t precision_bits = 256);

TailTable rigid_tail_table(const OffspringDistribution& dist, std::size_t x_max,
                           mpfr_prec_t precision_bits = 256);

TailTable kary_tail_table(const OffspringDistribution& dist, unsigned k, std::size_t x_max,
                          mpfr_prec_t precision_bits = 256);

namespace detail {
// The k-ary recursion without the k >= 3 guard; k = 2 exists so tests can
// cross-check it against the hs route.
TailTable kary_tail_table_any_k(const OffspringDistribution& dist, unsigned k, std::size_t x_max,
                                mpfr_prec_t precision_bits);
}  // namespace detail

/// `x,q,survival` rows; values printed with precision-faithful digit counts.
void write_tail_csv(const TailTable& table, std::ostream& os);

/// JSON metadata sidecar contents (dist, statistic, precision, transform,
/// truncation mass).
std::string tail_metadata_json(const TailTable& table);

// --- exact conditional laws by exhaustive enumeration (n <= 16) ---

struct ConditionalPmf {
    std::map<std::uint32_t, double> pmf;  // statistic value -> probability
    double size_probability;              // P{|T| = n}
    std::size_t tree_count;
};

ConditionalPmf conditional_bruteforce(const OffspringDistribution& dist, std::size_t n,
                                      const StatSpec& stat);

// --- constants governing the rigid / k-ary regimes ---

struct RigidConstants {
    unsigned d;                   // min{i > 1 : p_i > 0}
    std::optional<double> gamma;  // 1 + sqrt(sigma^2 / (2 p_2)), present iff d == 2
};

RigidConstants rigid_constants(const OffspringDistribution& dist);

}  // namespace strahler
