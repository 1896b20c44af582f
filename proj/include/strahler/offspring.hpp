#pragma once

/**
 * Offspring distributions for Galton-Watson processes.
 *
 * A distribution is immutable after construction and safe to share across
 * threads. Sampling uses an O(1) alias table built once; generator state is
 * always caller-owned.
 *
 * Built-in laws with unbounded support (poisson1, geometric-half) are stored
 * as finite pmfs: the tail is cut where the discarded mass drops below 1e-15
 * and the rest is renormalized. The cut point is fixed at construction, and
 * `exact_pmf` can re-materialize the same law at any mantissa width for the
 * extended-precision solvers, including the single-child-removal transform
 * carried out entirely in extended precision.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strahler/bigfloat.hpp"
#include "strahler/rng.hpp"

namespace strahler {

namespace detail {

// Vose alias table over {0, .., n-1}; one uniform draw per sample.
class AliasTable {
  public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);

    std::uint32_t sample(Rng& rng) const {
        const std::size_t n = prob_.size();
        const double x = rng.next_double() * static_cast<double>(n);
        std::size_t i = static_cast<std::size_t>(x);
        if (i >= n) i = n - 1;
        return (x - static_cast<double>(i)) < prob_[i] ? static_cast<std::uint32_t>(i)
                                                       : alias_[i];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace detail

enum class BuiltinKind { finite, catalan, full_binary, geometric_half, poisson1, binomial_k };

class OffspringDistribution {
  public:
    /// Validates and normalizes an explicit finite pmf.
    static OffspringDistribution from_pmf(std::vector<double> pmf);

    /// Built-in laws: catalan, full-binary, geometric-half, poisson1, binomial(k).
    static OffspringDistribution builtin(const std::string& name);
    static OffspringDistribution binomial(int k);

    const std::vector<double>& pmf() const { return pmf_; }
    BuiltinKind kind() const { return kind_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    unsigned period() const { return period_; }                 // gcd{i >= 1 : p_i > 0}
    std::optional<unsigned> branching_degree() const { return d_; }  // min{i > 1 : p_i > 0}
    double truncation_mass() const { return truncation_mass_; }
    bool is_critical() const { return critical_; }
    bool single_child_removed() const { return single_child_removed_; }
    std::string name() const;

    /// Throws NotCritical; called by every consumer that needs mean == 1.
    void require_critical() const;

    /// The altered law with the single-child probability moved onto the rest:
    /// p'_1 = 0, p'_i = p_i / (1 - p_1). Idempotent.
    OffspringDistribution remove_single_child() const;

    /// f(s), f'(s) or f''(s) on [0, 1] over the stored finite support.
    double pgf(double s, int order = 0) const;

    /// E{xi (xi-1) ... (xi-r+1)}, r >= 1.
    double factorial_moment(unsigned r) const;

    std::uint32_t sample_degree(Rng& rng) const { return alias_.sample(rng); }

    /// The law re-materialized at `prec` mantissa bits, optionally with the
    /// single-child transform applied (in extended precision). A distribution
    /// already flagged as transformed materializes identically either way.
    std::vector<BigFloat> exact_pmf(mpfr_prec_t prec, bool remove_single_child) const;

  private:
    OffspringDistribution() = default;
    // Recomputes pmf_ and all derived quantities from base_pmf_, applying
    // the single-child transform when flagged.
    void finalize();

    std::vector<double> base_pmf_;  // the law as constructed, pre-transform
    std::vector<double> pmf_;       // normalized, post-transform when flagged
    BuiltinKind kind_ = BuiltinKind::finite;
    int binomial_k_ = 0;
    bool single_child_removed_ = false;
    double mean_ = 0;
    double variance_ = 0;
    unsigned period_ = 1;
    std::optional<unsigned> d_;
    double truncation_mass_ = 0;
    bool critical_ = false;
    detail::AliasTable alias_;
};

/// Parses a distribution spec as written on the command line or in configs:
/// a builtin name ("catalan", "binomial(3)", ..) or an inline pmf
/// ("pmf:0.25,0.5,0.25").
OffspringDistribution dist_from_spec_string(const std::string& spec);

/// The size-biased law zeta with P{zeta = i} proportional to i * p_i;
/// requires a critical source so that the masses already sum to one.
class SizeBiasedDistribution {
  public:
    explicit SizeBiasedDistribution(const OffspringDistribution& source);

    const std::vector<double>& pmf() const { return pmf_; }  // index i holds i * p_i
    const OffspringDistribution& source() const { return source_; }
    std::uint32_t sample_degree(Rng& rng) const { return alias_.sample(rng); }

  private:
    OffspringDistribution source_;
    std::vector<double> pmf_;
    detail::AliasTable alias_;
};

}  // namespace strahler
