#include "strahler/exact_dist.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "strahler/errors.hpp"

namespace strahler {

namespace {

/**
 * Extended-precision pmf with difference-form evaluation kernels.
 *
 * Near the fixed point the recursions subtract pgf values that agree to
 * hundreds of bits, so f is never evaluated and differenced naively.
 * Instead every combination below is an algebraic identity whose terms are
 * all nonnegative, plus at most one explicitly tracked tiny quantity
 * (1 - sum l p_l, zero for exactly-critical laws):
 *
 *   f(a) - f(b)  = (a-b) sum_l p_l S_l(a,b),  S_l = sum_j a^j b^(l-1-j)
 *   1 - f'(s)    = (1 - m1) + (1-s) sum_j w_j s^j,  w_j = sum_{l>=j+2} l p_l
 *   f(s) - s     = (1-s) [ (1 - m1) + (1-s) sum_i z_i s^i ],
 *                  z_i = sum_{l>=i+2} (l-1-i) p_l
 *   l - S_l(a,b) = sum_j [ (1-a) G_a(j) + a^j (1-b) G_b(l-1-j) ],
 *                  G_x(m) = sum_{t<m} x^t
 */
class PgfPoly {
  public:
    PgfPoly(std::vector<BigFloat> pmf, mpfr_prec_t prec)
        : prec_(prec), p_(std::move(pmf)), one_minus_m1_(0.0, prec) {
        const std::size_t L = p_.size();
        BigFloat m1(0.0, prec_);
        for (std::size_t l = 1; l < L; ++l) m1 += p_[l] * static_cast<long>(l);
        one_minus_m1_ = BigFloat(1.0, prec_) - m1;
        if (L >= 2) {
            w_.assign(L - 1, BigFloat(0.0, prec_));
            z_.assign(L - 1, BigFloat(0.0, prec_));
            for (std::size_t j = 0; j + 2 <= L; ++j) {
                BigFloat wj(0.0, prec_), zj(0.0, prec_);
                for (std::size_t l = j + 2; l < L; ++l) {
                    wj += p_[l] * static_cast<long>(l);
                    zj += p_[l] * static_cast<long>(l - 1 - j);
                }
                w_[j] = wj;
                z_[j] = zj;
            }
        }
    }

    mpfr_prec_t prec() const { return prec_; }
    std::size_t size() const { return p_.size(); }
    const BigFloat& coeff(std::size_t l) const { return p_[l]; }
    const BigFloat& one_minus_mean() const { return one_minus_m1_; }

    BigFloat eval(const BigFloat& s) const {
        BigFloat r(0.0, prec_);
        for (std::size_t i = p_.size(); i-- > 0;) r = r * s + p_[i];
        return r;
    }

    // f(a) - f(b), a >= b >= 0, with delta = a - b supplied exactly.
    BigFloat diff(const BigFloat& a, const BigFloat& b, const BigFloat& delta) const {
        BigFloat total(0.0, prec_);
        BigFloat s_l(0.0, prec_);       // S_l, starts at S_0 = 0
        BigFloat b_pow(1.0, prec_);     // b^(l-1) lagging power
        for (std::size_t l = 1; l < p_.size(); ++l) {
            // S_l = a S_{l-1} + b^{l-1}
            s_l = a * s_l + b_pow;
            b_pow *= b;
            total += p_[l] * s_l;
        }
        return delta * total;
    }

    // 1 - f'(s) with u = 1 - s supplied exactly.
    BigFloat one_minus_deriv(const BigFloat& s, const BigFloat& u) const {
        BigFloat w(0.0, prec_);
        for (std::size_t i = w_.size(); i-- > 0;) w = w * s + w_[i];
        return one_minus_m1_ + u * w;
    }

    // f(s) - s with u = 1 - s supplied exactly.
    BigFloat pgf_minus_identity(const BigFloat& s, const BigFloat& u) const {
        BigFloat z(0.0, prec_);
        for (std::size_t i = z_.size(); i-- > 0;) z = z * s + z_[i];
        return u * (one_minus_m1_ + u * z);
    }

    // sum_l p_l sum_{m<=l-2} (l-1-m) a^m b^(l-2-m); the hs-recursion
    // numerator is q_{x-1}^2 times this at (a, b) = (F_{x-1}, F_{x-2}).
    BigFloat curvature2(const BigFloat& a, const BigFloat& b) const {
        const std::size_t L = p_.size();
        std::vector<BigFloat> a_pow{BigFloat(1.0, prec_)};
        std::vector<BigFloat> b_pow{BigFloat(1.0, prec_)};
        for (std::size_t i = 1; i + 2 < L + 1; ++i) {
            a_pow.push_back(a_pow.back() * a);
            b_pow.push_back(b_pow.back() * b);
        }
        BigFloat total(0.0, prec_);
        for (std::size_t l = 2; l < L; ++l) {
            BigFloat inner(0.0, prec_);
            for (std::size_t m = 0; m + 2 <= l; ++m) {
                inner += a_pow[m] * b_pow[l - 2 - m] * static_cast<long>(l - 1 - m);
            }
            total += p_[l] * inner;
        }
        return total;
    }

    // q (1 - sum_l p_l S_l(F+q, F)) = q [(1-m1) + sum_l p_l (l - S_l)],
    // i.e. q - (f(F+q) - f(F)), all pieces positive.
    BigFloat identity_minus_diff(const BigFloat& F, const BigFloat& q, const BigFloat& u) const {
        // arguments: a = F + q, b = F; 1 - a = u - q, 1 - b = u.
        const std::size_t L = p_.size();
        const BigFloat a = F + q;
        const BigFloat ua = u - q;
        std::vector<BigFloat> a_pow{BigFloat(1.0, prec_)};
        std::vector<BigFloat> b_pow{BigFloat(1.0, prec_)};
        std::vector<BigFloat> ga{BigFloat(0.0, prec_)};  // G_a(m) = sum_{t<m} a^t
        std::vector<BigFloat> gb{BigFloat(0.0, prec_)};
        for (std::size_t m = 1; m < L; ++m) {
            ga.push_back(ga.back() + a_pow.back());
            gb.push_back(gb.back() + b_pow.back());
            a_pow.push_back(a_pow.back() * a);
            b_pow.push_back(b_pow.back() * F);
        }
        BigFloat total(0.0, prec_);
        for (std::size_t l = 1; l < L; ++l) {
            BigFloat r_l(0.0, prec_);  // l - S_l(a, b)
            for (std::size_t j = 0; j < l; ++j) {
                r_l += ua * ga[j] + a_pow[j] * (u * gb[l - 1 - j]);
            }
            total += p_[l] * r_l;
        }
        return q * (one_minus_m1_ + total);
    }

  private:
    mpfr_prec_t prec_;
    std::vector<BigFloat> p_;
    BigFloat one_minus_m1_;
    std::vector<BigFloat> w_;  // coefficients of (1 - f'(s)) / (1 - s) - residual
    std::vector<BigFloat> z_;  // coefficients of ((f(s) - s)/(1-s) - (1-m1)) / (1-s)
};

// Bisection for a strictly decreasing g with g(lo) >= 0 >= g(hi).
//
// Each step's root is resolved to nearly full working precision, not merely
// 2^-(bits/2): in the doubly-exponential regime (d >= 3) the recursion
// amplifies per-step truncation by roughly s_x / s_{x+1} per step, so any
// slack in early roots wipes out the deep tail entirely. At most 10 * bits
// iterations, which bisection never exhausts before the interval stops
// splitting.
BigFloat bisect_decreasing(const std::function<BigFloat(const BigFloat&)>& g, BigFloat lo,
                           BigFloat hi, mpfr_prec_t bits, const char* what) {
    const BigFloat g_lo = g(lo);
    const BigFloat g_hi = g(hi);
    if (g_lo.sign() < 0) {
        // the low end is a sum of nonnegative terms; a negative value cannot
        // be rounding and means the equation itself is wrong
        throw NoBracket(std::string(what) + ": root not bracketed");
    }
    if (g_hi.sign() > 0) {
        // the high end is negative in exact arithmetic; losing its sign means
        // the mantissa can no longer resolve the remaining tail
        throw PrecisionExhausted(std::string(what) +
                                 ": upper bracket lost below working precision");
    }
    if (g_lo.is_zero() || g_lo.sign() == 0) return lo;
    if (g_hi.sign() == 0) return hi;
    const BigFloat rel_tol = BigFloat::pow2(-static_cast<long>(bits - 2), bits);
    const long max_iter = 10 * static_cast<long>(bits);
    for (long it = 0; it < max_iter; ++it) {
        if (lo.sign() > 0) {
            const BigFloat width = hi - lo;
            if (width <= rel_tol * lo) break;
        }
        BigFloat mid = (lo + hi) / 2L;
        if (mid <= lo || mid >= hi) break;  // interval no longer splittable
        if (g(mid).sign() >= 0) {
            lo = std::move(mid);
        } else {
            hi = std::move(mid);
        }
    }
    return (lo + hi) / 2L;
}

bool transform_flag(const OffspringDistribution& dist) {
    return dist.single_child_removed() ||
           (dist.pmf().size() > 1 && dist.pmf()[1] > 0.0);
}

void check_solver_inputs(const OffspringDistribution& dist, mpfr_prec_t bits) {
    dist.require_critical();
    if (bits < 16) throw BadParam("precision must be at least 16 bits");
}

}  // namespace

std::string TailTable::statistic_label() const {
    switch (statistic) {
        case TailStatistic::hs: return "hs";
        case TailStatistic::rigid: return "rigid";
        case TailStatistic::kary: return "kary:" + std::to_string(kary_k);
    }
    return "?";
}

TailTable hs_tail_table(const OffspringDistribution& dist, std::size_t x_max,
                        mpfr_prec_t bits) {
    check_solver_inputs(dist, bits);
    PgfPoly f(dist.exact_pmf(bits, /*remove_single_child=*/true), bits);

    TailTable t;
    t.statistic = TailStatistic::hs;
    t.dist_id = dist.name();
    t.precision_bits = bits;
    t.transform_applied = transform_flag(dist);
    t.truncation_mass = dist.truncation_mass();

    const BigFloat one(1.0, bits);
    BigFloat q = f.coeff(0);       // q_0 = p_0 of the transformed law
    BigFloat F_prev2(0.0, bits);   // F_{x-2}
    BigFloat F_prev = q;           // F_{x-1}
    BigFloat u = one - q;          // survival s_{x+1} = 1 - F_x
    t.q.push_back(q);
    t.s.push_back(one);
    t.s.push_back(u);
    for (std::size_t x = 1; x <= x_max; ++x) {
        const BigFloat den = f.one_minus_deriv(F_prev, u);
        if (den.sign() <= 0) {
            throw PrecisionExhausted("1 - f'(F) vanished at x = " + std::to_string(x) +
                                     " with " + std::to_string(bits) + " bits");
        }
        const BigFloat qx = q * q * f.curvature2(F_prev, F_prev2) / den;
        if (qx.sign() <= 0 || qx >= u) {
            throw PrecisionExhausted("pmf recursion lost positivity at x = " +
                                     std::to_string(x));
        }
        F_prev2 = F_prev;
        F_prev += qx;
        u -= qx;
        if (u.sign() <= 0) {
            throw PrecisionExhausted("survival underflowed at x = " + std::to_string(x));
        }
        q = qx;
        t.q.push_back(q);
        t.s.push_back(u);
    }
    return t;
}

TailTable rigid_tail_table(const OffspringDistribution& dist, std::size_t x_max,
                           mpfr_prec_t bits) {
    check_solver_inputs(dist, bits);
    PgfPoly f(dist.exact_pmf(bits, /*remove_single_child=*/true), bits);

    TailTable t;
    t.statistic = TailStatistic::rigid;
    t.dist_id = dist.name();
    t.precision_bits = bits;
    t.transform_applied = transform_flag(dist);
    t.truncation_mass = dist.truncation_mass();

    const BigFloat one(1.0, bits);
    BigFloat q = f.coeff(0);  // q_0 = p_0 after the transform
    BigFloat F = q;
    BigFloat u = one - q;
    t.q.push_back(q);
    t.s.push_back(one);
    t.s.push_back(u);
    for (std::size_t x = 1; x <= x_max; ++x) {
        const BigFloat q_prev = q;
        // g(v) = [f(q_prev) - f(v)] - [v - (f(F + v) - f(F))], decreasing on [0, u]
        auto g = [&](const BigFloat& v) {
            return f.diff(q_prev, v, q_prev - v) - f.identity_minus_diff(F, v, u);
        };
        const BigFloat qx = bisect_decreasing(g, BigFloat(0.0, bits), u, bits, "rigid");
        if (qx.sign() < 0) throw PrecisionExhausted("rigid pmf went negative");
        F += qx;
        u -= qx;
        if (u.sign() <= 0) {
            throw PrecisionExhausted("rigid survival underflowed at x = " + std::to_string(x) +
                                     " with " + std::to_string(bits) + " bits");
        }
        q = qx;
        t.q.push_back(q);
        t.s.push_back(u);
    }
    return t;
}

namespace detail {

TailTable kary_tail_table_any_k(const OffspringDistribution& dist, unsigned k,
                                std::size_t x_max, mpfr_prec_t bits) {
    check_solver_inputs(dist, bits);
    PgfPoly f(dist.exact_pmf(bits, /*remove_single_child=*/false), bits);

    TailTable t;
    t.statistic = TailStatistic::kary;
    t.kary_k = k;
    t.dist_id = dist.name();
    t.precision_bits = bits;
    t.transform_applied = false;
    t.truncation_mass = dist.truncation_mass();

    const BigFloat one(1.0, bits);
    const std::size_t L = f.size();

    if (L <= k) {
        // max degree < k: the statistic is identically zero
        t.q.push_back(one);
        t.s.push_back(one);
        t.s.push_back(BigFloat(0.0, bits));
        for (std::size_t x = 1; x <= x_max; ++x) {
            t.q.push_back(BigFloat(0.0, bits));
            t.s.push_back(BigFloat(0.0, bits));
        }
        return t;
    }

    // F_0: fixed point of phi(z) = sum_{l<k} p_l z^l; phi - id decreasing in
    // the bracketing sense (phi(0) > 0, phi(1) < 1).
    auto phi_minus_id = [&](const BigFloat& z) {
        BigFloat r(0.0, bits);
        for (std::size_t i = std::min<std::size_t>(k, L); i-- > 0;) r = r * z + f.coeff(i);
        return r - z;
    };
    BigFloat F = bisect_decreasing(phi_minus_id, BigFloat(0.0, bits), one, bits, "kary base");
    BigFloat u = one - F;
    t.q.push_back(F);
    t.s.push_back(one);
    t.s.push_back(u);

    // binomial coefficients C(l, j) for j <= k-1
    std::vector<std::vector<BigFloat>> binom(L);
    for (std::size_t l = 0; l < L; ++l) {
        binom[l].assign(std::min<std::size_t>(l, k - 1) + 1, BigFloat(0.0, bits));
        long double c = 1.0L;
        for (std::size_t j = 0; j < binom[l].size(); ++j) {
            binom[l][j] = BigFloat(static_cast<double>(c), bits);
            c = c * static_cast<long double>(l - j) / static_cast<long double>(j + 1);
        }
    }

    for (std::size_t x = 1; x <= x_max; ++x) {
        // g(v) = [f(F) - F] - v [1 - f'(F)] + sum_l p_l sum_{2<=j<=min(l,k-1)}
        //        C(l,j) v^j F^(l-j); decreasing in v on [0, u]
        const BigFloat head = f.pgf_minus_identity(F, u);
        const BigFloat slope = f.one_minus_deriv(F, u);
        std::vector<BigFloat> F_pow{BigFloat(1.0, bits)};
        for (std::size_t i = 1; i < L; ++i) F_pow.push_back(F_pow.back() * F);
        auto g = [&](const BigFloat& v) {
            BigFloat tail(0.0, bits);
            BigFloat v_pow = v * v;
            for (std::size_t j = 2; j < k; ++j) {
                BigFloat cj(0.0, bits);
                for (std::size_t l = j; l < L; ++l) {
                    if (j < binom[l].size()) cj += f.coeff(l) * binom[l][j] * F_pow[l - j];
                }
                tail += cj * v_pow;
                v_pow *= v;
            }
            return head - v * slope + tail;
        };
        const BigFloat qx = bisect_decreasing(g, BigFloat(0.0, bits), u, bits, "kary step");
        F += qx;
        u -= qx;
        if (u.sign() < 0) {
            throw PrecisionExhausted("kary survival underflowed at x = " + std::to_string(x));
        }
        t.q.push_back(qx);
        t.s.push_back(u);
    }
    return t;
}

}  // namespace detail

TailTable kary_tail_table(const OffspringDistribution& dist, unsigned k, std::size_t x_max,
                          mpfr_prec_t bits) {
    if (k < 3) throw BadK("kary tables need k >= 3; use the hs table for k = 2");
    return detail::kary_tail_table_any_k(dist, k, x_max, bits);
}

void write_tail_csv(const TailTable& table, std::ostream& os) {
    const std::size_t digits = decimal_digits_for_bits(table.precision_bits);
    os << "x,q,survival\n";
    for (std::size_t x = 0; x < table.q.size(); ++x) {
        os << x << "," << table.q[x].to_decimal(digits) << "," << table.s[x].to_decimal(digits)
           << "\n";
    }
}

std::string tail_metadata_json(const TailTable& table) {
    nlohmann::json j;
    j["dist"] = table.dist_id;
    j["statistic"] = table.statistic_label();
    j["x_max"] = table.x_max();
    j["precision_bits"] = static_cast<long>(table.precision_bits);
    j["transform_applied"] = table.transform_applied;
    j["truncation_mass"] = table.truncation_mass;
    return j.dump(2) + "\n";
}

ConditionalPmf conditional_bruteforce(const OffspringDistribution& dist, std::size_t n,
                                      const StatSpec& stat) {
    ConditionalPmf out;
    out.size_probability = 0.0;
    out.tree_count = 0;
    enumerate_trees(dist, n, [&](const WeightedTree& wt) {
        // recompute the weight as a plain product; n <= 16 keeps it in range
        // and avoids the ulp noise of exp(log_weight)
        double w = 1.0;
        for (const auto d : wt.tree.degrees) w *= dist.pmf()[d];
        out.pmf[evaluate_statistic(wt.tree, stat)] += w;
        out.size_probability += w;
        ++out.tree_count;
    });
    if (out.tree_count == 0) {
        throw InfeasibleSize("no trees of size " + std::to_string(n) +
                             " under this offspring law");
    }
    for (auto& [v, p] : out.pmf) p /= out.size_probability;
    return out;
}

RigidConstants rigid_constants(const OffspringDistribution& dist) {
    dist.require_critical();
    const auto d = dist.branching_degree();
    if (!d) throw NoBranching("offspring support does not reach past one child");
    RigidConstants rc;
    rc.d = *d;
    if (*d == 2) {
        // invariant under the single-child transform: sigma^2 and p_2 scale alike
        rc.gamma = 1.0 + std::sqrt(dist.variance() / (2.0 * dist.pmf()[2]));
    }
    return rc;
}

}  // namespace strahler
