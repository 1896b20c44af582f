#include "strahler/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "strahler/errors.hpp"

namespace strahler {

namespace {

constexpr double kCriticalTol = 1e-10;
constexpr double kTailCut = 1e-15;

unsigned gcd_of_support(const std::vector<double>& pmf) {
    unsigned g = 0;
    for (std::size_t i = 1; i < pmf.size(); ++i) {
        if (pmf[i] > 0) g = std::gcd(g, static_cast<unsigned>(i));
    }
    return g == 0 ? 1u : g;
}

}  // namespace

namespace detail {

AliasTable::AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] / total * static_cast<double>(n);

    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        const std::uint32_t l = large.back();
        small.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (const std::uint32_t i : large) prob_[i] = 1.0;
    for (const std::uint32_t i : small) prob_[i] = 1.0;  // numerical leftovers
}

}  // namespace detail

void OffspringDistribution::finalize() {
    pmf_ = base_pmf_;
    if (pmf_.empty()) throw NotAProbability("empty pmf");
    double total = 0;
    for (const double p : pmf_) {
        if (p < 0 || !std::isfinite(p)) throw NotAProbability("pmf entries must be finite and >= 0");
        total += p;
    }
    if (total <= 0) throw NotAProbability("pmf has zero total mass");
    for (double& p : pmf_) p /= total;
    while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();

    if (single_child_removed_ && pmf_.size() > 1 && pmf_[1] > 0.0) {
        const double p1 = pmf_[1];
        if (p1 >= 1.0) throw DegenerateVariance("p_1 = 1 cannot be transformed");
        for (double& p : pmf_) p /= 1.0 - p1;
        pmf_[1] = 0.0;
    }

    mean_ = 0;
    double m2 = 0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        mean_ += static_cast<double>(i) * pmf_[i];
        m2 += static_cast<double>(i) * static_cast<double>(i) * pmf_[i];
    }
    variance_ = m2 - mean_ * mean_;
    critical_ = std::fabs(mean_ - 1.0) <= kCriticalTol;
    if (critical_ && variance_ <= 0) {
        throw DegenerateVariance("p_1 = 1: every node has exactly one child");
    }
    period_ = gcd_of_support(pmf_);
    d_.reset();
    for (std::size_t i = 2; i < pmf_.size(); ++i) {
        if (pmf_[i] > 0) {
            d_ = static_cast<unsigned>(i);
            break;
        }
    }
    alias_ = detail::AliasTable(pmf_);
}

OffspringDistribution OffspringDistribution::from_pmf(std::vector<double> pmf) {
    OffspringDistribution d;
    d.base_pmf_ = std::move(pmf);
    d.kind_ = BuiltinKind::finite;
    d.finalize();
    return d;
}

OffspringDistribution OffspringDistribution::binomial(int k) {
    if (k < 2) throw BadParam("binomial(k) requires k >= 2");
    OffspringDistribution d;
    d.kind_ = BuiltinKind::binomial_k;
    d.binomial_k_ = k;
    // Binomial(k, 1/k): critical with variance 1 - 1/k.
    std::vector<double> pmf(static_cast<std::size_t>(k) + 1);
    double c = std::pow(1.0 - 1.0 / k, k);  // p_0
    for (int i = 0; i <= k; ++i) {
        pmf[static_cast<std::size_t>(i)] = c;
        c *= static_cast<double>(k - i) / static_cast<double>(i + 1) / (k - 1.0);
    }
    d.base_pmf_ = std::move(pmf);
    d.finalize();
    return d;
}

OffspringDistribution OffspringDistribution::builtin(const std::string& name) {
    if (name == "catalan") {
        OffspringDistribution d;
        d.base_pmf_ = {0.25, 0.5, 0.25};
        d.kind_ = BuiltinKind::catalan;
        d.finalize();
        return d;
    }
    if (name == "full-binary") {
        OffspringDistribution d;
        d.base_pmf_ = {0.5, 0.0, 0.5};
        d.kind_ = BuiltinKind::full_binary;
        d.finalize();
        return d;
    }
    if (name == "geometric-half") {
        OffspringDistribution d;
        d.kind_ = BuiltinKind::geometric_half;
        std::vector<double> pmf;
        double tail = 1.0;  // mass strictly after the current prefix
        for (std::size_t i = 0;; ++i) {
            pmf.push_back(std::ldexp(1.0, -static_cast<int>(i) - 1));
            tail *= 0.5;
            if (tail < kTailCut) break;
        }
        d.truncation_mass_ = tail;
        d.base_pmf_ = std::move(pmf);
        d.finalize();
        return d;
    }
    if (name == "poisson1") {
        OffspringDistribution d;
        d.kind_ = BuiltinKind::poisson1;
        std::vector<double> pmf;
        double p = std::exp(-1.0);
        double cum = 0.0;
        for (std::size_t i = 0;; ++i) {
            pmf.push_back(p);
            cum += p;
            if (1.0 - cum < kTailCut) break;
            p /= static_cast<double>(i + 1);
        }
        d.truncation_mass_ = std::max(0.0, 1.0 - cum);
        d.base_pmf_ = std::move(pmf);
        d.finalize();
        return d;
    }
    if (name.rfind("binomial(", 0) == 0 && name.back() == ')') {
        const std::string arg = name.substr(9, name.size() - 10);
        std::size_t pos = 0;
        int k = 0;
        try {
            k = std::stoi(arg, &pos);
        } catch (const std::exception&) {
            throw UnknownName("bad binomial parameter: " + name);
        }
        if (pos != arg.size()) throw UnknownName("bad binomial parameter: " + name);
        return binomial(k);
    }
    throw UnknownName("unknown offspring distribution: " + name);
}

std::string OffspringDistribution::name() const {
    std::string base;
    switch (kind_) {
        case BuiltinKind::catalan: base = "catalan"; break;
        case BuiltinKind::full_binary: base = "full-binary"; break;
        case BuiltinKind::geometric_half: base = "geometric-half"; break;
        case BuiltinKind::poisson1: base = "poisson1"; break;
        case BuiltinKind::binomial_k: base = "binomial(" + std::to_string(binomial_k_) + ")"; break;
        case BuiltinKind::finite: {
            std::ostringstream os;
            os << "pmf:";
            for (std::size_t i = 0; i < base_pmf_.size(); ++i) {
                if (i) os << ",";
                os << base_pmf_[i];
            }
            base = os.str();
            break;
        }
    }
    if (single_child_removed_) base += "+remove-single-child";
    return base;
}

void OffspringDistribution::require_critical() const {
    if (!critical_) {
        throw NotCritical("offspring mean is " + std::to_string(mean_) + ", need 1");
    }
}

OffspringDistribution OffspringDistribution::remove_single_child() const {
    OffspringDistribution d(*this);
    d.single_child_removed_ = true;
    d.finalize();
    return d;
}

double OffspringDistribution::pgf(double s, int order) const {
    double r = 0;
    switch (order) {
        case 0:
            for (std::size_t i = pmf_.size(); i-- > 0;) r = r * s + pmf_[i];
            return r;
        case 1:
            for (std::size_t i = pmf_.size(); i-- > 1;) r = r * s + static_cast<double>(i) * pmf_[i];
            return r;
        case 2:
            for (std::size_t i = pmf_.size(); i-- > 2;) {
                r = r * s + static_cast<double>(i) * static_cast<double>(i - 1) * pmf_[i];
            }
            return r;
        default:
            throw BadParam("pgf order must be 0, 1 or 2");
    }
}

double OffspringDistribution::factorial_moment(unsigned r) const {
    if (r < 1) throw BadParam("factorial moment order must be >= 1");
    double total = 0;
    for (std::size_t i = r; i < pmf_.size(); ++i) {
        double term = pmf_[i];
        for (unsigned j = 0; j < r; ++j) term *= static_cast<double>(i - j);
        total += term;
    }
    return total;
}

std::vector<BigFloat> OffspringDistribution::exact_pmf(mpfr_prec_t prec,
                                                       bool remove_single_child) const {
    std::vector<BigFloat> p;
    p.reserve(base_pmf_.size());
    switch (kind_) {
        case BuiltinKind::finite:
        case BuiltinKind::catalan:
        case BuiltinKind::full_binary:
            // The stored doubles are the law; inject them exactly.
            for (const double v : base_pmf_) p.emplace_back(v, prec);
            break;
        case BuiltinKind::geometric_half:
            for (std::size_t i = 0; i < base_pmf_.size(); ++i) {
                p.push_back(BigFloat::pow2(-static_cast<long>(i) - 1, prec));
            }
            break;
        case BuiltinKind::poisson1: {
            BigFloat term = exp(BigFloat(-1.0, prec));  // e^-1
            for (std::size_t i = 0; i < base_pmf_.size(); ++i) {
                p.push_back(term);
                term = term / static_cast<long>(i + 1);
            }
            break;
        }
        case BuiltinKind::binomial_k: {
            const long k = binomial_k_;
            BigFloat coeff = pow_ui(BigFloat(k - 1, prec) / BigFloat(k, prec),
                                    static_cast<unsigned long>(k));  // p_0
            for (long i = 0; i <= k; ++i) {
                p.push_back(coeff);
                if (i < k) coeff = coeff * (k - i) / (i + 1) / (k - 1);
            }
            break;
        }
    }
    BigFloat total(0.0, prec);
    for (const auto& v : p) total += v;
    for (auto& v : p) v /= total;

    if ((remove_single_child || single_child_removed_) && p.size() > 1 && p[1].sign() > 0) {
        const BigFloat c = BigFloat(1.0, prec) - p[1];
        for (auto& v : p) v /= c;
        p[1] = BigFloat(0.0, prec);
    }
    while (p.size() > 1 && p.back().is_zero()) p.pop_back();
    return p;
}

OffspringDistribution dist_from_spec_string(const std::string& spec) {
    if (spec.rfind("pmf:", 0) == 0) {
        std::vector<double> pmf;
        std::istringstream is(spec.substr(4));
        std::string item;
        while (std::getline(is, item, ',')) {
            std::size_t pos = 0;
            double v = 0;
            try {
                v = std::stod(item, &pos);
            } catch (const std::exception&) {
                throw NotAProbability("bad pmf entry: " + item);
            }
            if (pos != item.size()) throw NotAProbability("bad pmf entry: " + item);
            pmf.push_back(v);
        }
        return OffspringDistribution::from_pmf(std::move(pmf));
    }
    return OffspringDistribution::builtin(spec);
}

SizeBiasedDistribution::SizeBiasedDistribution(const OffspringDistribution& source)
    : source_(source) {
    source_.require_critical();
    pmf_.assign(source_.pmf().size(), 0.0);
    for (std::size_t i = 1; i < pmf_.size(); ++i) {
        pmf_[i] = static_cast<double>(i) * source_.pmf()[i];
    }
    alias_ = detail::AliasTable(pmf_);
}

}  // namespace strahler
