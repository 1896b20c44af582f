#include "strahler/sampler.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "strahler/errors.hpp"

namespace strahler {

namespace {

void validate_budget(const SampleBudget& b) {
    if (b.max_nodes == 0) throw BadParam("budget.max_nodes must be positive");
}

std::uint64_t rejection_cap(const SampleBudget& b, std::size_t n) {
    if (b.max_rejections > 0) return b.max_rejections;
    return static_cast<std::uint64_t>(10'000.0 * std::sqrt(static_cast<double>(n))) + 1;
}

// Appends one unconditional tree in preorder; throws on budget overrun.
void append_unconditional(const OffspringDistribution& dist, Rng& rng,
                          std::vector<std::uint32_t>& out, std::uint64_t max_nodes) {
    std::int64_t pending = 1;
    while (pending > 0) {
        if (out.size() >= max_nodes) {
            throw BudgetExceeded("tree exceeded node budget of " + std::to_string(max_nodes));
        }
        const std::uint32_t d = dist.sample_degree(rng);
        out.push_back(d);
        pending += static_cast<std::int64_t>(d) - 1;
    }
}

}  // namespace

DegreeTree sample_unconditional(const OffspringDistribution& dist, Rng& rng,
                                const SampleBudget& budget) {
    dist.require_critical();
    validate_budget(budget);
    std::vector<std::uint32_t> degrees;
    append_unconditional(dist, rng, degrees, budget.max_nodes);
    return DegreeTree{std::move(degrees)};
}

bool conditional_size_feasible(const OffspringDistribution& dist, std::size_t n) {
    if (n == 0) return false;
    if (n == 1) return dist.pmf()[0] > 0;
    return (n - 1) % dist.period() == 0;
}

ConditionalSample sample_conditional_counted(const OffspringDistribution& dist, std::size_t n,
                                             Rng& rng, const SampleBudget& budget) {
    dist.require_critical();
    validate_budget(budget);
    if (!conditional_size_feasible(dist, n)) {
        throw InfeasibleSize("no trees of size " + std::to_string(n) + " exist (period " +
                             std::to_string(dist.period()) + ")");
    }
    const std::uint64_t cap = rejection_cap(budget, n);
    std::vector<std::uint32_t> draw(n);
    for (std::uint64_t attempt = 1; attempt <= cap; ++attempt) {
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            draw[i] = dist.sample_degree(rng);
            sum += draw[i];
        }
        if (sum == static_cast<std::int64_t>(n) - 1) {
            return ConditionalSample{rotated_tree(draw), attempt};
        }
    }
    throw BudgetExceeded("rejection cap of " + std::to_string(cap) + " attempts hit at n = " +
                         std::to_string(n));
}

DegreeTree sample_conditional(const OffspringDistribution& dist, std::size_t n, Rng& rng,
                              const SampleBudget& budget) {
    return sample_conditional_counted(dist, n, rng, budget).tree;
}

KestenTruncatedTree sample_kesten_truncated(const OffspringDistribution& dist, std::size_t ell,
                                            Rng& rng, const SampleBudget& budget) {
    dist.require_critical();
    validate_budget(budget);
    const SizeBiasedDistribution biased(dist);

    std::vector<std::uint32_t> zeta(ell + 1);
    for (auto& z : zeta) z = biased.sample_degree(rng);
    std::vector<std::uint32_t> spine_child(ell);
    for (std::size_t i = 0; i < ell; ++i) spine_child[i] = static_cast<std::uint32_t>(
        rng.next_below(zeta[i]));

    KestenTruncatedTree out;
    out.spine_degrees = zeta;
    out.hanging_count = 0;
    for (const auto z : zeta) out.hanging_count += z - 1;

    // Depth-first assembly; each frame is a spine node part-way through its
    // child list. Hanging trees are emitted inline in child order.
    struct SpineFrame {
        std::uint32_t degree;
        std::uint32_t spine_child;  // degree means "none" for the last level
        std::uint32_t next;
    };
    std::vector<std::uint32_t>& degrees = out.tree.degrees;
    std::vector<SpineFrame> stack;
    std::size_t level = 0;
    bool descend = true;
    while (descend || !stack.empty()) {
        if (descend) {
            descend = false;
            const bool last = level == ell;
            const std::uint32_t deg = last ? zeta[level] - 1 : zeta[level];
            out.spine_positions.push_back(degrees.size());
            if (degrees.size() >= budget.max_nodes) {
                throw BudgetExceeded("truncated limit tree exceeded node budget");
            }
            degrees.push_back(deg);
            stack.push_back(SpineFrame{deg, last ? deg : spine_child[level], 0});
            ++level;
        }
        SpineFrame& top = stack.back();
        if (top.next == top.degree) {
            stack.pop_back();
            continue;
        }
        const std::uint32_t j = top.next++;
        if (j == top.spine_child) {
            descend = true;  // continue the spine
        } else {
            append_unconditional(dist, rng, degrees, budget.max_nodes);
        }
    }
    assert(tree_size_prefix(out.tree.degrees) == out.tree.degrees.size());
    assert(out.spine_positions.size() == ell + 1);
    return out;
}

double kolchin_rate(const OffspringDistribution& dist, std::size_t n) {
    if (n == 0) throw BadParam("kolchin rate needs n >= 1");
    const unsigned h = dist.period();
    if ((n - 1) % h != 0) return 0.0;
    const double sigma = std::sqrt(dist.variance());
    return static_cast<double>(h) /
           (sigma * std::sqrt(2.0 * std::numbers::pi * static_cast<double>(n)));
}

}  // namespace strahler
