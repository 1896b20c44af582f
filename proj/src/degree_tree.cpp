#include "strahler/degree_tree.hpp"

#include <cassert>
#include <cmath>

#include "strahler/errors.hpp"
#include "strahler/offspring.hpp"

namespace strahler {

std::optional<std::size_t> tree_size_prefix(std::span<const std::uint32_t> seq) {
    std::int64_t walk = 1;  // pending nodes
    for (std::size_t t = 0; t < seq.size(); ++t) {
        walk += static_cast<std::int64_t>(seq[t]) - 1;
        if (walk == 0) return t + 1;
    }
    return std::nullopt;
}

DegreeTree from_degree_sequence(std::vector<std::uint32_t> seq) {
    if (seq.empty()) throw TreeUnfinished("empty degree sequence");
    const auto t = tree_size_prefix(seq);
    if (!t) throw TreeUnfinished("sequence ends before the tree completes");
    if (*t < seq.size()) {
        throw TreeCompletesEarly("tree completes at position " + std::to_string(*t) +
                                 " of " + std::to_string(seq.size()));
    }
    return DegreeTree{std::move(seq)};
}

std::size_t rotate_to_valid(std::span<const std::uint32_t> seq) {
    const std::size_t n = seq.size();
    std::int64_t sum = 0;
    for (const auto d : seq) sum += d;
    if (sum != static_cast<std::int64_t>(n) - 1) {
        throw SumMismatch("degree sum " + std::to_string(sum) + " != n - 1");
    }
    // The valid rotation starts right after the first minimum of the walk.
    std::int64_t walk = 0;
    std::int64_t min_walk = 0;
    std::size_t min_pos = 0;  // 0 means "before the first element"
    for (std::size_t t = 0; t < n; ++t) {
        walk += static_cast<std::int64_t>(seq[t]) - 1;
        if (walk < min_walk) {
            min_walk = walk;
            min_pos = t + 1;
        }
    }
    return min_pos == n ? 1 : min_pos + 1;
}

DegreeTree rotated_tree(std::span<const std::uint32_t> seq) {
    const std::size_t i = rotate_to_valid(seq);
    std::vector<std::uint32_t> out;
    out.reserve(seq.size());
    out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(i - 1), seq.end());
    out.insert(out.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(i - 1));
    assert(tree_size_prefix(out) == out.size());
    return DegreeTree{std::move(out)};
}

std::size_t height(const DegreeTree& tree) {
    // Stack of remaining-children counts; its depth is the current depth.
    std::vector<std::uint32_t> remaining;
    std::size_t best = 0;
    for (const auto d : tree.degrees) {
        if (remaining.size() > best) best = remaining.size();
        if (d > 0) {
            remaining.push_back(d);
        } else {
            while (!remaining.empty() && --remaining.back() == 0) remaining.pop_back();
        }
    }
    return best;
}

namespace {

struct Enumerator {
    const std::vector<double>& pmf;
    std::vector<std::uint32_t> support;
    std::vector<double> log_p;
    std::size_t n;
    const std::function<void(const WeightedTree&)>& yield;
    std::vector<std::uint32_t> seq;

    void rec(std::int64_t pending, double log_weight) {
        const std::size_t t = seq.size();
        if (t == n) {
            if (pending == 0) yield(WeightedTree{DegreeTree{seq}, log_weight});
            return;
        }
        // Each of the `pending` open slots consumes one future position.
        if (pending == 0 || pending > static_cast<std::int64_t>(n - t)) return;
        for (std::size_t j = 0; j < support.size(); ++j) {
            const std::uint32_t d = support[j];
            const std::int64_t next_pending = pending + d - 1;
            if (next_pending > static_cast<std::int64_t>(n - t - 1)) break;  // support ascending
            seq.push_back(d);
            rec(next_pending, log_weight + log_p[j]);
            seq.pop_back();
        }
    }
};

}  // namespace

void enumerate_trees(const OffspringDistribution& dist, std::size_t n,
                     const std::function<void(const WeightedTree&)>& yield) {
    if (n > kEnumerationLimit) {
        throw TooLarge("enumeration limited to n <= " + std::to_string(kEnumerationLimit));
    }
    if (n == 0) return;
    Enumerator e{dist.pmf(), {}, {}, n, yield, {}};
    for (std::size_t i = 0; i < dist.pmf().size(); ++i) {
        if (dist.pmf()[i] > 0) {
            e.support.push_back(static_cast<std::uint32_t>(i));
            e.log_p.push_back(std::log(dist.pmf()[i]));
        }
    }
    e.seq.reserve(n);
    e.rec(1, 0.0);
}

}  // namespace strahler
