#include "strahler/statistics.hpp"

#include <algorithm>
#include <cassert>

#include "strahler/errors.hpp"

namespace strahler {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::hs: return "hs";
        case Variant::french: return "french";
        case Variant::canadian: return "canadian";
        case Variant::rigid: return "rigid";
    }
    return "?";
}

namespace {

// Generic post-order streaming pass. Acc needs: void add(uint32_t child),
// uint32_t finalize(uint32_t degree) const. `proto` seeds each node's
// accumulator (carries per-pass parameters such as k).
template <typename Acc>
std::uint32_t stream_postorder(std::span<const std::uint32_t> degrees,
                               std::vector<std::uint32_t>* per_node, const Acc& proto) {
    struct Frame {
        std::uint32_t left;
        std::size_t node;
        Acc acc;
    };
    if (per_node) per_node->assign(degrees.size(), 0);
    std::vector<Frame> stack;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        std::uint32_t left = degrees[i];
        std::size_t node = i;
        Acc acc = proto;
        while (left == 0) {
            const std::uint32_t v = acc.finalize(degrees[node]);
            if (per_node) (*per_node)[node] = v;
            if (stack.empty()) {
                if (i + 1 != degrees.size()) throw TreeCompletesEarly("trailing degrees");
                return v;
            }
            Frame f = std::move(stack.back());
            stack.pop_back();
            f.acc.add(v);
            left = f.left - 1;
            node = f.node;
            acc = std::move(f.acc);
        }
        stack.push_back(Frame{left, node, std::move(acc)});
    }
    throw TreeUnfinished("degree sequence is not a complete tree");
}

struct HsAcc {
    std::uint32_t top1 = 0, top2 = 0;
    bool any = false, two = false;
    void add(std::uint32_t v) {
        if (!any) {
            any = true;
            top1 = v;
        } else {
            two = true;
            if (v > top1) {
                top2 = top1;
                top1 = v;
            } else if (v > top2) {
                top2 = v;
            }
        }
    }
    std::uint32_t finalize(std::uint32_t deg) const {
        if (deg == 0) return 0;
        if (!two) return top1;
        return top1 + (top2 == top1 ? 1 : 0);
    }
};

struct CanadianAcc {
    std::uint32_t maxv = 0, count = 0;
    void add(std::uint32_t v) {
        if (count == 0 || v > maxv) {
            maxv = v;
            count = 1;
        } else if (v == maxv) {
            ++count;
        }
    }
    std::uint32_t finalize(std::uint32_t deg) const {
        return deg == 0 ? 0 : maxv + (count - 1);
    }
};

struct RigidAcc {
    std::uint32_t maxv = 0, minv = 0;
    bool any = false;
    void add(std::uint32_t v) {
        if (!any) {
            any = true;
            maxv = minv = v;
        } else {
            maxv = std::max(maxv, v);
            minv = std::min(minv, v);
        }
    }
    std::uint32_t finalize(std::uint32_t deg) const {
        if (deg == 0) return 0;
        if (deg == 1) return maxv;
        return maxv + (maxv == minv ? 1 : 0);
    }
};

struct FrenchAcc {
    std::map<std::uint32_t, std::uint32_t> counts;
    void add(std::uint32_t v) { ++counts[v]; }
    std::uint32_t finalize(std::uint32_t deg) const {
        if (deg == 0) return 0;
        // max over distinct v of v + #{children with value >= v} - 1
        std::uint32_t best = 0;
        std::uint32_t at_least = 0;
        for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
            at_least += it->second;
            best = std::max(best, it->first + at_least - 1);
        }
        return best;
    }
};

struct KaryAcc {
    unsigned k = 2;
    std::uint32_t n_children = 0;
    std::vector<std::uint32_t> top;  // k largest child values, descending
    void add(std::uint32_t v) {
        ++n_children;
        auto it = std::upper_bound(top.begin(), top.end(), v, std::greater<>());
        if (top.size() < k) {
            top.insert(it, v);
        } else if (it != top.end()) {
            top.insert(it, v);
            top.pop_back();
        }
    }
    std::uint32_t finalize(std::uint32_t deg) const {
        if (deg == 0) return 0;
        const std::uint32_t k1 = top.front();
        if (n_children < k) return k1;
        return std::max(k1, top.back() + 1);
    }
};

}  // namespace

std::uint32_t strahler_number(const DegreeTree& tree, Variant variant,
                              std::vector<std::uint32_t>* per_node) {
    switch (variant) {
        case Variant::hs: return stream_postorder(tree.degrees, per_node, HsAcc{});
        case Variant::french: return stream_postorder(tree.degrees, per_node, FrenchAcc{});
        case Variant::canadian: return stream_postorder(tree.degrees, per_node, CanadianAcc{});
        case Variant::rigid: return stream_postorder(tree.degrees, per_node, RigidAcc{});
    }
    throw Error("bad variant");
}

std::uint32_t k_register(const DegreeTree& tree, unsigned k,
                         std::vector<std::uint32_t>* per_node) {
    if (k < 2) throw BadParam("k-ary register function requires k >= 2");
    KaryAcc proto;
    proto.k = k;
    return stream_postorder(tree.degrees, per_node, proto);
}

std::uint32_t rotational_max(std::span<const std::uint32_t> seq) {
    const std::size_t n = seq.size();
    if (n > kRotationalMaxLimit) {
        throw TooLarge("rotational_max capped at n = " + std::to_string(kRotationalMaxLimit));
    }
    std::int64_t sum = 0;
    for (const auto d : seq) sum += d;
    if (sum != static_cast<std::int64_t>(n) - 1) {
        throw SumMismatch("degree sum != n - 1");
    }
    std::vector<std::uint32_t> window;
    window.reserve(n);
    std::uint32_t best = 0;
    for (std::size_t start = 0; start < n; ++start) {
        // first complete tree of the rotation starting at `start`
        window.clear();
        std::int64_t pending = 1;
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint32_t d = seq[(start + j) % n];
            window.push_back(d);
            pending += static_cast<std::int64_t>(d) - 1;
            if (pending == 0) break;
        }
        if (pending != 0) continue;  // unfinished: eta = 0
        best = std::max(best, strahler_number(DegreeTree{window}, Variant::hs));
    }
    return best;
}

StrahlerValues compute_statistics(const DegreeTree& tree, std::span<const unsigned> kary_orders) {
    StrahlerValues out;
    out.hs = strahler_number(tree, Variant::hs);
    out.french = strahler_number(tree, Variant::french);
    out.canadian = strahler_number(tree, Variant::canadian);
    out.rigid = strahler_number(tree, Variant::rigid);
    for (const unsigned k : kary_orders) out.kary[k] = k_register(tree, k);
    return out;
}

StatSpec StatSpec::parse(const std::string& text) {
    StatSpec s;
    if (text == "hs") {
        s.kind = Kind::hs;
    } else if (text == "french") {
        s.kind = Kind::french;
    } else if (text == "canadian") {
        s.kind = Kind::canadian;
    } else if (text == "rigid") {
        s.kind = Kind::rigid;
    } else if (text == "hsstar") {
        s.kind = Kind::hsstar;
    } else if (text.rfind("kary:", 0) == 0) {
        s.kind = Kind::kary;
        std::size_t pos = 0;
        int k = 0;
        try {
            k = std::stoi(text.substr(5), &pos);
        } catch (const std::exception&) {
            throw BadParam("bad statistic: " + text);
        }
        if (pos != text.size() - 5 || k < 2) throw BadParam("bad statistic: " + text);
        s.k = static_cast<unsigned>(k);
    } else {
        throw BadParam("unknown statistic: " + text);
    }
    return s;
}

std::string StatSpec::to_string() const {
    switch (kind) {
        case Kind::hs: return "hs";
        case Kind::french: return "french";
        case Kind::canadian: return "canadian";
        case Kind::rigid: return "rigid";
        case Kind::hsstar: return "hsstar";
        case Kind::kary: return "kary:" + std::to_string(k);
    }
    return "?";
}

std::uint32_t evaluate_statistic(const DegreeTree& tree, const StatSpec& stat) {
    switch (stat.kind) {
        case StatSpec::Kind::hs: return strahler_number(tree, Variant::hs);
        case StatSpec::Kind::french: return strahler_number(tree, Variant::french);
        case StatSpec::Kind::canadian: return strahler_number(tree, Variant::canadian);
        case StatSpec::Kind::rigid: return strahler_number(tree, Variant::rigid);
        case StatSpec::Kind::kary: return k_register(tree, stat.k);
        case StatSpec::Kind::hsstar: return rotational_max(tree.degrees);
    }
    throw Error("bad statistic");
}

}  // namespace strahler
