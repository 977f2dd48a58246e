#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ppr/errors.hpp"
#include "ppr/network.hpp"
#include "ppr/rational.hpp"

namespace ppr {

// Integer interval with +-infinity sentinels; the effective domain of a
// univariate cost.
struct Interval {
    static constexpr Int kMinusInf = std::numeric_limits<Int>::min() / 2;
    static constexpr Int kPlusInf = std::numeric_limits<Int>::max() / 2;

    Int lo = kMinusInf;
    Int hi = kPlusInf;

    static Interval all() { return {}; }
    static Interval between(Int lo, Int hi) { return {lo, hi}; }
    static Interval at_least(Int lo) { return {lo, kPlusInf}; }
    static Interval at_most(Int hi) { return {kMinusInf, hi}; }

    bool contains(Int x) const { return lo <= x && x <= hi; }
    bool empty() const { return lo > hi; }
    bool bounded_below() const { return lo != kMinusInf; }
    bool bounded_above() const { return hi != kPlusInf; }
    bool bounded() const { return bounded_below() && bounded_above(); }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

enum class CostKind { Affine, AbsoluteValue, Deviation, IndicatorInterval, PiecewiseLinear };

// A univariate discrete convex function phi: Z -> Q U {+inf} with an
// interval effective domain. All variants satisfy the discrete midpoint
// inequality phi(x-1) + phi(x+1) >= 2 phi(x); the factories reject
// parameters that would break it.
//
//   affine(s):            phi(x) = s * x
//   absolute_value(b):    phi(x) = b * |x|,            b >= 0
//   deviation(c, k):      phi(x) = c * |x - k|,        c >= 0
//   indicator(lo, hi):    phi(x) = 0 on [lo, hi], +inf outside
//   piecewise_linear(...) see below
class ConvexCost {
public:
    static ConvexCost affine(Rational slope, Interval dom = Interval::all()) {
        ConvexCost c(CostKind::Affine, dom);
        c.coeff_ = slope;
        c.check_domain();
        return c;
    }

    static ConvexCost absolute_value(Rational coeff, Interval dom = Interval::all()) {
        if (coeff.sign() < 0) fail("bad_cost", "absolute value coefficient must be nonnegative");
        ConvexCost c(CostKind::AbsoluteValue, dom);
        c.coeff_ = coeff;
        c.check_domain();
        return c;
    }

    static ConvexCost deviation(Rational coeff, Int target, Interval dom = Interval::all()) {
        if (coeff.sign() < 0) fail("bad_cost", "deviation coefficient must be nonnegative");
        ConvexCost c(CostKind::Deviation, dom);
        c.coeff_ = coeff;
        c.target_ = target;
        c.check_domain();
        return c;
    }

    static ConvexCost indicator(Int lo, Int hi) {
        ConvexCost c(CostKind::IndicatorInterval, Interval{lo, hi});
        c.check_domain();
        return c;
    }

    // Convex piecewise linear function. slopes[0] applies left of
    // breakpoints[0], slopes[i] between breakpoints[i-1] and breakpoints[i],
    // slopes.back() right of the last breakpoint; the value at
    // breakpoints[0] (or at 0 when there are no breakpoints) is
    // anchor_value. Slopes must be nondecreasing.
    static ConvexCost piecewise_linear(std::vector<Int> breakpoints, std::vector<Rational> slopes,
                                       Rational anchor_value, Interval dom = Interval::all()) {
        ConvexCost c =
            piecewise_linear_unchecked(std::move(breakpoints), std::move(slopes), anchor_value, dom);
        for (size_t i = 1; i < c.slopes_.size(); ++i) {
            if (c.slopes_[i] < c.slopes_[i - 1]) {
                fail("bad_cost", "piecewise linear slopes must be nondecreasing");
            }
        }
        return c;
    }

    // Skips the monotone-slope check; the result may be non-convex. Used to
    // exercise check_midpoint_convexity on bad inputs.
    static ConvexCost piecewise_linear_unchecked(std::vector<Int> breakpoints,
                                                 std::vector<Rational> slopes,
                                                 Rational anchor_value,
                                                 Interval dom = Interval::all()) {
        ConvexCost c(CostKind::PiecewiseLinear, dom);
        c.breakpoints_ = std::move(breakpoints);
        c.slopes_ = std::move(slopes);
        c.anchor_value_ = anchor_value;
        if (c.slopes_.size() != c.breakpoints_.size() + 1) {
            fail("bad_cost", "piecewise linear needs breakpoints.size() + 1 slopes");
        }
        for (size_t i = 1; i < c.breakpoints_.size(); ++i) {
            if (c.breakpoints_[i] <= c.breakpoints_[i - 1]) {
                fail("bad_cost", "piecewise linear breakpoints must be strictly increasing");
            }
        }
        c.check_domain();
        return c;
    }

    CostKind kind() const { return kind_; }
    const Interval& domain() const { return dom_; }
    const Rational& coefficient() const { return coeff_; }
    Int target() const { return target_; }
    const std::vector<Int>& breakpoints() const { return breakpoints_; }
    const std::vector<Rational>& slopes() const { return slopes_; }
    const Rational& anchor_value() const { return anchor_value_; }

    // phi(x); nullopt encodes +infinity.
    std::optional<Rational> eval(Int x) const {
        if (!dom_.contains(x)) return std::nullopt;
        switch (kind_) {
            case CostKind::Affine:
                return coeff_ * Rational(x);
            case CostKind::AbsoluteValue:
                return coeff_ * Rational(x < 0 ? -x : x);
            case CostKind::Deviation: {
                Int d = x - target_;
                return coeff_ * Rational(d < 0 ? -d : d);
            }
            case CostKind::IndicatorInterval:
                return Rational(0);
            case CostKind::PiecewiseLinear:
                return eval_piecewise(x);
        }
        return std::nullopt;
    }

    // Slope of phi as x -> -inf / +inf; used to detect objectives that are
    // unbounded below on infinite domains.
    Rational leftmost_slope() const {
        switch (kind_) {
            case CostKind::Affine: return coeff_;
            case CostKind::AbsoluteValue: return -coeff_;
            case CostKind::Deviation: return -coeff_;
            case CostKind::IndicatorInterval: return Rational(0);
            case CostKind::PiecewiseLinear: return slopes_.front();
        }
        return Rational(0);
    }
    Rational rightmost_slope() const {
        switch (kind_) {
            case CostKind::Affine: return coeff_;
            case CostKind::AbsoluteValue: return coeff_;
            case CostKind::Deviation: return coeff_;
            case CostKind::IndicatorInterval: return Rational(0);
            case CostKind::PiecewiseLinear: return slopes_.back();
        }
        return Rational(0);
    }

    bool unbounded_below() const {
        if (!dom_.bounded_below() && leftmost_slope().sign() > 0) return true;
        if (!dom_.bounded_above() && rightmost_slope().sign() < 0) return true;
        return false;
    }

    // Largest magnitude among the function's finite anchors (deviation
    // target, breakpoints, finite domain ends). Any minimizer lies within
    // this radius; used when capping infinite capacities.
    Int anchor_magnitude() const {
        Int m = 0;
        auto grow = [&m](Int x) { m = std::max(m, x < 0 ? -x : x); };
        switch (kind_) {
            case CostKind::Affine:
            case CostKind::AbsoluteValue:
                break;
            case CostKind::Deviation:
                if (coeff_.sign() > 0) grow(target_);
                break;
            case CostKind::IndicatorInterval:
                break;
            case CostKind::PiecewiseLinear:
                for (Int b : breakpoints_) grow(b);
                break;
        }
        if (dom_.bounded_below()) grow(dom_.lo);
        if (dom_.bounded_above()) grow(dom_.hi);
        return m;
    }

    friend bool operator==(const ConvexCost& a, const ConvexCost& b) {
        return a.kind_ == b.kind_ && a.dom_ == b.dom_ && a.coeff_ == b.coeff_ &&
               a.target_ == b.target_ && a.breakpoints_ == b.breakpoints_ &&
               a.slopes_ == b.slopes_ && a.anchor_value_ == b.anchor_value_;
    }

private:
    ConvexCost(CostKind kind, Interval dom) : kind_(kind), dom_(dom) {}

    void check_domain() const {
        if (dom_.empty()) fail("bad_cost", "cost has an empty effective domain");
    }

    Rational eval_piecewise(Int x) const {
        Int b0 = breakpoints_.empty() ? 0 : breakpoints_.front();
        Rational val = anchor_value_;
        if (x >= b0) {
            Int pos = b0;
            for (size_t i = 1; i < breakpoints_.size() && pos < x; ++i) {
                Int next = std::min(x, breakpoints_[i]);
                val += slopes_[i] * Rational(next - pos);
                pos = next;
            }
            if (pos < x) val += slopes_.back() * Rational(x - pos);
        } else {
            val += slopes_.front() * Rational(x - b0);
        }
        return val;
    }

    CostKind kind_;
    Interval dom_;
    Rational coeff_;
    Int target_ = 0;
    std::vector<Int> breakpoints_;
    std::vector<Rational> slopes_;
    Rational anchor_value_;
};

// Checks phi(x-1) + phi(x+1) >= 2 phi(x) for every x in [lo, hi] whose
// neighbours lie in the domain; returns the first violating x, if any. A
// finite gap inside the domain (phi(x) infinite between finite neighbours)
// counts as a violation.
inline std::optional<Int> check_midpoint_convexity(const ConvexCost& phi, Int lo, Int hi) {
    if (lo > hi) fail("bad_range", "check_midpoint_convexity needs lo <= hi");
    for (Int x = lo; x <= hi; ++x) {
        auto fm = phi.eval(x - 1);
        auto fp = phi.eval(x + 1);
        if (!fm || !fp) continue;
        auto f0 = phi.eval(x);
        if (!f0) return x;
        if (*fm + *fp < *f0 * Rational(2)) return x;
    }
    return std::nullopt;
}

// A set of spatio-temporal nodes, stored as sorted unique indices into the
// expanded graph (index = time * static_node_count + node).
using NodeSet = std::vector<std::int32_t>;

inline NodeSet make_node_set(std::vector<std::int32_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline bool sets_disjoint(const NodeSet& a, const NodeSet& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return false;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return true;
}

inline bool set_includes(const NodeSet& big, const NodeSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

struct LaminarMember {
    NodeSet set;
    ConvexCost cost;
};

// A laminar family of spatio-temporal node sets with one univariate convex
// cost per set. Restricted to the hyperplane sum == r this is an M-convex
// function of the boundary table.
struct LaminarCostSpec {
    int time_count = 0;
    int static_node_count = 0;
    std::vector<LaminarMember> members;

    int ground_size() const { return time_count * static_node_count; }
    int static_node_of(std::int32_t ground_index) const {
        return ground_index % static_node_count;
    }
};

// True when the member's set lies within the sources/destinations block
// (the V1 family); false when it lies within a single router's timeline
// (the V3 family). validate_laminar rejects anything else.
inline bool member_over_sources_destinations(const LaminarCostSpec& spec, const Network& net,
                                             const LaminarMember& m) {
    for (std::int32_t id : m.set) {
        if (net.kind(spec.static_node_of(id)) == NodeKind::Router) return false;
    }
    return true;
}

inline void validate_laminar(const LaminarCostSpec& spec, const Network& net) {
    if (spec.static_node_count != net.node_count()) {
        fail("dimension_mismatch", "laminar spec ground set does not match the network");
    }
    if (spec.time_count < 1) fail("bad_horizon", "laminar spec needs at least one unit time");
    const int ground = spec.ground_size();
    for (size_t i = 0; i < spec.members.size(); ++i) {
        const NodeSet& x = spec.members[i].set;
        if (x.empty()) fail("bad_node_set", "laminar member " + std::to_string(i) + " is empty");
        for (std::int32_t id : x) {
            if (id < 0 || id >= ground) {
                fail("bad_node_set",
                     "laminar member " + std::to_string(i) + " references an unknown node");
            }
        }
        if (!std::is_sorted(x.begin(), x.end()) ||
            std::adjacent_find(x.begin(), x.end()) != x.end()) {
            fail("bad_node_set", "laminar member " + std::to_string(i) + " is not normalized");
        }
        // Each set stays either within T x (V_S u V_D) or within one router's
        // timeline.
        int router = -1;
        bool any_router = false, any_external = false;
        for (std::int32_t id : x) {
            NodeId v = spec.static_node_of(id);
            if (net.kind(v) == NodeKind::Router) {
                any_router = true;
                if (router == -1) router = v;
                else if (router != v) {
                    fail("mixed_group", "laminar member " + std::to_string(i) +
                                            " spans more than one router");
                }
            } else {
                any_external = true;
            }
        }
        if (any_router && any_external) {
            fail("mixed_group",
                 "laminar member " + std::to_string(i) + " mixes a router with another node");
        }
    }
    for (size_t i = 0; i < spec.members.size(); ++i) {
        for (size_t j = i + 1; j < spec.members.size(); ++j) {
            const NodeSet& x = spec.members[i].set;
            const NodeSet& y = spec.members[j].set;
            if (sets_disjoint(x, y) || set_includes(x, y) || set_includes(y, x)) continue;
            fail("not_laminar", "laminar members " + std::to_string(i) + " and " +
                                    std::to_string(j) + " cross");
        }
    }
}

// f(du) = sum over members of f_X(du(X)) when the total boundary equals r,
// +inf otherwise. du(X) aggregates the boundary over the member's nodes.
inline std::optional<Rational> eval_laminar(const LaminarCostSpec& spec, const BoundaryTable& du,
                                            Int r = 0) {
    if (du.times() != spec.time_count || du.cols() != spec.static_node_count) {
        fail("dimension_mismatch", "boundary table does not match the laminar spec");
    }
    detail::Wide total = 0;
    for (Int v : du.values()) total += v;
    if (total != r) return std::nullopt;
    Rational sum(0);
    for (const LaminarMember& m : spec.members) {
        detail::Wide agg = 0;
        for (std::int32_t id : m.set) {
            agg += du.at(id / spec.static_node_count, id % spec.static_node_count);
        }
        auto val = m.cost.eval(detail::narrow(agg, "laminar aggregate"));
        if (!val) return std::nullopt;
        sum += *val;
    }
    return sum;
}

// Directed-tree representation of a laminar family. Tree node 0 is the
// root; member i maps to tree node i + 1 and owns the single arc from its
// parent. Ground elements attach to the deepest member containing them
// (the root when uncovered); routing x(X) units through member X's arc
// costs f_X(x(X)), and conservation at the root enforces the hyperplane
// sum x == r.
struct CostTree {
    std::vector<int> parent_node;            // per member: parent tree node id
    std::vector<std::vector<int>> children;  // per tree node: child member indices
    std::vector<int> attach;                 // per ground element: absorbing tree node id

    int node_count() const { return static_cast<int>(parent_node.size()) + 1; }
    int member_node(int member_index) const { return member_index + 1; }
};

inline CostTree build_cost_tree(const LaminarCostSpec& spec) {
    const int m = static_cast<int>(spec.members.size());
    CostTree tree;
    tree.parent_node.assign(m, 0);
    tree.children.assign(m + 1, {});
    tree.attach.assign(spec.ground_size(), 0);

    // Place members largest-first; the parent of X is the smallest
    // already-placed superset. Equal sets chain in placement order.
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&spec](int a, int b) {
        return spec.members[a].set.size() > spec.members[b].set.size();
    });
    std::vector<int> placed;
    for (int idx : order) {
        const NodeSet& x = spec.members[idx].set;
        int best = -1;
        for (int p : placed) {
            if (!set_includes(spec.members[p].set, x)) continue;
            if (best == -1 || spec.members[p].set.size() <= spec.members[best].set.size()) {
                best = p;  // <= keeps the most recently placed among equals
            }
        }
        tree.parent_node[idx] = best == -1 ? 0 : tree.member_node(best);
        tree.children[tree.parent_node[idx]].push_back(idx);
        placed.push_back(idx);
    }
    for (int g = 0; g < spec.ground_size(); ++g) {
        int best = -1;
        for (int p : placed) {
            const NodeSet& set = spec.members[p].set;
            if (!std::binary_search(set.begin(), set.end(), g)) continue;
            if (best == -1 || set.size() <= spec.members[best].set.size()) best = p;
        }
        tree.attach[g] = best == -1 ? 0 : tree.member_node(best);
    }
    return tree;
}

inline CostTree laminar_to_tree(const LaminarCostSpec& spec, const Network& net) {
    validate_laminar(spec, net);
    return build_cost_tree(spec);
}

}  // namespace ppr
