#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "ppr/costs.hpp"
#include "ppr/errors.hpp"
#include "ppr/network.hpp"
#include "ppr/rational.hpp"

namespace ppr {

// A full problem instance: network + horizon, one convex cost per
// spatio-temporal arc (its effective domain is the capacity interval), a
// laminar node-group cost, and a hard zero-boundary node set Z restricted
// to router nodes.
struct Problem {
    Network net;
    TimeHorizon horizon{1};
    std::vector<ConvexCost> arc_costs;     // size N * |A|, index t * |A| + a
    LaminarCostSpec node_costs;
    std::vector<std::uint8_t> hard_zero;   // size N * |V|; nonzero only at routers

    int st_arc_index(int t, ArcId a) const { return t * net.arc_count() + a; }
    int st_node_index(int t, NodeId v) const { return t * net.node_count() + v; }
};

inline void validate(const Problem& p) {
    validate(p.net);
    const int n = p.horizon.unit_times();
    if (static_cast<int>(p.arc_costs.size()) != n * p.net.arc_count()) {
        fail("dimension_mismatch", "expected one arc cost per spatio-temporal arc");
    }
    if (p.node_costs.time_count != n || p.node_costs.static_node_count != p.net.node_count()) {
        fail("dimension_mismatch", "laminar spec does not match network and horizon");
    }
    validate_laminar(p.node_costs, p.net);
    if (static_cast<int>(p.hard_zero.size()) != n * p.net.node_count()) {
        fail("dimension_mismatch", "hard-zero table does not match network and horizon");
    }
    for (int t = 0; t < n; ++t) {
        for (NodeId v = 0; v < p.net.node_count(); ++v) {
            if (p.hard_zero[p.st_node_index(t, v)] && p.net.kind(v) != NodeKind::Router) {
                fail("bad_hard_zero", "hard zero-boundary set contains non-router node " +
                                          node_label(p.net, v));
            }
        }
    }
    for (const ConvexCost& c : p.arc_costs) {
        if (c.domain().empty()) fail("bad_cost", "arc cost has an empty capacity interval");
    }
}

enum class ArcOrigin { StArc, Attachment, TreeMember };

struct ReducedArc {
    int tail = 0;
    int head = 0;
    ConvexCost cost = ConvexCost::affine(Rational(0));
    Int lo = 0;  // finite capacity interval after capping
    Int hi = 0;
    ArcOrigin origin = ArcOrigin::StArc;
    int origin_index = 0;  // st-arc index / st-node index / member index
};

// Integer convex-cost circulation equivalent to the original problem:
// spatio-temporal arcs keep their costs; every spatio-temporal node sends
// its negated boundary through an attachment arc into the cost tree; tree
// arcs carry the aggregated group boundaries and their member costs.
// Conservation at the tree root is exactly the hyperplane condition of the
// node cost, so circulations correspond one-to-one with flows u, and the
// circulation cost equals J(u).
struct ReducedCirculation {
    int node_count = 0;
    int st_node_count = 0;
    int st_arc_count = 0;
    int tree_node_base = 0;  // tree node id t lives at graph node tree_node_base + t
    Int cap_bound = 0;
    std::vector<ReducedArc> arcs;  // [st arcs][attachments][tree member arcs]
    CostTree tree;
};

namespace detail {

inline Int reduce_cap_bound(const Problem& p) {
    Wide b = 1;
    for (const LaminarMember& m : p.node_costs.members) b += m.cost.anchor_magnitude();
    for (const ConvexCost& c : p.arc_costs) {
        const Interval& d = c.domain();
        if (d.bounded()) b += std::max(d.lo < 0 ? -d.lo : d.lo, d.hi < 0 ? -d.hi : d.hi);
        else b += c.anchor_magnitude();
    }
    if (b > (Wide(1) << 50)) fail("overflow", "capacity cap bound is too large");
    return static_cast<Int>(b);
}

}  // namespace detail

inline ReducedCirculation reduce(const Problem& p) {
    validate(p);
    const int n = p.horizon.unit_times();
    const int arcs_per_slice = p.net.arc_count();
    const int nodes_per_slice = p.net.node_count();

    for (const ConvexCost& c : p.arc_costs) {
        if (c.unbounded_below()) {
            fail("unbounded_domain", "an arc cost decreases without bound on an infinite domain");
        }
        if (!c.domain().contains(0)) {
            fail("no_obvious_feasible_point", "an arc capacity interval excludes zero flow");
        }
    }
    for (const LaminarMember& m : p.node_costs.members) {
        if (m.cost.unbounded_below()) {
            fail("unbounded_domain", "a node-group cost decreases without bound");
        }
        if (!m.cost.eval(0)) {
            fail("no_obvious_feasible_point", "a node-group cost is infinite at zero boundary");
        }
    }

    ReducedCirculation rc;
    rc.st_node_count = n * nodes_per_slice;
    rc.st_arc_count = n * arcs_per_slice;
    rc.tree_node_base = rc.st_node_count;
    rc.tree = build_cost_tree(p.node_costs);
    rc.node_count = rc.st_node_count + rc.tree.node_count();
    rc.cap_bound = detail::reduce_cap_bound(p);
    const Int b = rc.cap_bound;

    rc.arcs.reserve(rc.st_arc_count + rc.st_node_count + p.node_costs.members.size());
    for (int t = 0; t < n; ++t) {
        for (ArcId a = 0; a < arcs_per_slice; ++a) {
            const ConvexCost& c = p.arc_costs[p.st_arc_index(t, a)];
            ReducedArc r;
            r.tail = p.st_node_index(t, p.net.tail(a));
            r.head = p.st_node_index(t, p.net.head(a));
            r.cost = c;
            r.lo = std::max(c.domain().lo, -b);
            r.hi = std::min(c.domain().hi, b);
            r.origin = ArcOrigin::StArc;
            r.origin_index = p.st_arc_index(t, a);
            rc.arcs.push_back(std::move(r));
        }
    }
    for (int g = 0; g < rc.st_node_count; ++g) {
        ReducedArc r;
        r.tail = g;
        r.head = rc.tree_node_base + rc.tree.attach[g];
        r.cost = ConvexCost::affine(Rational(0));
        if (p.hard_zero[g]) {
            r.lo = 0;
            r.hi = 0;
        } else {
            r.lo = -b;
            r.hi = b;
        }
        r.origin = ArcOrigin::Attachment;
        r.origin_index = g;
        rc.arcs.push_back(std::move(r));
    }
    for (size_t i = 0; i < p.node_costs.members.size(); ++i) {
        const ConvexCost& c = p.node_costs.members[i].cost;
        ReducedArc r;
        r.tail = rc.tree_node_base + rc.tree.parent_node[i];
        r.head = rc.tree_node_base + rc.tree.member_node(static_cast<int>(i));
        r.cost = c;
        r.lo = std::max(c.domain().lo, -b);
        r.hi = std::min(c.domain().hi, b);
        r.origin = ArcOrigin::TreeMember;
        r.origin_index = static_cast<int>(i);
        rc.arcs.push_back(std::move(r));
    }
    for (const ReducedArc& r : rc.arcs) {
        if (r.lo > r.hi || r.lo > 0 || r.hi < 0) {
            fail("no_obvious_feasible_point", "zero flow is not feasible for this instance");
        }
    }
    return rc;
}

inline Rational circulation_cost(const ReducedCirculation& rc, const std::vector<Int>& flow) {
    Rational total(0);
    for (size_t i = 0; i < rc.arcs.size(); ++i) {
        auto v = rc.arcs[i].cost.eval(flow[i]);
        if (!v) fail("internal", "circulation flow left a cost domain");
        total += *v;
    }
    return total;
}

struct ResidualArc {
    int tail = 0;
    int head = 0;
    Rational cost;    // exact unit increment phi(x +- 1) - phi(x)
    int arc = 0;      // index into ReducedCirculation::arcs
    bool forward = true;
};

// Unit-increment residual arcs of a feasible circulation, listed in
// (arc index, forward-before-backward) order.
inline std::vector<ResidualArc> residual_arcs(const ReducedCirculation& rc,
                                              const std::vector<Int>& flow) {
    std::vector<ResidualArc> res;
    res.reserve(2 * rc.arcs.size());
    for (size_t i = 0; i < rc.arcs.size(); ++i) {
        const ReducedArc& a = rc.arcs[i];
        const Int x = flow[i];
        auto fx = a.cost.eval(x);
        if (!fx) fail("internal", "residual construction on infeasible flow");
        if (x + 1 <= a.hi) {
            auto fp = a.cost.eval(x + 1);
            if (fp) res.push_back({a.tail, a.head, *fp - *fx, static_cast<int>(i), true});
        }
        if (x - 1 >= a.lo) {
            auto fm = a.cost.eval(x - 1);
            if (fm) res.push_back({a.head, a.tail, *fm - *fx, static_cast<int>(i), false});
        }
    }
    return res;
}

// Bellman-Ford over walk lengths with all labels starting at zero (an
// implicit super source). d[k][v] is the cheapest walk into v using at most
// k arcs; a strict improvement at layer n certifies a negative cycle, and
// decomposing the improving n-arc walk yields a strictly negative simple
// cycle. Returns its arc indices in traversal order, or nullopt.
// Deterministic for a fixed arc order.
inline std::optional<std::vector<int>> find_negative_cycle(int node_count,
                                                           const std::vector<ResidualArc>& arcs) {
    const int n = node_count;
    if (n == 0 || arcs.empty()) return std::nullopt;
    std::vector<Rational> prev(n, Rational(0));
    std::vector<Rational> cur(n, Rational(0));
    // improved[k][v]: arc that strictly improved v at layer k, -1 if carried
    std::vector<std::vector<int>> improved;
    improved.reserve(n + 1);
    improved.emplace_back(n, -1);

    for (int k = 1; k <= n; ++k) {
        cur = prev;
        std::vector<int> layer(n, -1);
        bool changed = false;
        for (size_t e = 0; e < arcs.size(); ++e) {
            const ResidualArc& a = arcs[e];
            Rational cand = prev[a.tail] + a.cost;
            if (cand < cur[a.head]) {
                cur[a.head] = cand;
                layer[a.head] = static_cast<int>(e);
                changed = true;
            }
        }
        improved.push_back(std::move(layer));
        if (!changed) return std::nullopt;
        prev.swap(cur);
    }

    int v = -1;
    for (int i = 0; i < n; ++i) {
        if (improved[n][i] >= 0) {
            v = i;
            break;
        }
    }
    if (v < 0) fail("internal", "negative cycle detected but no improved node recorded");

    // The improving walk has exactly n arcs (a shorter one would contradict
    // the optimality of earlier layers), so it repeats a node and one of its
    // simple sub-cycles must be negative.
    std::vector<int> walk(n, -1);
    int x = v;
    for (int k = n; k >= 1; --k) {
        int e = improved[k][x];
        if (e < 0) fail("internal", "negative cycle backtrack hit a carried layer");
        walk[k - 1] = e;
        x = arcs[e].tail;
    }

    std::vector<int> position(n, -1);
    std::vector<int> path_arcs;
    std::vector<int> path_nodes;
    path_nodes.push_back(arcs[walk[0]].tail);
    position[path_nodes[0]] = 0;
    for (int e : walk) {
        path_arcs.push_back(e);
        int h = arcs[e].head;
        int seen = position[h];
        if (seen >= 0) {
            std::vector<int> cycle(path_arcs.begin() + seen, path_arcs.end());
            Rational total(0);
            for (int c : cycle) total += arcs[c].cost;
            if (total.sign() < 0) return cycle;
            for (size_t i = seen + 1; i < path_nodes.size(); ++i) position[path_nodes[i]] = -1;
            path_nodes.resize(seen + 1);
            path_arcs.resize(seen);
        } else {
            path_nodes.push_back(h);
            position[h] = static_cast<int>(path_nodes.size()) - 1;
        }
    }
    fail("internal", "improving walk contained no negative simple cycle");
}

// Independent optimality certificate: rebuilds the residual graph and
// confirms it has no negative cycle.
inline bool verify_optimality(const ReducedCirculation& rc, const std::vector<Int>& flow) {
    return !find_negative_cycle(rc.node_count, residual_arcs(rc, flow)).has_value();
}

struct SolveOptions {
    long long max_iterations = 1'000'000;
};

struct Solution {
    SpatioTemporalFlow flow;   // optimal integer flow on the expanded graph
    BoundaryTable bound;       // its boundary
    Rational cost;             // J(u) == v1 + v2 + v3
    Rational v1;               // source/destination group cost
    Rational v2;               // per-arc transfer cost
    Rational v3;               // router group cost
    bool optimal = false;      // no negative residual cycle at termination
    long long iterations = 0;  // augmentations performed
};

// Cycle-canceling with single-unit augmentations, starting from the zero
// circulation. Every augmentation strictly decreases the exact rational
// cost, so termination is guaranteed on the capped instance.
inline Solution solve(const Problem& p, const SolveOptions& opts = {}) {
    ReducedCirculation rc = reduce(p);
    std::vector<Int> flow(rc.arcs.size(), 0);
    Rational cost = circulation_cost(rc, flow);
    long long iterations = 0;

    for (;;) {
        auto res = residual_arcs(rc, flow);
        auto cycle = find_negative_cycle(rc.node_count, res);
        if (!cycle) break;
        if (++iterations > opts.max_iterations) {
            fail("iteration_limit",
                 "exceeded " + std::to_string(opts.max_iterations) + " augmentations");
        }
        Rational delta(0);
        for (int e : *cycle) {
            delta += res[e].cost;
            flow[res[e].arc] += res[e].forward ? 1 : -1;
        }
        Rational updated = circulation_cost(rc, flow);
        if (!(delta.sign() < 0) || updated != cost + delta) {
            fail("internal", "augmentation did not decrease the cost as predicted");
        }
        cost = updated;
    }

    Solution s;
    const int n = p.horizon.unit_times();
    s.flow = SpatioTemporalFlow(n, p.net.arc_count());
    for (int t = 0; t < n; ++t) {
        for (ArcId a = 0; a < p.net.arc_count(); ++a) {
            s.flow.at(t, a) = flow[p.st_arc_index(t, a)];
        }
    }
    s.bound = boundary(p.net, s.flow);
    s.iterations = iterations;
    s.optimal = verify_optimality(rc, flow);

    // Re-evaluate J(u) independently of the tracked circulation cost.
    s.v2 = Rational(0);
    for (int t = 0; t < n; ++t) {
        for (ArcId a = 0; a < p.net.arc_count(); ++a) {
            auto v = p.arc_costs[p.st_arc_index(t, a)].eval(s.flow.at(t, a));
            if (!v) fail("internal", "solved flow violates an arc capacity");
            s.v2 += *v;
        }
    }
    s.v1 = Rational(0);
    s.v3 = Rational(0);
    for (const LaminarMember& m : p.node_costs.members) {
        detail::Wide agg = 0;
        for (std::int32_t id : m.set) {
            agg += s.bound.at(id / p.net.node_count(), id % p.net.node_count());
        }
        auto v = m.cost.eval(detail::narrow(agg, "group boundary"));
        if (!v) fail("internal", "solved flow violates a node-group domain");
        if (member_over_sources_destinations(p.node_costs, p.net, m)) s.v1 += *v;
        else s.v3 += *v;
    }
    s.cost = s.v1 + s.v2 + s.v3;
    auto recheck = eval_laminar(p.node_costs, s.bound);
    if (!recheck || *recheck + s.v2 != cost || s.cost != cost) {
        fail("internal", "cost breakdown does not match the circulation cost");
    }
    for (int g = 0; g < rc.st_node_count; ++g) {
        if (p.hard_zero[g] &&
            s.bound.at(g / p.net.node_count(), g % p.net.node_count()) != 0) {
            fail("internal", "hard zero-boundary constraint violated");
        }
    }
    return s;
}

}  // namespace ppr
