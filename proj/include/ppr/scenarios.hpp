#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppr/costs.hpp"
#include "ppr/errors.hpp"
#include "ppr/network.hpp"
#include "ppr/rational.hpp"
#include "ppr/solver.hpp"

namespace ppr {

// Rows x cols router grid with rightward and downward internal links,
// source feeds at the top-left and bottom-left corners and destination
// taps at the top-right and bottom-right corners. Internal links carry a
// transfer cost and a tight symmetric capacity; attachment links are free
// and uncapacitated.
struct MeshSpec {
    int rows = 3;
    int cols = 3;
    Rational internal_beta = Rational(1);
    Int internal_lo = -1;
    Int internal_hi = 1;
    Rational attachment_beta = Rational(0);
    Interval attachment_caps = Interval::all();
};

struct MeshNetwork {
    Network net;
    MeshSpec spec;
    int internal_arc_count = 0;  // arcs [0, internal_arc_count) are router-router
    NodeId s1 = 0, s2 = 0, d1 = 0, d2 = 0;
    std::vector<NodeId> externals;  // s1, s2, d1, d2
};

inline MeshNetwork build_mesh(const MeshSpec& spec = {}) {
    if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols < 2) {
        fail("bad_mesh", "mesh needs at least two routers");
    }
    const int r = spec.rows;
    const int c = spec.cols;
    const int routers = r * c;
    auto router_at = [c](int row, int col) { return NodeId(row * c + col); };

    std::vector<NodeKind> kinds(routers, NodeKind::Router);
    NodeId s1 = routers + 0, s2 = routers + 1, d1 = routers + 2, d2 = routers + 3;
    kinds.push_back(NodeKind::Source);
    kinds.push_back(NodeKind::Source);
    kinds.push_back(NodeKind::Destination);
    kinds.push_back(NodeKind::Destination);

    std::vector<Arc> arcs;
    for (int row = 0; row < r; ++row) {
        for (int col = 0; col + 1 < c; ++col) {
            arcs.push_back({router_at(row, col), router_at(row, col + 1)});
        }
    }
    for (int row = 0; row + 1 < r; ++row) {
        for (int col = 0; col < c; ++col) {
            arcs.push_back({router_at(row, col), router_at(row + 1, col)});
        }
    }
    MeshNetwork mesh;
    mesh.spec = spec;
    mesh.internal_arc_count = static_cast<int>(arcs.size());
    arcs.push_back({s1, router_at(0, 0)});           // supply, top-left
    arcs.push_back({s2, router_at(r - 1, 0)});       // supply, bottom-left
    arcs.push_back({router_at(0, c - 1), d1});       // demand, top-right
    arcs.push_back({router_at(r - 1, c - 1), d2});   // demand, bottom-right

    mesh.net = Network(std::move(kinds), std::move(arcs));
    mesh.s1 = s1;
    mesh.s2 = s2;
    mesh.d1 = d1;
    mesh.d2 = d2;
    mesh.externals = {s1, s2, d1, d2};
    validate(mesh.net);
    return mesh;
}

namespace detail {

inline std::vector<ConvexCost> mesh_arc_costs(const MeshNetwork& mesh, int unit_times) {
    std::vector<ConvexCost> costs;
    costs.reserve(size_t(unit_times) * mesh.net.arc_count());
    for (int t = 0; t < unit_times; ++t) {
        for (ArcId a = 0; a < mesh.net.arc_count(); ++a) {
            if (a < mesh.internal_arc_count) {
                costs.push_back(ConvexCost::absolute_value(
                    mesh.spec.internal_beta,
                    Interval::between(mesh.spec.internal_lo, mesh.spec.internal_hi)));
            } else {
                costs.push_back(ConvexCost::absolute_value(mesh.spec.attachment_beta,
                                                           mesh.spec.attachment_caps));
            }
        }
    }
    return costs;
}

inline NodeSet all_times_of(const Network& net, int unit_times,
                            const std::vector<NodeId>& nodes) {
    NodeSet set;
    set.reserve(size_t(unit_times) * nodes.size());
    for (int t = 0; t < unit_times; ++t) {
        for (NodeId v : nodes) set.push_back(t * net.node_count() + v);
    }
    return make_node_set(std::move(set));
}

inline Problem mesh_problem_base(const MeshNetwork& mesh, int unit_times) {
    Problem p{mesh.net, TimeHorizon(unit_times), mesh_arc_costs(mesh, unit_times), {}, {}};
    p.node_costs.time_count = unit_times;
    p.node_costs.static_node_count = mesh.net.node_count();
    p.hard_zero.assign(size_t(unit_times) * mesh.net.node_count(), 0);
    for (int t = 0; t < unit_times; ++t) {
        for (NodeId v = 0; v < mesh.net.node_count(); ++v) {
            if (mesh.net.kind(v) == NodeKind::Router) p.hard_zero[p.st_node_index(t, v)] = 1;
        }
    }
    return p;
}

}  // namespace detail

// E1: each source and each destination must realize its own time-integrated
// boundary target; penalty * |du(T x {v}) - target(v)| per node. Targets
// must balance to zero across sources and destinations.
inline Problem build_problem_e1(const MeshNetwork& mesh, int unit_times,
                                const std::vector<Int>& source_targets,
                                const std::vector<Int>& destination_targets,
                                Rational penalty = Rational(1000)) {
    if (source_targets.size() != 2 || destination_targets.size() != 2) {
        fail("bad_scenario", "the mesh has two sources and two destinations");
    }
    Int balance = source_targets[0] + source_targets[1] + destination_targets[0] +
                  destination_targets[1];
    if (balance != 0) {
        fail("unbalanced_e1", "source targets must equal the negated destination targets");
    }
    Problem p = detail::mesh_problem_base(mesh, unit_times);
    const NodeId ext[4] = {mesh.s1, mesh.s2, mesh.d1, mesh.d2};
    const Int target[4] = {source_targets[0], source_targets[1], destination_targets[0],
                           destination_targets[1]};
    for (int i = 0; i < 4; ++i) {
        p.node_costs.members.push_back(
            {detail::all_times_of(mesh.net, unit_times, {ext[i]}),
             ConvexCost::deviation(penalty, target[i])});
    }
    validate(p);
    return p;
}

// E2: each destination must receive a given energy; penalty *
// |du(T x {d}) + received(d)| per destination. Sources are unconstrained.
inline Problem build_problem_e2(const MeshNetwork& mesh, int unit_times,
                                const std::vector<Int>& received,
                                Rational penalty = Rational(1000)) {
    if (received.size() != 2) fail("bad_scenario", "the mesh has two destinations");
    Problem p = detail::mesh_problem_base(mesh, unit_times);
    const NodeId dest[2] = {mesh.d1, mesh.d2};
    for (int i = 0; i < 2; ++i) {
        p.node_costs.members.push_back({detail::all_times_of(mesh.net, unit_times, {dest[i]}),
                                        ConvexCost::deviation(penalty, -received[i])});
    }
    validate(p);
    return p;
}

// E3: only the total energy received across all destinations is given;
// penalty * |du(T x V_D) + total|.
inline Problem build_problem_e3(const MeshNetwork& mesh, int unit_times, Int total,
                                Rational penalty = Rational(1000)) {
    Problem p = detail::mesh_problem_base(mesh, unit_times);
    p.node_costs.members.push_back(
        {detail::all_times_of(mesh.net, unit_times, {mesh.d1, mesh.d2}),
         ConvexCost::deviation(penalty, -total)});
    validate(p);
    return p;
}

// ---------------------------------------------------------------------------
// Independent oracle.
//
// Enumerates every per-unit-time assignment of the capacitated internal
// links, keeps only assignments conserving flow at the routers (the
// uncapacitated attachment link of a corner router is implied by
// conservation there), tabulates the reachable per-unit-time external
// boundary vectors with their cheapest transfer cost, runs a DP over the
// horizon on cumulative boundary vectors, and finally adds the node-group
// penalties. Shares no code with reduce/solve.
// ---------------------------------------------------------------------------

namespace detail {

struct OracleShape {
    std::vector<int> internal_arcs;         // enumerated arcs
    std::vector<Int> lo, hi;                // their capacity intervals
    std::vector<Int> beta;                  // their integer transfer weights
    std::vector<int> attach_arc;            // per external: its single arc
    std::vector<NodeId> attach_router;      // per external: the router it touches
    std::vector<NodeId> externals;          // sources and destinations, id order
    std::vector<Int> attach_beta;           // per external arc
};

inline Int oracle_int_coeff(const ConvexCost& c, const char* what) {
    if (c.kind() != CostKind::AbsoluteValue || !c.coefficient().is_integer()) {
        fail("oracle_unsupported", std::string("oracle needs integer |x| costs for ") + what);
    }
    return c.coefficient().num();
}

inline OracleShape oracle_shape(const Problem& p) {
    const Network& net = p.net;
    OracleShape shape;
    // Arc costs must not depend on the unit time.
    for (int t = 1; t < p.horizon.unit_times(); ++t) {
        for (ArcId a = 0; a < net.arc_count(); ++a) {
            if (!(p.arc_costs[p.st_arc_index(t, a)] == p.arc_costs[p.st_arc_index(0, a)])) {
                fail("oracle_unsupported", "oracle needs time-independent arc costs");
            }
        }
    }
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (net.kind(v) != NodeKind::Router) shape.externals.push_back(v);
    }
    std::vector<int> external_of_arc(net.arc_count(), -1);
    for (size_t i = 0; i < shape.externals.size(); ++i) {
        NodeId v = shape.externals[i];
        const auto& outs = net.out_arcs(v);
        const auto& ins = net.in_arcs(v);
        if (outs.size() + ins.size() != 1) {
            fail("oracle_unsupported", "oracle needs exactly one arc per source/destination");
        }
        ArcId a = outs.empty() ? ins[0] : outs[0];
        NodeId other = outs.empty() ? net.tail(a) : net.head(a);
        if (net.kind(other) != NodeKind::Router) {
            fail("oracle_unsupported", "oracle needs attachments to land on routers");
        }
        shape.attach_arc.push_back(a);
        shape.attach_router.push_back(other);
        shape.attach_beta.push_back(oracle_int_coeff(p.arc_costs[a], "attachment links"));
        external_of_arc[a] = static_cast<int>(i);
        if (p.arc_costs[a].domain().bounded()) {
            fail("oracle_unsupported", "oracle needs uncapacitated attachment links");
        }
    }
    // Attachment routers must be distinct, otherwise conservation does not
    // pin the implied attachment values.
    {
        auto sorted = shape.attach_router;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            fail("oracle_unsupported", "oracle needs distinct attachment routers");
        }
    }
    detail::Wide combos = 1;
    for (ArcId a = 0; a < net.arc_count(); ++a) {
        if (external_of_arc[a] >= 0) continue;
        if (net.kind(net.tail(a)) != NodeKind::Router ||
            net.kind(net.head(a)) != NodeKind::Router) {
            fail("oracle_unsupported", "oracle needs all non-attachment arcs between routers");
        }
        const Interval& dom = p.arc_costs[a].domain();
        if (!dom.bounded()) fail("oracle_unsupported", "oracle needs capacitated internal links");
        shape.internal_arcs.push_back(a);
        shape.lo.push_back(dom.lo);
        shape.hi.push_back(dom.hi);
        shape.beta.push_back(oracle_int_coeff(p.arc_costs[a], "internal links"));
        combos *= (dom.hi - dom.lo + 1);
        if (combos > 2'000'000) fail("too_large", "oracle enumeration budget exceeded");
    }
    // Every router boundary must be pinned to zero.
    for (int t = 0; t < p.horizon.unit_times(); ++t) {
        for (NodeId v = 0; v < net.node_count(); ++v) {
            if (net.kind(v) == NodeKind::Router && !p.hard_zero[p.st_node_index(t, v)]) {
                fail("oracle_unsupported", "oracle needs zero-boundary routers");
            }
        }
    }
    return shape;
}

// Packs small signed components into one key; magnitudes stay below 2^15.
inline std::uint64_t oracle_pack(const std::vector<Int>& state) {
    std::uint64_t key = 0;
    for (Int v : state) key = (key << 16) | std::uint64_t(v + 32768);
    return key;
}

}  // namespace detail

// Exact optimal cost, computed independently of the solver. Requires a
// mesh-shaped problem (zero-boundary routers, one uncapacitated attachment
// per source/destination, capacitated integer-|x| internal links) whose
// node groups aggregate whole external timelines, and a horizon small
// enough to enumerate. Throws Error("too_large") beyond the budget and
// Error("oracle_unsupported") for other shapes.
inline Rational oracle_cost(const Problem& p) {
    validate(p);
    if (p.horizon.unit_times() > 5) fail("too_large", "oracle supports at most five unit times");
    detail::OracleShape shape = detail::oracle_shape(p);
    const Network& net = p.net;
    const int k = static_cast<int>(shape.internal_arcs.size());
    const int externals = static_cast<int>(shape.externals.size());

    if (externals > 4) fail("too_large", "oracle state packing supports four externals");

    // Per-unit-time table: external boundary vector -> cheapest transfer cost.
    std::vector<Int> router_boundary(net.node_count(), 0);
    std::unordered_map<std::uint64_t, Int> step;

    std::vector<std::uint8_t> has_attachment(net.node_count(), 0);
    for (NodeId r : shape.attach_router) has_attachment[r] = 1;

    auto enumerate = [&](auto&& self, int depth, Int cost) -> void {
        if (depth == k) {
            for (NodeId v = 0; v < net.node_count(); ++v) {
                if (net.kind(v) == NodeKind::Router && !has_attachment[v] &&
                    router_boundary[v] != 0) {
                    return;
                }
            }
            std::vector<Int> q(externals);
            Int total = cost;
            for (int i = 0; i < externals; ++i) {
                // Conservation at the attachment router implies the
                // attachment value; either orientation leaves the external
                // node's boundary equal to the router's internal imbalance.
                Int imbalance = router_boundary[shape.attach_router[i]];
                q[i] = imbalance;
                Int mag = imbalance < 0 ? -imbalance : imbalance;
                total += shape.attach_beta[i] * mag;
            }
            std::uint64_t key = detail::oracle_pack(q);
            auto it = step.find(key);
            if (it == step.end() || total < it->second) step[key] = total;
            return;
        }
        ArcId a = shape.internal_arcs[depth];
        for (Int u = shape.lo[depth]; u <= shape.hi[depth]; ++u) {
            router_boundary[net.tail(a)] += u;
            router_boundary[net.head(a)] -= u;
            Int mag = u < 0 ? -u : u;
            self(self, depth + 1, cost + shape.beta[depth] * mag);
            router_boundary[net.tail(a)] -= u;
            router_boundary[net.head(a)] += u;
        }
    };
    enumerate(enumerate, 0, 0);
    if (step.empty()) fail("oracle_unsupported", "no conserving assignment exists");

    // DP over the horizon on cumulative external boundary vectors.
    std::unordered_map<std::uint64_t, Int> dp;
    dp[detail::oracle_pack(std::vector<Int>(externals, 0))] = 0;
    auto unpack = [externals](std::uint64_t key) {
        std::vector<Int> state(externals);
        for (int i = externals - 1; i >= 0; --i) {
            state[i] = Int(key & 0xffff) - 32768;
            key >>= 16;
        }
        return state;
    };
    for (int t = 0; t < p.horizon.unit_times(); ++t) {
        std::unordered_map<std::uint64_t, Int> next;
        for (const auto& [skey, scost] : dp) {
            std::vector<Int> state = unpack(skey);
            for (const auto& [qkey, qcost] : step) {
                std::vector<Int> q = unpack(qkey);
                for (int i = 0; i < externals; ++i) q[i] += state[i];
                std::uint64_t key = detail::oracle_pack(q);
                Int cand = scost + qcost;
                auto it = next.find(key);
                if (it == next.end() || cand < it->second) next[key] = cand;
            }
        }
        dp = std::move(next);
    }

    // Node-group penalties on the cumulative vectors. Groups must aggregate
    // whole external timelines.
    std::vector<NodeSet> group_sets;
    for (const LaminarMember& m : p.node_costs.members) {
        std::vector<std::uint8_t> picked(externals, 0);
        for (std::int32_t id : m.set) {
            NodeId v = p.node_costs.static_node_of(id);
            auto it = std::find(shape.externals.begin(), shape.externals.end(), v);
            if (it == shape.externals.end()) {
                fail("oracle_unsupported", "oracle needs groups over sources/destinations");
            }
            picked[it - shape.externals.begin()] = 1;
        }
        NodeSet expect;
        for (int i = 0; i < externals; ++i) {
            if (!picked[i]) continue;
            for (int t = 0; t < p.horizon.unit_times(); ++t) {
                expect.push_back(t * net.node_count() + shape.externals[i]);
            }
        }
        if (make_node_set(std::move(expect)) != m.set) {
            fail("oracle_unsupported", "oracle needs groups covering whole timelines");
        }
        NodeSet indices;
        for (int i = 0; i < externals; ++i) {
            if (picked[i]) indices.push_back(i);
        }
        group_sets.push_back(indices);
    }

    bool found = false;
    Rational best(0);
    for (const auto& [skey, scost] : dp) {
        std::vector<Int> state = unpack(skey);
        Rational total(scost);
        bool feasible = true;
        for (size_t g = 0; g < group_sets.size(); ++g) {
            Int agg = 0;
            for (std::int32_t i : group_sets[g]) agg += state[i];
            auto v = p.node_costs.members[g].cost.eval(agg);
            if (!v) {
                feasible = false;
                break;
            }
            total += *v;
        }
        if (!feasible) continue;
        if (!found || total < best) {
            best = total;
            found = true;
        }
    }
    if (!found) fail("oracle_unsupported", "no feasible terminal state");
    return best;
}

}  // namespace ppr
