#include "doctest.h"
#include "test_support.hpp"

using namespace ppr;
using ppr_test::make_path;

namespace {

Problem path_problem(Interval caps, std::vector<LaminarMember> members,
                     bool zero_router = true) {
    Problem p;
    p.net = make_path();
    p.horizon = TimeHorizon(1);
    p.arc_costs = {ConvexCost::absolute_value(Rational(1), caps),
                   ConvexCost::absolute_value(Rational(1), caps)};
    p.node_costs.time_count = 1;
    p.node_costs.static_node_count = 3;
    p.node_costs.members = std::move(members);
    p.hard_zero = {0, zero_router ? std::uint8_t(1) : std::uint8_t(0), 0};
    return p;
}

}  // namespace

TEST_CASE("reduction audit: star instance") {
    // One unit time over the mesh: 13 spatio-temporal nodes feed a root
    // with four member arcs; 16 + 13 + 4 arcs in total.
    MeshNetwork mesh = build_mesh();
    Problem p = build_problem_e1(mesh, 1, {1, 0}, {-1, 0});
    ReducedCirculation rc = reduce(p);
    CHECK(rc.st_node_count == 13);
    CHECK(rc.st_arc_count == 16);
    CHECK(rc.node_count == 18);
    CHECK(rc.arcs.size() == 33);

    int st = 0, attach = 0, member = 0;
    for (const ReducedArc& a : rc.arcs) {
        switch (a.origin) {
            case ArcOrigin::StArc: ++st; break;
            case ArcOrigin::Attachment: ++attach; break;
            case ArcOrigin::TreeMember: ++member; break;
        }
    }
    CHECK(st == 16);
    CHECK(attach == 13);
    CHECK(member == 4);
}

TEST_CASE("reduction audit: aggregate-destination instance") {
    MeshNetwork mesh = build_mesh();
    Problem p = build_problem_e3(mesh, 2, 6);
    ReducedCirculation rc = reduce(p);
    CHECK(rc.st_node_count == 26);
    CHECK(rc.node_count == 26 + 1 + 1);
    CHECK(rc.arcs.size() == 32 + 26 + 1);
    CHECK(rc.tree.attach[p.st_node_index(0, mesh.d1)] == rc.tree.member_node(0));
    CHECK(rc.tree.attach[p.st_node_index(1, mesh.d2)] == rc.tree.member_node(0));
    CHECK(rc.tree.attach[p.st_node_index(0, 0)] == 0);
}

TEST_CASE("reduction pins hard-zero attachments and caps the rest") {
    MeshNetwork mesh = build_mesh();
    Problem p = build_problem_e2(mesh, 1, {2, 1});
    ReducedCirculation rc = reduce(p);
    for (const ReducedArc& a : rc.arcs) {
        CHECK(a.lo <= 0);
        CHECK(0 <= a.hi);
        if (a.origin == ArcOrigin::Attachment) {
            int v = a.origin_index % mesh.net.node_count();
            if (mesh.net.kind(v) == NodeKind::Router) {
                CHECK(a.lo == 0);
                CHECK(a.hi == 0);
            } else {
                CHECK(a.hi == rc.cap_bound);
            }
        }
    }
}

TEST_CASE("fully constrained path admits only the zero flow") {
    Problem p = path_problem(Interval::between(0, 0), {});
    Solution s = solve(p);
    CHECK(s.cost == Rational(0));
    CHECK(s.iterations == 0);
    CHECK(s.optimal);
    for (Int v : s.flow.values()) CHECK(v == 0);
}

TEST_CASE("zero flow infeasible raises no_obvious_feasible_point") {
    SUBCASE("arc capacity excludes zero") {
        Problem p = path_problem(Interval::between(1, 2), {});
        try {
            solve(p);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == "no_obvious_feasible_point");
        }
    }
    SUBCASE("group domain excludes zero") {
        Problem p = path_problem(Interval::between(-1, 1),
                                 {{{0}, ConvexCost::indicator(1, 5)}});
        CHECK_THROWS_AS(solve(p), Error);
    }
}

TEST_CASE("unbounded objectives are rejected") {
    Problem p = path_problem(Interval::between(-1, 1), {});
    p.arc_costs[0] = ConvexCost::affine(Rational(1));  // dom (-inf, +inf)
    try {
        solve(p);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == "unbounded_domain");
    }
}

TEST_CASE("residual arcs carry exact unit increments") {
    Problem p = path_problem(Interval::between(-1, 1), {});
    ReducedCirculation rc = reduce(p);

    SUBCASE("absolute value at rest") {
        std::vector<Int> flow(rc.arcs.size(), 0);
        auto res = residual_arcs(rc, flow);
        // arc 0 contributes a forward and a backward residual, both cost 1
        CHECK(res[0].arc == 0);
        CHECK(res[0].forward);
        CHECK(res[0].cost == Rational(1));
        CHECK(res[1].arc == 0);
        CHECK(!res[1].forward);
        CHECK(res[1].cost == Rational(1));
    }
    SUBCASE("at the domain edge only the backward residual remains") {
        std::vector<Int> flow(rc.arcs.size(), 0);
        flow[0] = 1;
        // keep the circulation consistent: route through the router and out
        flow[1] = 1;
        flow[rc.st_arc_count + 0] = -1;
        flow[rc.st_arc_count + 2] = 1;
        auto res = residual_arcs(rc, flow);
        int fwd = 0, bwd = 0;
        for (const ResidualArc& a : res) {
            if (a.arc != 0) continue;
            if (a.forward) ++fwd;
            else {
                ++bwd;
                CHECK(a.cost == Rational(-1));
            }
        }
        CHECK(fwd == 0);
        CHECK(bwd == 1);
    }
    SUBCASE("a deviation member arc pulls toward its target") {
        Problem dev = path_problem(Interval::between(-1, 1),
                                   {{{0}, ConvexCost::deviation(Rational(1000), 6)}});
        ReducedCirculation rcd = reduce(dev);
        std::vector<Int> flow(rcd.arcs.size(), 0);
        auto res = residual_arcs(rcd, flow);
        const int member_arc = rcd.st_arc_count + rcd.st_node_count;  // single member
        bool saw_forward = false;
        for (const ResidualArc& a : res) {
            if (a.arc == member_arc && a.forward) {
                saw_forward = true;
                // below the target the slope of 1000|x - 6| is -1000
                CHECK(a.cost == Rational(-1000));
            }
        }
        CHECK(saw_forward);
    }
}

TEST_CASE("negative cycle detection on hand-built residual graphs") {
    SUBCASE("two-node negative loop") {
        std::vector<ResidualArc> arcs = {{0, 1, Rational(1), 0, true},
                                         {1, 0, Rational(-2), 1, true}};
        auto cycle = find_negative_cycle(2, arcs);
        REQUIRE(cycle);
        CHECK(cycle->size() == 2);
        Rational total(0);
        for (int e : *cycle) total += arcs[e].cost;
        CHECK(total == Rational(-1));
    }
    SUBCASE("nonnegative costs have no cycle") {
        std::vector<ResidualArc> arcs = {{0, 1, Rational(0), 0, true},
                                         {1, 2, Rational(1), 1, true},
                                         {2, 0, Rational(0), 2, true}};
        CHECK(!find_negative_cycle(3, arcs));
    }
    SUBCASE("negative arc without a cycle") {
        std::vector<ResidualArc> arcs = {{0, 1, Rational(-5), 0, true}};
        CHECK(!find_negative_cycle(2, arcs));
    }
    SUBCASE("cycle costs are exact rationals") {
        std::vector<ResidualArc> arcs = {{0, 1, Rational(1, 3), 0, true},
                                         {1, 0, Rational(-1, 2), 1, true}};
        auto cycle = find_negative_cycle(2, arcs);
        REQUIRE(cycle);
        Rational total(0);
        for (int e : *cycle) total += arcs[e].cost;
        CHECK(total == Rational(-1, 6));
    }
}

TEST_CASE("zero flow on a nonzero-target instance is not optimal") {
    MeshNetwork mesh = build_mesh();
    Problem p = build_problem_e1(mesh, 1, {1, 0}, {-1, 0});
    ReducedCirculation rc = reduce(p);
    std::vector<Int> zero(rc.arcs.size(), 0);
    auto cycle = find_negative_cycle(rc.node_count, residual_arcs(rc, zero));
    REQUIRE(cycle);
    Rational total(0);
    auto res = residual_arcs(rc, zero);
    for (int e : *cycle) total += res[e].cost;
    CHECK(total.sign() < 0);
    CHECK(!verify_optimality(rc, zero));
}

TEST_CASE("zero flow with zero targets is already optimal") {
    MeshNetwork mesh = build_mesh();
    Problem p = build_problem_e1(mesh, 1, {0, 0}, {0, 0});
    ReducedCirculation rc = reduce(p);
    std::vector<Int> zero(rc.arcs.size(), 0);
    CHECK(verify_optimality(rc, zero));
}

TEST_CASE("solve reproduces published single-step costs") {
    MeshNetwork mesh = build_mesh();
    struct Case {
        std::vector<Int> src, dst;
        Int expect;
    };
    for (const Case& c : {Case{{0, 0}, {0, 0}, 0}, Case{{1, 1}, {-1, -1}, 4},
                          Case{{2, 1}, {-1, -2}, 8}}) {
        Problem p = build_problem_e1(mesh, 1, c.src, c.dst);
        Solution s = solve(p);
        CHECK(s.cost == Rational(c.expect));
        CHECK(s.optimal);
        CHECK(s.cost == s.v1 + s.v2 + s.v3);
    }
}

TEST_CASE("unrepresentable demand pays the deviation penalty") {
    MeshNetwork mesh = build_mesh();
    Solution s = solve(build_problem_e2(mesh, 2, {5, 2}));
    CHECK(s.cost == Rational(1016));
    CHECK(s.v1 == Rational(1000));
    CHECK(s.v2 == Rational(16));
}

TEST_CASE("solutions respect capacities and hard zero boundaries") {
    MeshNetwork mesh = build_mesh();
    for (int n : {1, 2, 3}) {
        Problem p = build_problem_e2(mesh, n, {3, 3});
        Solution s = solve(p);
        for (int t = 0; t < n; ++t) {
            for (ArcId a = 0; a < mesh.net.arc_count(); ++a) {
                const Interval& dom = p.arc_costs[p.st_arc_index(t, a)].domain();
                CHECK(dom.contains(s.flow.at(t, a)));
            }
            for (NodeId v = 0; v < mesh.net.node_count(); ++v) {
                if (p.hard_zero[p.st_node_index(t, v)]) CHECK(s.bound.at(t, v) == 0);
            }
        }
        CHECK(s.optimal);
    }
}

TEST_CASE("re-solving returns the same cost and certifies optimality") {
    MeshNetwork mesh = build_mesh();
    Problem p = build_problem_e2(mesh, 3, {5, 2});
    Solution first = solve(p);
    Solution second = solve(p);
    CHECK(first.cost == second.cost);
    CHECK(first.flow == second.flow);  // fully deterministic pipeline
    CHECK(second.optimal);
}

TEST_CASE("iteration limit reports instead of returning a bad flow") {
    MeshNetwork mesh = build_mesh();
    Problem p = build_problem_e1(mesh, 1, {1, 0}, {-1, 0});
    SolveOptions opts;
    opts.max_iterations = 0;
    try {
        solve(p, opts);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == "iteration_limit");
    }
}

TEST_CASE("hard zero set must stay on routers") {
    Problem p = path_problem(Interval::between(-1, 1), {});
    p.hard_zero[0] = 1;  // node 0 is a source
    CHECK_THROWS_AS(validate(p), Error);
}

namespace {

// Exhaustive minimum over every flow in the capacity box; independent of
// the reduction and the cycle-canceling loop.
std::optional<Rational> brute_force_cost(const Problem& p) {
    const int n = p.horizon.unit_times();
    const int arcs = p.net.arc_count();
    const int cells = n * arcs;
    SpatioTemporalFlow u(n, arcs);
    std::optional<Rational> best;
    auto recurse = [&](auto&& self, int cell) -> void {
        if (cell == cells) {
            auto value = evaluate_flow(p, u);
            if (value && (!best || *value < *best)) best = *value;
            return;
        }
        const Interval& dom = p.arc_costs[cell].domain();
        for (Int x = dom.lo; x <= dom.hi; ++x) {
            u.at(cell / arcs, cell % arcs) = x;
            self(self, cell + 1);
        }
    };
    recurse(recurse, 0);
    return best;
}

}  // namespace

TEST_CASE("solver equals brute force on random small non-mesh problems") {
    std::mt19937 rng(47);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<Int> beta(0, 2);
    std::uniform_int_distribution<Int> small(-2, 2);
    int checked = 0;
    for (int trial = 0; trial < 120 && checked < 40; ++trial) {
        Network net = ppr_test::random_network(rng, 4, 4);
        if (net.arc_count() > 4) continue;
        const int n = 1 + coin(rng);
        if (n * net.arc_count() > 8) continue;

        Problem p;
        p.net = net;
        p.horizon = TimeHorizon(n);
        for (int t = 0; t < n; ++t) {
            for (ArcId a = 0; a < net.arc_count(); ++a) {
                Interval caps = coin(rng) ? Interval::between(-1, 1) : Interval::between(0, 1);
                p.arc_costs.push_back(ConvexCost::absolute_value(Rational(beta(rng)), caps));
            }
        }
        p.node_costs.time_count = n;
        p.node_costs.static_node_count = net.node_count();
        bool pin_routers = coin(rng) != 0;
        p.hard_zero.assign(size_t(n) * net.node_count(), 0);

        std::vector<std::int32_t> externals;
        for (NodeId v = 0; v < net.node_count(); ++v) {
            if (net.kind(v) == NodeKind::Router) {
                if (pin_routers) {
                    for (int t = 0; t < n; ++t) p.hard_zero[p.st_node_index(t, v)] = 1;
                } else if (coin(rng)) {
                    // a router-group cost over this router's timeline
                    NodeSet set;
                    for (int t = 0; t < n; ++t) set.push_back(p.st_node_index(t, v));
                    p.node_costs.members.push_back(
                        {make_node_set(std::move(set)),
                         ConvexCost::deviation(Rational(2), small(rng))});
                }
            } else {
                externals.push_back(v);
            }
        }
        for (std::int32_t v : externals) {
            if (!coin(rng)) continue;
            NodeSet set;
            for (int t = 0; t < n; ++t) set.push_back(p.st_node_index(t, v));
            p.node_costs.members.push_back(
                {make_node_set(std::move(set)), ConvexCost::deviation(Rational(5), small(rng))});
        }
        if (externals.size() >= 2 && coin(rng)) {
            // an enclosing group over every external timeline
            NodeSet set;
            for (std::int32_t v : externals) {
                for (int t = 0; t < n; ++t) set.push_back(p.st_node_index(t, v));
            }
            p.node_costs.members.push_back(
                {make_node_set(std::move(set)),
                 ConvexCost::absolute_value(Rational(3))});
        }

        auto expected = brute_force_cost(p);
        REQUIRE(expected);  // the zero flow is always feasible here
        Solution s = solve(p);
        CHECK(s.cost == *expected);
        CHECK(s.optimal);
        ++checked;
    }
    CHECK(checked == 40);
}
