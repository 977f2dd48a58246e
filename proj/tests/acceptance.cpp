// Acceptance suite: runs every shipping criterion and prints one PASS/FAIL
// line per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace ppr;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

struct SolvedInstance {
    Problem problem;
    Solution solution;
};

std::vector<SolvedInstance> g_solved;

Solution solve_and_record(const Problem& p) {
    Solution s = solve(p);
    g_solved.push_back({p, s});
    return s;
}

struct TableCase {
    const char* label;
    int n;
    std::vector<Int> a;
    std::vector<Int> b;
    Int expected;
};

const std::vector<TableCase>& table1() {
    static const std::vector<TableCase> rows = {
        {"(0,0|0,0)", 1, {0, 0}, {0, 0}, 0},    {"(1,0|-1,0)", 1, {1, 0}, {-1, 0}, 2},
        {"(1,1|-1,-1)", 1, {1, 1}, {-1, -1}, 4}, {"(1,1|0,-2)", 1, {1, 1}, {0, -2}, 6},
        {"(2,1|-1,-2)", 1, {2, 1}, {-1, -2}, 8}, {"(2,1|-2,-1)", 1, {2, 1}, {-2, -1}, 8}};
    return rows;
}

const std::vector<TableCase>& table2() {
    static const std::vector<TableCase> rows = {
        {"(3,3)", 2, {3, 3}, {}, 16}, {"(3,3)", 3, {3, 3}, {}, 12}, {"(3,3)", 5, {3, 3}, {}, 12},
        {"(5,2)", 2, {5, 2}, {}, 1016}, {"(5,2)", 3, {5, 2}, {}, 18}, {"(5,2)", 5, {5, 2}, {}, 14}};
    return rows;
}

const std::vector<TableCase>& table3() {
    static const std::vector<TableCase> rows = {
        {"U=6", 2, {6}, {}, 16}, {"U=6", 3, {6}, {}, 12}, {"U=6", 5, {6}, {}, 12},
        {"U=7", 2, {7}, {}, 1016}, {"U=7", 3, {7}, {}, 16}, {"U=7", 5, {7}, {}, 14}};
    return rows;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool check_budget(std::string& detail, double elapsed, double budget) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " [%.2fs, budget %.0fs]", elapsed, budget);
    detail += buf;
    return elapsed < budget;
}

// Rebuilds the full circulation flow implied by a solution (attachment arcs
// carry the negated boundary, member arcs the aggregated group boundary)
// and re-runs the certificate from scratch.
bool independently_certified(const Problem& p, const Solution& s) {
    ReducedCirculation rc = reduce(p);
    std::vector<Int> flow(rc.arcs.size(), 0);
    for (const ReducedArc& a : rc.arcs) {
        size_t idx = &a - rc.arcs.data();
        switch (a.origin) {
            case ArcOrigin::StArc: {
                int t = a.origin_index / p.net.arc_count();
                int arc = a.origin_index % p.net.arc_count();
                flow[idx] = s.flow.at(t, arc);
                break;
            }
            case ArcOrigin::Attachment: {
                int t = a.origin_index / p.net.node_count();
                int v = a.origin_index % p.net.node_count();
                flow[idx] = -s.bound.at(t, v);
                break;
            }
            case ArcOrigin::TreeMember: {
                Int agg = 0;
                for (std::int32_t id : p.node_costs.members[a.origin_index].set) {
                    agg += s.bound.at(id / p.net.node_count(), id % p.net.node_count());
                }
                flow[idx] = agg;
                break;
            }
        }
    }
    return verify_optimality(rc, flow);
}

bool criterion_layout_gate(std::string& detail) {
    MeshNetwork mesh = build_mesh();
    for (const TableCase& c : table1()) {
        Rational got = oracle_cost(build_problem_e1(mesh, c.n, c.a, c.b));
        if (got != Rational(c.expected)) {
            detail = std::string("oracle disagrees at ") + c.label + ": got " + got.to_string();
            return false;
        }
    }
    detail = "oracle alone reproduces all six single-step costs";
    return true;
}

bool criterion_table1(std::string& detail) {
    MeshNetwork mesh = build_mesh();
    auto start = std::chrono::steady_clock::now();
    for (const TableCase& c : table1()) {
        Solution s = solve_and_record(build_problem_e1(mesh, c.n, c.a, c.b));
        if (s.cost != Rational(c.expected) || !s.optimal) {
            detail = std::string("mismatch at ") + c.label + ": got " + s.cost.to_string() +
                     ", expected " + std::to_string(c.expected);
            return false;
        }
    }
    detail = "costs 0, 2, 4, 6, 8, 8 exact";
    return check_budget(detail, seconds_since(start), 1.0);
}

bool criterion_table2(std::string& detail) {
    MeshNetwork mesh = build_mesh();
    auto start = std::chrono::steady_clock::now();
    for (const TableCase& c : table2()) {
        Solution s = solve_and_record(build_problem_e2(mesh, c.n, c.a));
        if (s.cost != Rational(c.expected) || !s.optimal) {
            detail = std::string("mismatch at N=") + std::to_string(c.n) + " " + c.label +
                     ": got " + s.cost.to_string();
            return false;
        }
    }
    detail = "costs 16, 12, 12, 1016, 18, 14 exact";
    return check_budget(detail, seconds_since(start), 10.0);
}

bool criterion_table3(std::string& detail) {
    MeshNetwork mesh = build_mesh();
    auto start = std::chrono::steady_clock::now();
    for (const TableCase& c : table3()) {
        Solution s = solve_and_record(build_problem_e3(mesh, c.n, c.a[0]));
        if (s.cost != Rational(c.expected) || !s.optimal) {
            detail = std::string("mismatch at N=") + std::to_string(c.n) + " " + c.label +
                     ": got " + s.cost.to_string();
            return false;
        }
    }
    detail = "costs 16, 12, 12, 1016, 16, 14 exact";
    return check_budget(detail, seconds_since(start), 10.0);
}

bool criterion_oracle_equivalence(std::string& detail) {
    MeshNetwork mesh = build_mesh();
    auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(2026);
    std::uniform_int_distribution<Int> e1_target(-3, 3);
    std::uniform_int_distribution<Int> demand(0, 6);
    std::uniform_int_distribution<int> horizon(1, 3);
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        Int s1 = e1_target(rng), s2 = e1_target(rng), d1 = e1_target(rng);
        Problem e1 = build_problem_e1(mesh, horizon(rng), {s1, s2}, {d1, -(s1 + s2 + d1)});
        Problem e2 = build_problem_e2(mesh, horizon(rng), {demand(rng), demand(rng)});
        Problem e3 = build_problem_e3(mesh, horizon(rng), demand(rng));
        for (const Problem& p : {e1, e2, e3}) {
            Solution s = solve_and_record(p);
            Rational reference = oracle_cost(p);
            if (s.cost != reference) {
                detail = "instance " + std::to_string(checked) + ": solver " +
                         s.cost.to_string() + " != oracle " + reference.to_string();
                return false;
            }
            ++checked;
        }
    }
    detail = std::to_string(checked) + " randomized instances match the oracle exactly";
    return check_budget(detail, seconds_since(start), 300.0);
}

bool criterion_telescoping(std::string& detail) {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        Network net = ppr_test::random_network(rng);
        SpatioTemporalFlow u = ppr_test::random_flow(rng, 1 + trial % 4, net.arc_count());
        BoundaryTable b = boundary(net, u);
        Int total = 0;
        for (Int v : b.values()) total += v;
        if (total != 0) {
            detail = "telescoping failed on trial " + std::to_string(trial);
            return false;
        }
    }
    detail = "sum of boundaries is zero on 100 random flows";
    return true;
}

bool criterion_midpoint_convexity(std::string& detail) {
    std::vector<ConvexCost> costs = {
        ConvexCost::affine(Rational(5, 3)),
        ConvexCost::affine(Rational(-7), Interval::between(-20, 20)),
        ConvexCost::absolute_value(Rational(2)),
        ConvexCost::absolute_value(Rational(1, 2), Interval::between(-30, 10)),
        ConvexCost::deviation(Rational(1000), 6),
        ConvexCost::deviation(Rational(3, 7), -11),
        ConvexCost::indicator(0, 0),
        ConvexCost::indicator(-17, 4),
        ConvexCost::piecewise_linear({-3, 0, 4}, {Rational(-5), Rational(-1), Rational(0),
                                                  Rational(9, 2)}, Rational(2)),
        ConvexCost::piecewise_linear({}, {Rational(1, 6)}, Rational(-3)),
    };
    for (size_t i = 0; i < costs.size(); ++i) {
        if (auto x = check_midpoint_convexity(costs[i], -50, 50)) {
            detail = "variant " + std::to_string(i) + " violated at x=" + std::to_string(*x);
            return false;
        }
    }
    detail = "all cost variants satisfy the inequality on [-50, 50]";
    return true;
}

bool criterion_tree_equivalence(std::string& detail) {
    std::mt19937 rng(103);
    std::uniform_int_distribution<Int> delta(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        ppr_test::RandomLaminar r = ppr_test::random_laminar(rng, 4 + trial % 3, 4);
        validate_laminar(r.spec, r.net);
        CostTree tree = build_cost_tree(r.spec);
        for (int rep = 0; rep < 6; ++rep) {
            BoundaryTable du(1, r.spec.static_node_count);
            Int sum = 0;
            for (int v = 1; v < r.spec.static_node_count; ++v) {
                du.at(0, v) = delta(rng);
                sum += du.at(0, v);
            }
            du.at(0, 0) = -sum;
            if (eval_laminar(r.spec, du) != ppr_test::tree_flow_cost(r.spec, tree, du)) {
                detail = "divergence on spec " + std::to_string(trial);
                return false;
            }
        }
    }
    detail = "tree route equals direct evaluation on 50 random specs";
    return true;
}

bool criterion_m_exchange(std::string& detail) {
    std::mt19937 rng(107);
    int instances = 0;
    while (instances < 20) {
        const int ground = 3 + instances % 2;
        ppr_test::RandomLaminar r = ppr_test::random_laminar(rng, ground, 2);
        for (int v = 1; v <= ground; ++v) {
            r.spec.members.push_back({{std::int32_t(v)}, ConvexCost::indicator(-2, 2)});
        }
        validate_laminar(r.spec, r.net);
        const int dims = r.spec.static_node_count;
        std::vector<BoundaryTable> domain;
        std::vector<Int> point(dims, 0);
        auto enumerate = [&](auto&& self, int i, Int sum) -> void {
            if (i == dims) {
                if (sum != 0) return;
                BoundaryTable du(1, dims);
                for (int v = 0; v < dims; ++v) du.at(0, v) = point[v];
                if (eval_laminar(r.spec, du)) domain.push_back(du);
                return;
            }
            for (Int x = -2; x <= 2; ++x) {
                point[i] = x;
                self(self, i + 1, sum + x);
            }
        };
        enumerate(enumerate, 0, 0);
        if (domain.size() < 2) continue;
        ++instances;
        std::uniform_int_distribution<size_t> pick(0, domain.size() - 1);
        for (int rep = 0; rep < 25; ++rep) {
            const BoundaryTable& x = domain[pick(rng)];
            const BoundaryTable& y = domain[pick(rng)];
            for (int i = 0; i < dims; ++i) {
                if (x.at(0, i) <= y.at(0, i)) continue;
                bool exchanged = false;
                for (int j = 0; j < dims && !exchanged; ++j) {
                    if (x.at(0, j) >= y.at(0, j)) continue;
                    BoundaryTable xe = x, ye = y;
                    xe.at(0, i) -= 1;
                    xe.at(0, j) += 1;
                    ye.at(0, i) += 1;
                    ye.at(0, j) -= 1;
                    auto fx = eval_laminar(r.spec, xe);
                    auto fy = eval_laminar(r.spec, ye);
                    if (fx && fy &&
                        *fx + *fy <= *eval_laminar(r.spec, x) + *eval_laminar(r.spec, y)) {
                        exchanged = true;
                    }
                }
                if (!exchanged) {
                    detail = "exchange axiom failed on instance " + std::to_string(instances);
                    return false;
                }
            }
        }
    }
    detail = "exchange axiom holds on 20 random laminar instances";
    return true;
}

bool criterion_spm_round_trip(std::string& detail) {
    std::mt19937 rng(109);
    for (int trial = 0; trial < 100; ++trial) {
        SpatioTemporalFlow u =
            ppr_test::random_flow(rng, 1 + trial % 4, 1 + trial % 6, 4);
        SymbolSet symbols = SymbolSet::successive_for(u);
        if (!(flow_from_spm(spm_from_flow(u, symbols), symbols) == u)) {
            detail = "round trip failed on trial " + std::to_string(trial);
            return false;
        }
    }
    detail = "flow -> matrix -> flow is the identity on 100 random flows";
    return true;
}

bool criterion_certificates(std::string& detail) {
    for (size_t i = 0; i < g_solved.size(); ++i) {
        const SolvedInstance& inst = g_solved[i];
        if (!inst.solution.optimal || !independently_certified(inst.problem, inst.solution)) {
            detail = "instance " + std::to_string(i) + " lacks a clean certificate";
            return false;
        }
    }
    detail = "no negative residual cycle in any of " + std::to_string(g_solved.size()) +
             " solved instances";
    return true;
}

bool criterion_router_conservation(std::string& detail) {
    for (size_t i = 0; i < g_solved.size(); ++i) {
        const SolvedInstance& inst = g_solved[i];
        const Problem& p = inst.problem;
        for (int t = 0; t < p.horizon.unit_times(); ++t) {
            for (NodeId v = 0; v < p.net.node_count(); ++v) {
                if (p.hard_zero[p.st_node_index(t, v)] && inst.solution.bound.at(t, v) != 0) {
                    detail = "instance " + std::to_string(i) + " violates du(t" +
                             std::to_string(t) + ", " + node_label(p.net, v) + ") = 0";
                    return false;
                }
            }
        }
    }
    detail = "hard zero boundaries hold in every solution";
    return true;
}

bool criterion_qualitative(std::string& detail) {
    MeshNetwork mesh = build_mesh();
    for (int n : {2, 3, 5}) {
        for (auto [d1, d2] : {std::pair<Int, Int>{3, 3}, {5, 2}}) {
            Rational split = solve_and_record(build_problem_e2(mesh, n, {d1, d2})).cost;
            Rational pooled = solve_and_record(build_problem_e3(mesh, n, d1 + d2)).cost;
            if (!(pooled <= split)) {
                detail = "pooled demand costs more at N=" + std::to_string(n);
                return false;
            }
        }
    }
    for (auto [d1, d2] : {std::pair<Int, Int>{3, 3}, {5, 2}}) {
        Rational prev;
        for (int n = 1; n <= 6; ++n) {
            Rational cost = solve_and_record(build_problem_e2(mesh, n, {d1, d2})).cost;
            if (n > 1 && !(cost <= prev)) {
                detail = "cost increased from N=" + std::to_string(n - 1) + " to N=" +
                         std::to_string(n);
                return false;
            }
            prev = cost;
        }
    }
    detail = "pooling never costs more; cost is nonincreasing in N on both demand profiles";
    return true;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"criterion 5: derived mesh layout reproduces table 1 via the oracle alone",
         criterion_layout_gate},
        {"criterion 1: table 1 reproduction (six E1 settings, exact, < 1 s)", criterion_table1},
        {"criterion 2: table 2 reproduction (six E2 settings, exact, < 10 s)", criterion_table2},
        {"criterion 3: table 3 reproduction (six E3 settings, exact, < 10 s)", criterion_table3},
        {"criterion 4: solver equals oracle on 25 randomized instances per family (< 5 min)",
         criterion_oracle_equivalence},
        {"criterion 6a: boundary telescopes to zero on 100 random flows", criterion_telescoping},
        {"criterion 6b: midpoint convexity for all cost variants on [-50, 50]",
         criterion_midpoint_convexity},
        {"criterion 6c: laminar tree evaluation equivalence on 50 random specs",
         criterion_tree_equivalence},
        {"criterion 6d: M-convex exchange axiom on 20 random laminar instances",
         criterion_m_exchange},
        {"criterion 6e: symbol matrix round trip on 100 random flows", criterion_spm_round_trip},
        {"criterion 6f: optimality certificate on every solved instance", criterion_certificates},
        {"criterion 6g: router conservation in every solution", criterion_router_conservation},
        {"criterion 7: pooling and horizon monotonicity", criterion_qualitative},
    };

    int failures = 0;
    for (Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        failures += ok ? 0 : 1;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.name;
        if (!detail.empty()) std::cout << " -- " << detail;
        std::cout << "\n";
    }
    std::cout << (failures == 0 ? "ACCEPTANCE OK" : "ACCEPTANCE FAILED") << " ("
              << (criteria.size() - failures) << "/" << criteria.size() << " criteria)\n";
    return failures;
}
