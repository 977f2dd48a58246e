#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppr/costs.hpp"
#include "ppr/errors.hpp"
#include "ppr/network.hpp"
#include "ppr/scenarios.hpp"
#include "ppr/solver.hpp"
#include "ppr/spm.hpp"

namespace ppr {

using nlohmann::json;

// Rationals in problem files are integers, "p/q" strings, or decimal
// strings; bare JSON floats are rejected so inputs stay exact.
inline Rational parse_rational(const json& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(j.get<Int>());
    if (j.is_number()) {
        fail("parse", where + ": write non-integer numbers as strings (e.g. \"1/2\" or \"0.5\")");
    }
    if (!j.is_string()) fail("parse", where + ": expected an integer or a string");
    std::string s = j.get<std::string>();
    if (s.empty()) fail("parse", where + ": empty number");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Int num = std::stoll(s.substr(0, slash));
            Int den = std::stoll(s.substr(slash + 1));
            return Rational(num, den);
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(std::stoll(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac = s.size() - dot - 1;
        if (frac == 0 || digits.empty()) fail("parse", where + ": malformed decimal");
        Int num = std::stoll(digits);
        Int den = 1;
        for (size_t i = 0; i < frac; ++i) {
            if (den > INT64_MAX / 10) fail("parse", where + ": too many decimals");
            den *= 10;
        }
        return Rational(num, den);
    } catch (const std::invalid_argument&) {
        fail("parse", where + ": malformed number '" + s + "'");
    } catch (const std::out_of_range&) {
        fail("parse", where + ": number out of range '" + s + "'");
    }
}

inline Int parse_bound(const json& j, bool is_lower, const std::string& where) {
    if (j.is_number_integer()) return j.get<Int>();
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "-inf") return Interval::kMinusInf;
        if (s == "+inf" || s == "inf") return Interval::kPlusInf;
        Rational r = parse_rational(j, where);
        if (!r.is_integer()) fail("parse", where + ": capacity bounds must be integers");
        return r.num();
    }
    if (j.is_null()) return is_lower ? Interval::kMinusInf : Interval::kPlusInf;
    fail("parse", where + ": expected an integer, \"-inf\" or \"+inf\"");
}

inline Int parse_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail("parse", where + ": expected an integer");
    return j.get<Int>();
}

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail("parse", where + ": missing \"" + key + "\"");
    return *it;
}

inline Interval parse_domain(const json& j, Interval base, const std::string& where) {
    Interval dom = base;
    if (j.contains("lo")) dom.lo = parse_bound(j.at("lo"), true, where + ".lo");
    if (j.contains("hi")) dom.hi = parse_bound(j.at("hi"), false, where + ".hi");
    if (dom.empty()) fail("parse", where + ": empty interval");
    return dom;
}

inline ConvexCost parse_cost(const json& j, const std::string& where) {
    std::string type = require(j, "type", where).get<std::string>();
    if (type == "deviation") {
        return ConvexCost::deviation(parse_rational(require(j, "coeff", where), where + ".coeff"),
                                     parse_int(require(j, "target", where), where + ".target"),
                                     parse_domain(j, Interval::all(), where));
    }
    if (type == "abs") {
        return ConvexCost::absolute_value(
            parse_rational(require(j, "coeff", where), where + ".coeff"),
            parse_domain(j, Interval::all(), where));
    }
    if (type == "affine") {
        return ConvexCost::affine(parse_rational(require(j, "slope", where), where + ".slope"),
                                  parse_domain(j, Interval::all(), where));
    }
    if (type == "indicator") {
        Interval dom = parse_domain(j, Interval::all(), where);
        return ConvexCost::indicator(dom.lo, dom.hi);
    }
    if (type == "pwl") {
        std::vector<Int> breakpoints;
        for (const json& b : require(j, "breakpoints", where)) {
            breakpoints.push_back(parse_int(b, where + ".breakpoints"));
        }
        std::vector<Rational> slopes;
        for (const json& s : require(j, "slopes", where)) {
            slopes.push_back(parse_rational(s, where + ".slopes"));
        }
        Rational anchor = j.contains("anchor_value")
                              ? parse_rational(j.at("anchor_value"), where + ".anchor_value")
                              : Rational(0);
        return ConvexCost::piecewise_linear(std::move(breakpoints), std::move(slopes), anchor,
                                            parse_domain(j, Interval::all(), where));
    }
    fail("parse", where + ": unknown cost type '" + type + "'");
}

inline Network parse_network(const json& j) {
    const json& nodes = require(j, "nodes", "network");
    const json& arcs = require(j, "arcs", "network");
    std::vector<NodeKind> kinds(nodes.size(), NodeKind::Router);
    std::vector<std::uint8_t> seen(nodes.size(), 0);
    for (const json& n : nodes) {
        Int id = parse_int(require(n, "id", "network.nodes"), "network.nodes.id");
        if (id < 0 || id >= static_cast<Int>(nodes.size()) || seen[id]) {
            fail("parse", "network node ids must be dense 0..n-1 without repeats");
        }
        seen[id] = 1;
        std::string kind = require(n, "kind", "network.nodes").get<std::string>();
        if (kind == "router") kinds[id] = NodeKind::Router;
        else if (kind == "source") kinds[id] = NodeKind::Source;
        else if (kind == "destination") kinds[id] = NodeKind::Destination;
        else fail("parse", "unknown node kind '" + kind + "'");
    }
    std::vector<Arc> arc_list(arcs.size());
    std::vector<std::uint8_t> seen_arc(arcs.size(), 0);
    for (const json& a : arcs) {
        Int id = parse_int(require(a, "id", "network.arcs"), "network.arcs.id");
        if (id < 0 || id >= static_cast<Int>(arcs.size()) || seen_arc[id]) {
            fail("parse", "network arc ids must be dense 0..m-1 without repeats");
        }
        seen_arc[id] = 1;
        arc_list[id].tail =
            static_cast<NodeId>(parse_int(require(a, "tail", "network.arcs"), "tail"));
        arc_list[id].head =
            static_cast<NodeId>(parse_int(require(a, "head", "network.arcs"), "head"));
    }
    return Network(std::move(kinds), std::move(arc_list));
}

inline NodeSet parse_node_set(const json& j, int unit_times, int node_count,
                              const std::string& where) {
    NodeSet set;
    auto add = [&](Int t, Int v) {
        if (t < 0 || t >= unit_times) fail("parse", where + ": unit time out of range");
        if (v < 0 || v >= node_count) fail("parse", where + ": node out of range");
        set.push_back(static_cast<std::int32_t>(t * node_count + v));
    };
    if (j.is_array()) {
        for (const json& e : j) {
            add(parse_int(require(e, "t", where), where + ".t"),
                parse_int(require(e, "node", where), where + ".node"));
        }
    } else if (j.is_object() && j.contains("all_t")) {
        Int v = parse_int(j.at("all_t"), where + ".all_t");
        for (int t = 0; t < unit_times; ++t) add(t, v);
    } else if (j.is_object() && j.contains("all_t_group")) {
        for (const json& v : j.at("all_t_group")) {
            Int node = parse_int(v, where + ".all_t_group");
            for (int t = 0; t < unit_times; ++t) add(t, node);
        }
    } else {
        fail("parse", where + ": expected [{t,node}...], {\"all_t\":v} or {\"all_t_group\":[v...]}");
    }
    return make_node_set(std::move(set));
}

inline Problem parse_scenario(const json& j) {
    std::string type = require(j, "type", "scenario").get<std::string>();
    std::transform(type.begin(), type.end(), type.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    int n = static_cast<int>(parse_int(require(j, "N", "scenario"), "scenario.N"));
    Rational penalty =
        j.contains("penalty") ? parse_rational(j.at("penalty"), "scenario.penalty") : Rational(1000);
    MeshNetwork mesh = build_mesh();
    if (type == "e1") {
        const json& u = require(j, "U1", "scenario");
        if (!u.is_array() || u.size() != 4) {
            fail("parse", "scenario.U1 must be [s1, s2, d1, d2]");
        }
        std::vector<Int> src{parse_int(u[0], "U1"), parse_int(u[1], "U1")};
        std::vector<Int> dst{parse_int(u[2], "U1"), parse_int(u[3], "U1")};
        return build_problem_e1(mesh, n, src, dst, penalty);
    }
    if (type == "e2") {
        const json& u = require(j, "U2", "scenario");
        if (!u.is_array() || u.size() != 2) fail("parse", "scenario.U2 must be [d1, d2]");
        return build_problem_e2(mesh, n, {parse_int(u[0], "U2"), parse_int(u[1], "U2")}, penalty);
    }
    if (type == "e3") {
        return build_problem_e3(mesh, n, parse_int(require(j, "U", "scenario"), "scenario.U"),
                                penalty);
    }
    if (type == "mesh3x3") {
        return mesh_problem_base(mesh, n);
    }
    fail("parse", "unknown scenario type '" + type + "'");
}

}  // namespace detail

// Parses a problem document. Either a "scenario" shorthand
// ({"type":"E1"|"E2"|"E3"|"mesh3x3", ...}) or the explicit sections
// network/horizon/arc_costs/node_costs/hard_zero_routers. A mesh3x3
// scenario may still carry node_costs and hard_zero_routers.
inline Problem parse_problem(const json& j) {
    if (!j.is_object()) fail("parse", "problem document must be a JSON object");
    Problem p;
    bool from_scenario = j.contains("scenario");
    if (from_scenario) {
        for (const char* key : {"network", "horizon", "arc_costs"}) {
            if (j.contains(key)) {
                fail("parse", std::string("\"") + key + "\" conflicts with \"scenario\"");
            }
        }
        p = detail::parse_scenario(j.at("scenario"));
        std::string type = detail::require(j.at("scenario"), "type", "scenario").get<std::string>();
        std::transform(type.begin(), type.end(), type.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (type != "mesh3x3") {
            if (j.contains("node_costs") || j.contains("hard_zero_routers")) {
                fail("parse", "only the mesh3x3 scenario accepts extra node_costs");
            }
            return p;
        }
    } else {
        p.net = detail::parse_network(detail::require(j, "network", "problem"));
        int n = static_cast<int>(
            parse_int(detail::require(detail::require(j, "horizon", "problem"), "N", "horizon"),
                      "horizon.N"));
        p.horizon = TimeHorizon(n);
        const json& arc_costs = detail::require(j, "arc_costs", "problem");
        std::vector<std::optional<ConvexCost>> per_arc(p.net.arc_count());
        for (const json& e : arc_costs) {
            Int a = parse_int(detail::require(e, "arc", "arc_costs"), "arc_costs.arc");
            if (a < 0 || a >= p.net.arc_count()) fail("parse", "arc_costs: arc out of range");
            if (per_arc[a]) fail("parse", "arc_costs: duplicate entry for arc " + std::to_string(a));
            Rational beta = parse_rational(detail::require(e, "beta", "arc_costs"), "beta");
            Interval dom;
            dom.lo = parse_bound(detail::require(e, "lo", "arc_costs"), true, "arc_costs.lo");
            dom.hi = parse_bound(detail::require(e, "hi", "arc_costs"), false, "arc_costs.hi");
            if (dom.empty()) fail("parse", "arc_costs: empty capacity interval");
            per_arc[a] = ConvexCost::absolute_value(beta, dom);
        }
        for (ArcId a = 0; a < p.net.arc_count(); ++a) {
            if (!per_arc[a]) fail("parse", "arc_costs: missing entry for arc " + std::to_string(a));
        }
        for (int t = 0; t < n; ++t) {
            for (ArcId a = 0; a < p.net.arc_count(); ++a) p.arc_costs.push_back(*per_arc[a]);
        }
        p.node_costs.time_count = n;
        p.node_costs.static_node_count = p.net.node_count();
        p.hard_zero.assign(size_t(n) * p.net.node_count(), 0);
    }

    if (j.contains("node_costs")) {
        const json& entries = j.at("node_costs");
        for (size_t i = 0; i < entries.size(); ++i) {
            std::string where = "node_costs[" + std::to_string(i) + "]";
            const json& e = entries[i];
            NodeSet set = detail::parse_node_set(detail::require(e, "set", where),
                                                 p.horizon.unit_times(), p.net.node_count(), where);
            ConvexCost cost = detail::parse_cost(detail::require(e, "cost", where), where + ".cost");
            p.node_costs.members.push_back({std::move(set), std::move(cost)});
        }
    }
    bool hard_zero = true;
    if (j.contains("hard_zero_routers")) {
        const json& hz = j.at("hard_zero_routers");
        if (!hz.is_boolean()) fail("parse", "hard_zero_routers must be a boolean");
        hard_zero = hz.get<bool>();
    }
    if (!from_scenario || j.contains("hard_zero_routers")) {
        for (int t = 0; t < p.horizon.unit_times(); ++t) {
            for (NodeId v = 0; v < p.net.node_count(); ++v) {
                p.hard_zero[p.st_node_index(t, v)] =
                    (hard_zero && p.net.kind(v) == NodeKind::Router) ? 1 : 0;
            }
        }
    }
    validate(p);
    return p;
}

inline json rational_to_json(const Rational& r) {
    if (r.is_integer()) return json(r.num());
    return json(r.to_string());
}

inline json spm_to_json(const SymbolPropagationMatrix& spm, const SymbolSet& symbols) {
    json rows = json::array();
    for (int a = 0; a < spm.arcs(); ++a) {
        json row = json::array();
        for (int t = 0; t < spm.times(); ++t) {
            const SpmEntry& e = spm.at(t, a);
            json cell;
            switch (e.dir) {
                case SpmEntry::Dir::Forward: cell["dir"] = "f"; break;
                case SpmEntry::Dir::Backward: cell["dir"] = "b"; break;
                case SpmEntry::Dir::Empty: cell["dir"] = "none"; break;
            }
            cell["energy"] = e.dir == SpmEntry::Dir::Empty
                                 ? json(0)
                                 : rational_to_json(symbols.energy(spm.cell(), e.symbol));
            row.push_back(std::move(cell));
        }
        rows.push_back(std::move(row));
    }
    return json{{"cell", spm.cell()},
                {"unit_times", spm.times()},
                {"arcs", spm.arcs()},
                {"entries", std::move(rows)}};
}

// Inverse of spm_to_json for integer energies; symbols are recovered from a
// successive symbol set covering the largest energy.
inline std::pair<SymbolPropagationMatrix, SymbolSet> spm_from_json(const json& j) {
    int cell = static_cast<int>(parse_int(detail::require(j, "cell", "spm"), "spm.cell"));
    int times = static_cast<int>(parse_int(detail::require(j, "unit_times", "spm"), "spm"));
    int arcs = static_cast<int>(parse_int(detail::require(j, "arcs", "spm"), "spm"));
    const json& rows = detail::require(j, "entries", "spm");
    Int max_energy = 1;
    for (const json& row : rows) {
        for (const json& e : row) {
            if (e.at("dir").get<std::string>() != "none") {
                max_energy = std::max(max_energy, parse_int(e.at("energy"), "spm.energy"));
            }
        }
    }
    SymbolSet symbols = SymbolSet::successive(static_cast<int>(max_energy));
    SymbolPropagationMatrix spm(cell, times, arcs);
    if (static_cast<int>(rows.size()) != arcs) fail("parse", "spm: wrong number of rows");
    for (int a = 0; a < arcs; ++a) {
        if (static_cast<int>(rows[a].size()) != times) fail("parse", "spm: wrong row length");
        for (int t = 0; t < times; ++t) {
            const json& e = rows[a][t];
            std::string dir = e.at("dir").get<std::string>();
            if (dir == "none") continue;
            Int energy = parse_int(e.at("energy"), "spm.energy");
            if (energy < 1 || energy > max_energy) fail("parse", "spm: energy out of range");
            spm.at(t, a) = {dir == "f" ? SpmEntry::Dir::Forward : SpmEntry::Dir::Backward,
                            static_cast<int>(energy - 1)};
        }
    }
    return {spm, symbols};
}

}  // namespace ppr
