#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppr/json_io.hpp"
#include "ppr/network.hpp"
#include "ppr/solver.hpp"
#include "ppr/spm.hpp"

namespace ppr {

namespace detail {

inline void pad_to(std::ostringstream& os, const std::string& s, size_t width) {
    os << s;
    for (size_t i = s.size(); i < width + 2; ++i) os << ' ';
}

inline std::string int_grid_table(const IntGrid& grid, const std::vector<std::string>& row_labels,
                                  const std::string& corner) {
    // Rows are the grid columns (arcs or nodes), columns are unit times.
    size_t label_width = corner.size();
    for (const std::string& s : row_labels) label_width = std::max(label_width, s.size());
    size_t cell_width = 2 + std::to_string(std::max(1, grid.times() - 1)).size();
    for (int t = 0; t < grid.times(); ++t) {
        for (int c = 0; c < grid.cols(); ++c) {
            cell_width = std::max(cell_width, std::to_string(grid.at(t, c)).size());
        }
    }
    std::ostringstream os;
    pad_to(os, corner, label_width);
    for (int t = 0; t < grid.times(); ++t) pad_to(os, "t" + std::to_string(t), cell_width);
    os << '\n';
    for (int c = 0; c < grid.cols(); ++c) {
        pad_to(os, row_labels[c], label_width);
        for (int t = 0; t < grid.times(); ++t) {
            pad_to(os, std::to_string(grid.at(t, c)), cell_width);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace detail

inline bool energy_not_represented(const Solution& s) {
    return (s.v1 + s.v3).sign() > 0;
}

inline std::string text_report(const Problem& p, const Solution& s) {
    std::ostringstream os;
    os << "total_cost: " << s.cost << '\n';
    os << "v1_cost: " << s.v1 << '\n';
    os << "v2_cost: " << s.v2 << '\n';
    os << "v3_cost: " << s.v3 << '\n';
    os << "optimal: " << (s.optimal ? "yes" : "no") << '\n';
    os << "iterations: " << s.iterations << '\n';
    if (energy_not_represented(s)) {
        os << "warning: given energy not represented (deviation > 0)\n";
    }
    std::vector<std::string> arc_labels;
    for (ArcId a = 0; a < p.net.arc_count(); ++a) {
        arc_labels.push_back("a" + std::to_string(a) + " " + node_label(p.net, p.net.tail(a)) +
                             "->" + node_label(p.net, p.net.head(a)));
    }
    os << "\nflow (rows: arcs, cols: unit times):\n";
    os << detail::int_grid_table(s.flow, arc_labels, "arc");
    std::vector<std::string> node_labels;
    for (NodeId v = 0; v < p.net.node_count(); ++v) node_labels.push_back(node_label(p.net, v));
    os << "\nboundary (rows: nodes, cols: unit times):\n";
    os << detail::int_grid_table(s.bound, node_labels, "node");
    SymbolSet symbols = SymbolSet::successive_for(s.flow);
    os << "\nspm (cell 0):\n";
    os << render(spm_from_flow(s.flow, symbols));
    return os.str();
}

inline json json_report(const Problem& p, const Solution& s) {
    json flow = json::array();
    json bound = json::array();
    for (int t = 0; t < s.flow.times(); ++t) {
        json row = json::array();
        for (int a = 0; a < s.flow.cols(); ++a) row.push_back(s.flow.at(t, a));
        flow.push_back(std::move(row));
    }
    for (int t = 0; t < s.bound.times(); ++t) {
        json row = json::array();
        for (int v = 0; v < s.bound.cols(); ++v) row.push_back(s.bound.at(t, v));
        bound.push_back(std::move(row));
    }
    SymbolSet symbols = SymbolSet::successive_for(s.flow);
    json warnings = json::array();
    if (energy_not_represented(s)) {
        warnings.push_back("given energy not represented (deviation > 0)");
    }
    json arcs = json::array();
    for (ArcId a = 0; a < p.net.arc_count(); ++a) {
        arcs.push_back(json{{"id", a},
                            {"tail", node_label(p.net, p.net.tail(a))},
                            {"head", node_label(p.net, p.net.head(a))}});
    }
    return json{{"unit_times", p.horizon.unit_times()},
                {"arcs", std::move(arcs)},
                {"total_cost", rational_to_json(s.cost)},
                {"v1_cost", rational_to_json(s.v1)},
                {"v2_cost", rational_to_json(s.v2)},
                {"v3_cost", rational_to_json(s.v3)},
                {"optimal", s.optimal},
                {"iterations", s.iterations},
                {"warnings", std::move(warnings)},
                {"flow", std::move(flow)},
                {"boundary", std::move(bound)},
                {"spm", spm_to_json(spm_from_flow(s.flow, symbols), symbols)}};
}

// Reads the "flow" table of a JSON report back into a flow for the given
// problem; used to re-validate reported solutions.
inline SpatioTemporalFlow flow_from_report(const json& report, const Problem& p) {
    const json& rows = report.at("flow");
    SpatioTemporalFlow u(p.horizon.unit_times(), p.net.arc_count());
    if (static_cast<int>(rows.size()) != u.times()) fail("parse", "report: wrong flow row count");
    for (int t = 0; t < u.times(); ++t) {
        if (static_cast<int>(rows[t].size()) != u.cols()) {
            fail("parse", "report: wrong flow row length");
        }
        for (int a = 0; a < u.cols(); ++a) u.at(t, a) = rows[t][a].get<Int>();
    }
    return u;
}

// J(u) for an arbitrary feasible flow of the problem; nullopt when u
// violates a capacity, a node-group domain, or a hard zero boundary.
inline std::optional<Rational> evaluate_flow(const Problem& p, const SpatioTemporalFlow& u) {
    Rational total(0);
    for (int t = 0; t < u.times(); ++t) {
        for (ArcId a = 0; a < p.net.arc_count(); ++a) {
            auto v = p.arc_costs[p.st_arc_index(t, a)].eval(u.at(t, a));
            if (!v) return std::nullopt;
            total += *v;
        }
    }
    BoundaryTable b = boundary(p.net, u);
    for (int t = 0; t < b.times(); ++t) {
        for (NodeId v = 0; v < p.net.node_count(); ++v) {
            if (p.hard_zero[p.st_node_index(t, v)] && b.at(t, v) != 0) return std::nullopt;
        }
    }
    auto groups = eval_laminar(p.node_costs, b);
    if (!groups) return std::nullopt;
    return total + *groups;
}

}  // namespace ppr
