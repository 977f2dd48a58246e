#pragma once

#include <sstream>
#include <string>

#include "ppr/network.hpp"

namespace ppr {

// Graphviz rendering of a spatio-temporal flow. Time slices are laid out as
// columns (one rank-constrained cluster per unit time); arcs carrying flow
// are bold and labeled with their value, idle arcs are drawn faintly.
inline std::string to_dot(const Network& net, const SpatioTemporalFlow& u,
                          const std::string& name = "flow") {
    std::ostringstream os;
    os << "digraph " << name << " {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=circle, fontsize=10, width=0.4];\n";
    for (int t = 0; t < u.times(); ++t) {
        os << "  subgraph cluster_t" << t << " {\n";
        os << "    label=\"t" << t << "\";\n";
        os << "    color=gray;\n";
        for (NodeId v = 0; v < net.node_count(); ++v) {
            os << "    \"t" << t << "_" << node_label(net, v) << "\" [label=\""
               << node_label(net, v) << "\"";
            if (net.kind(v) == NodeKind::Source) os << ", shape=invtriangle";
            if (net.kind(v) == NodeKind::Destination) os << ", shape=triangle";
            os << "];\n";
        }
        os << "  }\n";
    }
    for (int t = 0; t < u.times(); ++t) {
        for (ArcId a = 0; a < net.arc_count(); ++a) {
            std::string tail = "t" + std::to_string(t) + "_" + node_label(net, net.tail(a));
            std::string head = "t" + std::to_string(t) + "_" + node_label(net, net.head(a));
            Int v = u.at(t, a);
            os << "  \"" << tail << "\" -> \"" << head << "\"";
            if (v != 0) {
                os << " [label=\"" << v << "\", penwidth=2]";
            } else {
                os << " [color=gray80, arrowsize=0.5]";
            }
            os << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace ppr
