#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppr/errors.hpp"
#include "ppr/rational.hpp"

namespace ppr {

using NodeId = std::int32_t;
using ArcId = std::int32_t;

enum class NodeKind { Router, Source, Destination };

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Router: return "router";
        case NodeKind::Source: return "source";
        case NodeKind::Destination: return "destination";
    }
    return "?";
}

struct Arc {
    NodeId tail = 0;
    NodeId head = 0;
};

// Static directed network over routers, sources and destinations. The arc
// list is a multiset (parallel arcs allowed); self-loops are not. Adjacency
// is derived once at construction and never mutated.
class Network {
public:
    Network() = default;
    Network(std::vector<NodeKind> kinds, std::vector<Arc> arcs)
        : kinds_(std::move(kinds)), arcs_(std::move(arcs)) {
        out_.assign(kinds_.size(), {});
        in_.assign(kinds_.size(), {});
        for (ArcId a = 0; a < arc_count(); ++a) {
            NodeId t = arcs_[a].tail;
            NodeId h = arcs_[a].head;
            if (t < 0 || t >= node_count() || h < 0 || h >= node_count()) {
                fail("bad_arc", "arc " + std::to_string(a) + " references an unknown node");
            }
            out_[t].push_back(a);
            in_[h].push_back(a);
        }
    }

    int node_count() const { return static_cast<int>(kinds_.size()); }
    int arc_count() const { return static_cast<int>(arcs_.size()); }

    NodeKind kind(NodeId v) const { return kinds_[v]; }
    NodeId tail(ArcId a) const { return arcs_[a].tail; }
    NodeId head(ArcId a) const { return arcs_[a].head; }

    // delta+ / delta-: arcs leaving / entering v.
    const std::vector<ArcId>& out_arcs(NodeId v) const { return out_[v]; }
    const std::vector<ArcId>& in_arcs(NodeId v) const { return in_[v]; }

    int count_kind(NodeKind k) const {
        int n = 0;
        for (NodeKind x : kinds_) n += (x == k) ? 1 : 0;
        return n;
    }

private:
    std::vector<NodeKind> kinds_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<ArcId>> out_;
    std::vector<std::vector<ArcId>> in_;
};

inline void validate(const Network& net) {
    if (net.node_count() == 0) fail("empty_graph", "network has no nodes");
    for (ArcId a = 0; a < net.arc_count(); ++a) {
        if (net.tail(a) == net.head(a)) {
            fail("self_loop", "arc " + std::to_string(a) + " is a self-loop");
        }
    }
    if (net.count_kind(NodeKind::Router) == 0) {
        fail("no_router", "network has no router nodes");
    }
}

// v-th node of its kind: routers are r0, r1, ...; sources s1, s2, ...;
// destinations d1, d2, ....
inline std::string node_label(const Network& net, NodeId v) {
    int ordinal = 0;
    for (NodeId w = 0; w < v; ++w) {
        if (net.kind(w) == net.kind(v)) ++ordinal;
    }
    switch (net.kind(v)) {
        case NodeKind::Router: return "r" + std::to_string(ordinal);
        case NodeKind::Source: return "s" + std::to_string(ordinal + 1);
        case NodeKind::Destination: return "d" + std::to_string(ordinal + 1);
    }
    return "?";
}

class TimeHorizon {
public:
    explicit TimeHorizon(int unit_times) : n_(unit_times) {
        if (n_ < 1) fail("bad_horizon", "time horizon must contain at least one unit time");
    }
    int unit_times() const { return n_; }

private:
    int n_ = 1;
};

struct STNode {
    int time = 0;
    NodeId node = 0;
};

struct STArc {
    int time = 0;
    ArcId arc = 0;
};

// Dense integer table with one row per unit time. Used both for flows
// (columns = arcs) and for boundary/strain tables (columns = nodes).
class IntGrid {
public:
    IntGrid() = default;
    IntGrid(int times, int cols) : times_(times), cols_(cols), v_(size_t(times) * cols, 0) {}

    int times() const { return times_; }
    int cols() const { return cols_; }

    Int at(int t, int c) const { return v_[size_t(t) * cols_ + c]; }
    Int& at(int t, int c) { return v_[size_t(t) * cols_ + c]; }

    const std::vector<Int>& values() const { return v_; }

    friend bool operator==(const IntGrid& a, const IntGrid& b) {
        return a.times_ == b.times_ && a.cols_ == b.cols_ && a.v_ == b.v_;
    }

private:
    int times_ = 0;
    int cols_ = 0;
    std::vector<Int> v_;
};

// Integer flow on the time-expanded graph: one value per (unit time, arc),
// in energy units per unit time.
using SpatioTemporalFlow = IntGrid;
using BoundaryTable = IntGrid;

// Time-expanded copy of a network: N x |V| nodes and N x |A| arcs, with
// every arc staying inside its own time slice.
class ExpandedGraph {
public:
    ExpandedGraph(const Network& net, const TimeHorizon& horizon)
        : times_(horizon.unit_times()), nodes_(net.node_count()), arcs_(net.arc_count()) {
        tails_.reserve(arcs_);
        heads_.reserve(arcs_);
        for (ArcId a = 0; a < arcs_; ++a) {
            tails_.push_back(net.tail(a));
            heads_.push_back(net.head(a));
        }
    }

    int time_count() const { return times_; }
    int slice_node_count() const { return nodes_; }
    int slice_arc_count() const { return arcs_; }

    int node_count() const { return times_ * nodes_; }
    int arc_count() const { return times_ * arcs_; }

    int node_index(int time, NodeId v) const { return time * nodes_ + v; }
    int arc_index(int time, ArcId a) const { return time * arcs_ + a; }
    int node_index(const STNode& n) const { return node_index(n.time, n.node); }
    int arc_index(const STArc& a) const { return arc_index(a.time, a.arc); }

    STNode node_at(int index) const { return {index / nodes_, index % nodes_}; }
    STArc arc_at(int index) const { return {index / arcs_, index % arcs_}; }

    // Incidence preserves the time slice: (t, a) runs (t, tail a) -> (t, head a).
    int tail(int arc_idx) const {
        STArc a = arc_at(arc_idx);
        return node_index(a.time, tails_[a.arc]);
    }
    int head(int arc_idx) const {
        STArc a = arc_at(arc_idx);
        return node_index(a.time, heads_[a.arc]);
    }

private:
    int times_;
    int nodes_;
    int arcs_;
    std::vector<NodeId> tails_;
    std::vector<NodeId> heads_;
};

inline ExpandedGraph expand(const Network& net, const TimeHorizon& horizon) {
    validate(net);
    return ExpandedGraph(net, horizon);
}

// Boundary of a flow: du(t, v) = sum over arcs leaving v of u(t, a) minus
// sum over arcs entering v. Summed over all (t, v) this telescopes to zero.
inline BoundaryTable boundary(const Network& net, const SpatioTemporalFlow& u) {
    if (u.cols() != net.arc_count()) {
        fail("dimension_mismatch", "flow has " + std::to_string(u.cols()) +
                                       " arc columns, network has " +
                                       std::to_string(net.arc_count()) + " arcs");
    }
    BoundaryTable b(u.times(), net.node_count());
    for (int t = 0; t < u.times(); ++t) {
        for (NodeId v = 0; v < net.node_count(); ++v) {
            detail::Wide acc = 0;
            for (ArcId a : net.out_arcs(v)) acc += u.at(t, a);
            for (ArcId a : net.in_arcs(v)) acc -= u.at(t, a);
            b.at(t, v) = detail::narrow(acc, "boundary");
        }
    }
    return b;
}

// Stored-energy increment per spatio-temporal node: the negated boundary.
inline BoundaryTable strain(const Network& net, const SpatioTemporalFlow& u) {
    BoundaryTable b = boundary(net, u);
    for (int t = 0; t < b.times(); ++t) {
        for (int v = 0; v < b.cols(); ++v) b.at(t, v) = -b.at(t, v);
    }
    return b;
}

}  // namespace ppr
