#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ppr/errors.hpp"
#include "ppr/network.hpp"
#include "ppr/rational.hpp"

namespace ppr {

// Symbols partitioned into cells; each cell is one distinct power flow and
// symbols are identified by their position in the cell. Every symbol
// carries a positive energy. The optimizer's cell uses the successive
// integer energies 1, 2, ..., K.
class SymbolSet {
public:
    explicit SymbolSet(std::vector<std::vector<Rational>> cell_energies)
        : cells_(std::move(cell_energies)) {
        for (const auto& cell : cells_) {
            if (cell.empty()) fail("bad_symbols", "symbol cells must be nonempty");
            for (const Rational& e : cell) {
                if (e.sign() <= 0) fail("bad_symbols", "symbol energies must be positive");
            }
        }
    }

    // One cell with energies 1..k (k >= 1).
    static SymbolSet successive(int k) {
        if (k < 1) fail("bad_symbols", "successive symbol set needs k >= 1");
        std::vector<Rational> cell;
        cell.reserve(k);
        for (int i = 1; i <= k; ++i) cell.emplace_back(i);
        return SymbolSet({std::move(cell)});
    }

    // Smallest successive set that can represent every value of u.
    static SymbolSet successive_for(const SpatioTemporalFlow& u) {
        Int k = 1;
        for (Int v : u.values()) k = std::max(k, v < 0 ? -v : v);
        return successive(static_cast<int>(k));
    }

    int cell_count() const { return static_cast<int>(cells_.size()); }
    int size(int cell) const { return static_cast<int>(cells_[cell].size()); }
    const Rational& energy(int cell, int symbol) const { return cells_[cell][symbol]; }

    std::optional<int> symbol_with_energy(int cell, const Rational& e) const {
        const auto& c = cells_[cell];
        for (size_t i = 0; i < c.size(); ++i) {
            if (c[i] == e) return static_cast<int>(i);
        }
        return std::nullopt;
    }

    bool is_successive(int cell) const {
        for (int i = 0; i < size(cell); ++i) {
            if (energy(cell, i) != Rational(i + 1)) return false;
        }
        return true;
    }

private:
    std::vector<std::vector<Rational>> cells_;
};

struct SpmEntry {
    enum class Dir { Forward, Backward, Empty };
    Dir dir = Dir::Empty;
    int symbol = -1;  // index within the cell; -1 for the empty element

    friend bool operator==(const SpmEntry& a, const SpmEntry& b) {
        return a.dir == b.dir && a.symbol == b.symbol;
    }
};

// The symbol propagation matrix of one cell: for every (unit time, arc)
// either a forward symbol, a backward symbol, or the empty element.
class SymbolPropagationMatrix {
public:
    SymbolPropagationMatrix(int cell, int times, int arcs)
        : cell_(cell), times_(times), arcs_(arcs), entries_(size_t(times) * arcs) {}

    int cell() const { return cell_; }
    int times() const { return times_; }
    int arcs() const { return arcs_; }

    const SpmEntry& at(int t, int a) const { return entries_[size_t(t) * arcs_ + a]; }
    SpmEntry& at(int t, int a) { return entries_[size_t(t) * arcs_ + a]; }

    friend bool operator==(const SymbolPropagationMatrix& x, const SymbolPropagationMatrix& y) {
        return x.cell_ == y.cell_ && x.times_ == y.times_ && x.arcs_ == y.arcs_ &&
               x.entries_ == y.entries_;
    }

private:
    int cell_;
    int times_;
    int arcs_;
    std::vector<SpmEntry> entries_;
};

// u > 0 maps to the forward symbol of energy u, u < 0 to the backward
// symbol of energy -u, u == 0 to the empty element. At most one symbol per
// (unit time, arc): a doubled energy is carried by the single symbol of
// that doubled energy.
inline SymbolPropagationMatrix spm_from_flow(const SpatioTemporalFlow& u, const SymbolSet& symbols,
                                             int cell = 0) {
    SymbolPropagationMatrix spm(cell, u.times(), u.cols());
    for (int t = 0; t < u.times(); ++t) {
        for (int a = 0; a < u.cols(); ++a) {
            Int v = u.at(t, a);
            if (v == 0) continue;
            Rational energy(v < 0 ? -v : v);
            auto sym = symbols.symbol_with_energy(cell, energy);
            if (!sym) {
                fail("energy_not_representable",
                     "no symbol of energy " + energy.to_string() + " for flow at (t" +
                         std::to_string(t) + ", a" + std::to_string(a) + ")");
            }
            spm.at(t, a) = {v > 0 ? SpmEntry::Dir::Forward : SpmEntry::Dir::Backward, *sym};
        }
    }
    return spm;
}

inline SpatioTemporalFlow flow_from_spm(const SymbolPropagationMatrix& spm,
                                        const SymbolSet& symbols) {
    SpatioTemporalFlow u(spm.times(), spm.arcs());
    for (int t = 0; t < spm.times(); ++t) {
        for (int a = 0; a < spm.arcs(); ++a) {
            const SpmEntry& e = spm.at(t, a);
            if (e.dir == SpmEntry::Dir::Empty) continue;
            const Rational& energy = symbols.energy(spm.cell(), e.symbol);
            if (!energy.is_integer()) {
                fail("bad_symbols", "integer flow requires integer symbol energies");
            }
            u.at(t, a) = e.dir == SpmEntry::Dir::Forward ? energy.num() : -energy.num();
        }
    }
    return u;
}

inline std::string spm_entry_text(const SpmEntry& e) {
    switch (e.dir) {
        case SpmEntry::Dir::Forward: return "(s" + std::to_string(e.symbol + 1) + ",f)";
        case SpmEntry::Dir::Backward: return "(s" + std::to_string(e.symbol + 1) + ",b)";
        case SpmEntry::Dir::Empty: return "-";
    }
    return "?";
}

// Plain-text table, rows = arcs, columns = unit times. Entries render as
// (s<i>,f), (s<i>,b) or "-" for the empty element; s<i> is the i-th symbol
// of the cell (1-based).
inline std::string render(const SymbolPropagationMatrix& spm) {
    size_t label_width = 2 + std::to_string(std::max(0, spm.arcs() - 1)).size();
    size_t cell_width = 2 + std::to_string(std::max(1, spm.times() - 1)).size();
    for (int t = 0; t < spm.times(); ++t) {
        for (int a = 0; a < spm.arcs(); ++a) {
            cell_width = std::max(cell_width, spm_entry_text(spm.at(t, a)).size());
        }
    }
    std::ostringstream os;
    auto pad = [&os](const std::string& s, size_t w) {
        os << s;
        for (size_t i = s.size(); i < w + 2; ++i) os << ' ';
    };
    pad("", label_width);
    for (int t = 0; t < spm.times(); ++t) pad("t" + std::to_string(t), cell_width);
    os << '\n';
    for (int a = 0; a < spm.arcs(); ++a) {
        pad("a" + std::to_string(a), label_width);
        for (int t = 0; t < spm.times(); ++t) pad(spm_entry_text(spm.at(t, a)), cell_width);
        os << '\n';
    }
    return os.str();
}

}  // namespace ppr
