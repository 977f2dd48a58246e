// Command line front end: problem ingestion, solving, reporting, export.

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppr/ppr.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;   // parse or validation failure
constexpr int kExitSolver = 2;  // reduction/solve failure
constexpr int kExitMismatch = 3;

void emit_error(const std::string& code, const std::string& message) {
    ppr::json err{{"error", code}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

ppr::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) ppr::fail("parse", "cannot open '" + path + "'");
    ppr::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        ppr::fail("parse", std::string("invalid JSON: ") + e.what());
    }
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) ppr::fail("io", "cannot write '" + path + "'");
    out << content;
}

struct TableRow {
    std::string scenario;
    int n;
    std::string targets;
    ppr::Int expected;
};

// The three published experiment tables.
const std::vector<TableRow>& table_rows() {
    static const std::vector<TableRow> rows = {
        {"E1", 1, "(0,0|0,0)", 0},     {"E1", 1, "(1,0|-1,0)", 2},
        {"E1", 1, "(1,1|-1,-1)", 4},   {"E1", 1, "(1,1|0,-2)", 6},
        {"E1", 1, "(2,1|-1,-2)", 8},   {"E1", 1, "(2,1|-2,-1)", 8},
        {"E2", 2, "(3,3)", 16},        {"E2", 3, "(3,3)", 12},
        {"E2", 5, "(3,3)", 12},        {"E2", 2, "(5,2)", 1016},
        {"E2", 3, "(5,2)", 18},        {"E2", 5, "(5,2)", 14},
        {"E3", 2, "6", 16},            {"E3", 3, "6", 12},
        {"E3", 5, "6", 12},            {"E3", 2, "7", 1016},
        {"E3", 3, "7", 16},            {"E3", 5, "7", 14},
    };
    return rows;
}

ppr::Problem table_problem(const ppr::MeshNetwork& mesh, const TableRow& row) {
    std::vector<ppr::Int> nums;
    std::string digits;
    for (char c : row.targets + ",") {
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') digits += c;
        else if (!digits.empty()) {
            nums.push_back(std::stoll(digits));
            digits.clear();
        }
    }
    if (row.scenario == "E1") return build_problem_e1(mesh, row.n, {nums[0], nums[1]}, {nums[2], nums[3]});
    if (row.scenario == "E2") return build_problem_e2(mesh, row.n, {nums[0], nums[1]});
    return build_problem_e3(mesh, row.n, nums[0]);
}

int cmd_solve(const std::string& path, const std::string& format, const std::string& dot_path,
              const std::string& spm_path, bool with_oracle, long long max_iters) {
    ppr::Problem problem;
    try {
        problem = ppr::parse_problem(load_json(path));
    } catch (const ppr::Error& e) {
        emit_error(e.code(), e.what());
        return kExitInput;
    }
    ppr::Solution solution;
    try {
        ppr::SolveOptions opts;
        opts.max_iterations = max_iters;
        solution = ppr::solve(problem, opts);
    } catch (const ppr::Error& e) {
        emit_error(e.code(), e.what());
        return kExitSolver;
    }
    if (format == "json") {
        std::cout << ppr::json_report(problem, solution).dump(2) << "\n";
    } else {
        std::cout << ppr::text_report(problem, solution);
    }
    try {
        if (!dot_path.empty()) write_file(dot_path, ppr::to_dot(problem.net, solution.flow));
        if (!spm_path.empty()) {
            ppr::SymbolSet symbols = ppr::SymbolSet::successive_for(solution.flow);
            write_file(spm_path,
                       ppr::spm_to_json(ppr::spm_from_flow(solution.flow, symbols), symbols)
                               .dump(2) +
                           "\n");
        }
    } catch (const ppr::Error& e) {
        emit_error(e.code(), e.what());
        return kExitInput;
    }
    if (with_oracle) {
        ppr::Rational reference;
        try {
            reference = ppr::oracle_cost(problem);
        } catch (const ppr::Error& e) {
            emit_error(e.code(), e.what());
            return kExitSolver;
        }
        if (reference != solution.cost) {
            emit_error("oracle_mismatch", "solver cost " + solution.cost.to_string() +
                                              " != oracle cost " + reference.to_string());
            return kExitMismatch;
        }
        std::cout << "oracle_cost: " << reference << " (match)\n";
    }
    return kExitOk;
}

int cmd_tables(const std::string& only, bool as_json) {
    ppr::MeshNetwork mesh = ppr::build_mesh();
    ppr::json results = ppr::json::array();
    std::ostringstream text;
    text << "scenario  N  targets       expected  computed  match\n";
    int mismatches = 0;
    for (const TableRow& row : table_rows()) {
        if (!only.empty() && only != row.scenario) continue;
        ppr::Solution s;
        try {
            s = ppr::solve(table_problem(mesh, row));
        } catch (const ppr::Error& e) {
            emit_error(e.code(), e.what());
            return kExitSolver;
        }
        bool match = s.cost == ppr::Rational(row.expected) && s.optimal;
        mismatches += match ? 0 : 1;
        results.push_back(ppr::json{{"scenario", row.scenario},
                                    {"N", row.n},
                                    {"targets", row.targets},
                                    {"expected", row.expected},
                                    {"computed", ppr::rational_to_json(s.cost)},
                                    {"match", match}});
        text << row.scenario << "        " << row.n << "  ";
        text << row.targets;
        for (size_t i = row.targets.size(); i < 14; ++i) text << ' ';
        std::string exp = std::to_string(row.expected);
        text << exp;
        for (size_t i = exp.size(); i < 10; ++i) text << ' ';
        std::string got = s.cost.to_string();
        text << got;
        for (size_t i = got.size(); i < 10; ++i) text << ' ';
        text << (match ? "yes" : "NO") << "\n";
    }
    size_t total = results.size();
    if (as_json) {
        std::cout << ppr::json{{"results", results},
                               {"matched", total - mismatches},
                               {"total", total}}
                         .dump(2)
                  << "\n";
    } else {
        text << (total - mismatches) << "/" << total << " match\n";
        std::cout << text.str();
    }
    if (mismatches > 0) {
        emit_error("table_mismatch", std::to_string(mismatches) + " configurations disagree");
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    try {
        ppr::Problem p = ppr::parse_problem(load_json(path));
        std::cout << "ok: " << p.net.node_count() << " nodes, " << p.net.arc_count()
                  << " arcs, N=" << p.horizon.unit_times() << ", "
                  << p.node_costs.members.size() << " node groups\n";
        return kExitOk;
    } catch (const ppr::Error& e) {
        emit_error(e.code(), e.what());
        return kExitInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"packetized power routing optimizer"};
    app.require_subcommand(1);

    std::string path, format = "text", dot_path, spm_path, only;
    bool with_oracle = false, tables_json = false;
    long long max_iters = 1'000'000;
    long long seed = 0;  // reserved; the pipeline is deterministic

    CLI::App* solve = app.add_subcommand("solve", "solve a problem file and print a report");
    solve->add_option("file", path, "problem JSON file")->required();
    solve->add_option("--format", format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    solve->add_option("--dot", dot_path, "write the flow as a DOT graph");
    solve->add_option("--spm", spm_path, "write the symbol propagation matrix as JSON");
    solve->add_flag("--oracle", with_oracle, "also run the exhaustive oracle and compare");
    solve->add_option("--seed", seed, "reserved");
    solve->add_option("--max-iters", max_iters, "augmentation limit");

    CLI::App* tables =
        app.add_subcommand("tables", "reproduce the published experiment tables");
    tables->add_option("--only", only, "e1|e2|e3")->check(CLI::IsMember({"e1", "e2", "e3"}));
    tables->add_flag("--json", tables_json, "machine-readable results");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a problem file");
    validate->add_option("file", path, "problem JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            return cmd_solve(path, format, dot_path, spm_path, with_oracle, max_iters);
        }
        if (tables->parsed()) {
            std::string upper = only;
            for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return cmd_tables(upper, tables_json);
        }
        return cmd_validate(path);
    } catch (const ppr::Error& e) {
        emit_error(e.code(), e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return kExitSolver;
    }
}
