#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qdet/checker.hpp"
#include "qdet/counterexample.hpp"
#include "qdet/evaluator.hpp"
#include "qdet/explain.hpp"
#include "qdet/formula.hpp"
#include "qdet/oracle.hpp"
#include "qdet/parser.hpp"
#include "qdet/solver.hpp"

namespace {

constexpr int kExitDetermined = 0;
constexpr int kExitNotDetermined = 1;
constexpr int kExitError = 2;

struct Loaded {
    qdet::Problem problem;
    qdet::NormalizedProblem normalized;
};

std::optional<Loaded> load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << "\n";
        return std::nullopt;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    qdet::SourceFile src{buffer.str(), path};
    qdet::ParseResult result = qdet::parse_problem(src);
    for (const auto& d : result.diagnostics) std::cerr << qdet::format_diagnostic(d, path) << "\n";
    if (!result.ok()) return std::nullopt;
    Loaded loaded;
    loaded.problem = std::move(*result.problem);
    loaded.normalized = qdet::normalize(loaded.problem);
    return loaded;
}

qdet::SolverConfig resolve_solver(const std::string& backend_flag, const std::string& cmd_flag,
                                  double time_limit) {
    qdet::SolverConfig cfg;
    cfg.time_limit_seconds = time_limit;
    std::string cmd = cmd_flag;
    if (cmd.empty()) {
        const char* env = std::getenv("QDET_SOLVER_CMD");
        if (env) cmd = env;
    }
    cfg.external_command = cmd;
    if (backend_flag == "builtin") {
        cfg.backend = qdet::SolverBackend::Builtin;
    } else if (backend_flag == "external") {
        cfg.backend = qdet::SolverBackend::External;
        if (cmd.empty())
            throw qdet::Error(qdet::ErrorCode::ExternalSolverFailure,
                              "--backend external needs --solver-cmd or QDET_SOLVER_CMD");
    } else {
        // no explicit backend: a configured command selects the external path
        cfg.backend = cmd.empty() ? qdet::SolverBackend::Builtin : qdet::SolverBackend::External;
    }
    return cfg;
}

void print_instance(const qdet::Instance& inst, const qdet::Schema& schema, const char* name) {
    std::cout << "  " << name << ":\n";
    for (const auto& rel : schema.relations) {
        std::cout << "    " << rel.name << " = {";
        bool first = true;
        for (const auto& t : inst.tuples_of(rel.name)) {
            std::cout << (first ? " " : ", ");
            first = false;
            bool first_cell = true;
            std::cout << "(";
            for (const auto& [col, val] : t.cells) {
                if (!first_cell) std::cout << ", ";
                first_cell = false;
                std::cout << col.column << "=" << qdet::to_string(val);
            }
            std::cout << ")";
        }
        std::cout << " }\n";
    }
}

int cmd_check(const std::string& path, bool json, bool all, const std::string& backend,
              const std::string& solver_cmd, double time_limit) {
    auto loaded = load_problem(path);
    if (!loaded) return kExitError;

    qdet::CheckOptions opts;
    opts.solver = resolve_solver(backend, solver_cmd, time_limit);
    opts.check_all = all;
    qdet::Verdict verdict = qdet::check_determinacy(loaded->normalized, opts);

    if (json) {
        std::cout << qdet::verdict_to_json(verdict, loaded->normalized).dump(2) << "\n";
    } else if (verdict.status == qdet::Verdict::Status::Determined) {
        std::cout << "DETERMINED: the views determine the query\n";
        for (const auto& c : verdict.per_relation)
            std::cout << "  " << loaded->normalized.schema.relation(c.relation).name << ": UNSAT ("
                      << c.seconds * 1000 << " ms)\n";
    } else {
        const auto& ce = *verdict.counterexample;
        std::cout << "NOT DETERMINED: failing relation "
                  << loaded->normalized.schema.relation(ce.k).name << " (index " << ce.k + 1
                  << ")\n";
        print_instance(ce.instance_i, loaded->normalized.schema, "I");
        print_instance(ce.instance_i_prime, loaded->normalized.schema, "I'");
        std::cout << "  row in Q(I') but not in Q(I): " << qdet::to_string(ce.witness_row) << "\n";
        for (const auto& c : verdict.per_relation)
            std::cout << "  " << loaded->normalized.schema.relation(c.relation).name << ": "
                      << (c.status == qdet::SatStatus::Sat ? "SAT" : "UNSAT") << " ("
                      << c.seconds * 1000 << " ms)\n";
    }
    return verdict.status == qdet::Verdict::Status::Determined ? kExitDetermined
                                                               : kExitNotDetermined;
}

int cmd_emit_smt(const std::string& path, const std::string& out_dir) {
    auto loaded = load_problem(path);
    if (!loaded) return kExitError;

    std::filesystem::path input(path);
    std::string stem = input.stem().string();
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    for (std::size_t i = 0; i < loaded->normalized.relation_count(); ++i) {
        qdet::Formula f = qdet::build_negated_star(loaded->normalized, i);
        std::filesystem::path file =
            dir / (stem + ".neg-star." + std::to_string(i + 1) + ".smt2");
        std::ofstream out(file);
        if (!out) {
            std::cerr << "error: cannot write " << file.string() << "\n";
            return kExitError;
        }
        out << qdet::emit_smtlib(f);
        std::cout << file.string() << "\n";
    }
    return 0;
}

int cmd_oracle(const std::string& path, std::size_t domain_size, std::size_t max_tuples,
               std::uint64_t budget, const std::string& mode_name) {
    auto loaded = load_problem(path);
    if (!loaded) return kExitError;

    qdet::OracleMode mode = qdet::OracleMode::Parallel;
    if (mode_name == "serial") mode = qdet::OracleMode::Serial;
    else if (mode_name == "reference") mode = qdet::OracleMode::Reference;

    qdet::OracleBounds bounds{domain_size, max_tuples, budget};
    qdet::OracleResult result = qdet::oracle_check(loaded->normalized, bounds, mode);
    if (result.determined_up_to_bounds) {
        std::cout << "DETERMINED_UP_TO_BOUNDS domain_size=" << domain_size
                  << " max_tuples=" << max_tuples << " instances=" << result.instances_enumerated
                  << "\n";
        return kExitDetermined;
    }

    const auto& [a, b] = *result.counterexample;
    qdet::Relation qa = qdet::eval_query(loaded->normalized.query, loaded->normalized.schema, a);
    qdet::Relation qb = qdet::eval_query(loaded->normalized.query, loaded->normalized.schema, b);
    nlohmann::json diff;
    for (const auto& row : qb)
        if (!qa.count(row)) {
            diff = {{"row", qdet::tuple_to_json(row, true)}, {"in", "instance_i_prime"}};
            break;
        }
    if (diff.is_null())
        for (const auto& row : qa)
            if (!qb.count(row)) {
                diff = {{"row", qdet::tuple_to_json(row, true)}, {"in", "instance_i"}};
                break;
            }

    nlohmann::json obj;
    obj["status"] = "NOT_DETERMINED";
    obj["domain_size"] = domain_size;
    obj["max_tuples"] = max_tuples;
    obj["instance_i"] = qdet::instance_to_json(a, loaded->normalized.schema);
    obj["instance_i_prime"] = qdet::instance_to_json(b, loaded->normalized.schema);
    obj["query_difference"] = diff;
    std::cout << obj.dump(2) << "\n";
    return kExitNotDetermined;
}

int cmd_explain(const std::string& path, bool latex) {
    auto loaded = load_problem(path);
    if (!loaded) return kExitError;
    std::cout << qdet::render_conditions(loaded->normalized, latex);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdet: decides whether project-select views determine a "
                 "project-select-join query, and synthesizes counterexamples when they do not"};
    app.require_subcommand(1);

    std::string path;
    bool json = false, all = false, latex = false;
    std::string backend, solver_cmd;
    double time_limit = 60.0;
    std::string out_dir = ".";
    std::size_t domain_size = 2, max_tuples = 2;
    std::uint64_t budget = 500000;
    std::string mode = "parallel";

    auto* check = app.add_subcommand("check", "decide determinacy");
    check->add_option("file", path, ".qdet problem file")->required();
    check->add_flag("--json", json, "emit the verdict as JSON");
    check->add_flag("--all", all, "solve every relation instead of stopping at the first failure");
    check->add_option("--backend", backend, "builtin|external")
        ->check(CLI::IsMember({"builtin", "external"}));
    check->add_option("--solver-cmd", solver_cmd,
                      "external SMT solver command reading SMT-LIB2 on stdin (e.g. \"z3 -in\")");
    check->add_option("--time-limit", time_limit, "external solver time limit in seconds");

    auto* emit = app.add_subcommand("emit-smt", "write one SMT-LIB2 file per relation");
    emit->add_option("file", path, ".qdet problem file")->required();
    emit->add_option("-o,--out-dir", out_dir, "output directory (default: current)");

    auto* oracle = app.add_subcommand(
        "oracle", "brute-force determinacy check over bounded instances (testing aid)");
    oracle->add_option("file", path, ".qdet problem file")->required();
    oracle->add_option("--domain-size", domain_size, "distinct values per sort")->required();
    oracle->add_option("--max-tuples", max_tuples, "max tuples per relation")->required();
    oracle->add_option("--budget", budget, "max candidate instances to enumerate");
    oracle->add_option("--mode", mode, "parallel|serial|reference")
        ->check(CLI::IsMember({"parallel", "serial", "reference"}));

    auto* explain = app.add_subcommand("explain", "print the per-relation conditions");
    explain->add_option("file", path, ".qdet problem file")->required();
    explain->add_flag("--latex", latex, "render math-mode text");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(path, json, all, backend, solver_cmd, time_limit);
        if (emit->parsed()) return cmd_emit_smt(path, out_dir);
        if (oracle->parsed()) return cmd_oracle(path, domain_size, max_tuples, budget, mode);
        if (explain->parsed()) return cmd_explain(path, latex);
    } catch (const qdet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
