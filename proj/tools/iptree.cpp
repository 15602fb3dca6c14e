// iptree: command-line front end for the imprecise-tree engine.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "iptree/expression.hpp"
#include "iptree/json_io.hpp"
#include "iptree/query.hpp"

namespace fs = std::filesystem;
using iptree::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 2;

struct Globals {
    std::string model_file;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::size_t max_horizon = 200;
    bool pretty = false;
    bool json_out = false;
    bool parallel = false;
    bool timing = false;
};

json error_report(const std::exception& ex) {
    json err;
    if (auto* s = dynamic_cast<const iptree::SchemaError*>(&ex)) {
        err = {{"type", "schema_error"}, {"path", s->path()}};
    } else if (dynamic_cast<const iptree::InvalidInput*>(&ex)) {
        err = {{"type", "invalid_input"}};
    } else {
        err = {{"type", "error"}};
    }
    err["message"] = ex.what();
    json report;
    report["schema"] = iptree::kSchemaVersion;
    report["error"] = std::move(err);
    return report;
}

void emit(const json& report, const Globals& g) {
    if (g.pretty && report.contains("results")) {
        std::cout << iptree::render_pretty(report);
    } else if (g.pretty) {
        std::cout << "ERROR " << report["error"]["message"].get<std::string>() << '\n';
    } else {
        std::cout << report.dump(2) << '\n';
    }
}

iptree::RunOptions run_options(const Globals& g) {
    iptree::RunOptions o;
    o.seed = g.seed;
    o.policy.tol = g.tol;
    o.policy.max_horizon = g.max_horizon;
    o.parallel = g.parallel;
    o.timing = g.timing;
    return o;
}

std::optional<iptree::ImpreciseTree> load_optional_model(const std::string& file) {
    if (file.empty()) return std::nullopt;
    return iptree::load_model(file);
}

int run_report(const std::optional<iptree::ImpreciseTree>& model, const json& queries, const Globals& g) {
    const json report = iptree::run_queries(model, queries, run_options(g));
    emit(report, g);
    return iptree::report_ok(report) ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Upper and lower expectations in imprecise probability trees"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;

    app.add_option("--model", g.model_file, "Model JSON file")->envname("IPTREE_MODEL");
    app.add_option("--seed", g.seed, "Seed for randomized suites")->envname("IPTREE_SEED");
    app.add_option("--tol", g.tol, "Stabilization tolerance for limit queries")->envname("IPTREE_TOL")->check(CLI::PositiveNumber);
    app.add_option("--max-horizon", g.max_horizon, "Horizon cap for limit queries")
        ->envname("IPTREE_MAX_HORIZON")
        ->check(CLI::PositiveNumber);
    auto* json_flag = app.add_flag("--json", g.json_out, "Emit the JSON report (default)");
    app.add_flag("--pretty", g.pretty, "Emit a plain-text summary")->envname("IPTREE_PRETTY")->excludes(json_flag);
    app.add_flag("--parallel", g.parallel, "Run independent queries concurrently")->envname("IPTREE_PARALLEL");
    app.add_flag("--timing", g.timing, "Include wall time per query (breaks byte-identical output)")
        ->envname("IPTREE_TIMING");

    // eval
    auto* eval = app.add_subcommand("eval", "Run a query file or a single inline query");
    std::string query_file, expr, kind = "eval", situation, target;
    std::optional<std::size_t> depth;
    eval->add_option("--query", query_file, "Query JSON file")->envname("IPTREE_QUERY");
    eval->add_option("--expr", expr, "Inline gamble expression");
    eval->add_option("--kind", kind, "Inline query kind")
        ->check(CLI::IsMember({"eval", "lower", "hit_prob", "hit_time", "oracle_check", "axiom_suite"}));
    eval->add_option("--situation", situation, "Conditioning situation, e.g. H,T");
    eval->add_option("--target", target, "Target states for hitting queries, e.g. T or H,T");
    eval->add_option("--depth", depth, "Compile depth override");

    // check
    auto* check = app.add_subcommand("check", "Run consistency suites");
    check->require_subcommand(1);
    check->fallthrough();
    std::size_t check_depth = 3, trials = 50;
    auto* axioms = check->add_subcommand("axioms", "Coherence and recursion property suites");
    auto* oracle = check->add_subcommand("oracle", "Compare the recursion with compatible-tree enumeration");
    auto* cert_check = check->add_subcommand("cert", "Verify a supermartingale certificate");
    for (auto* sub : {axioms, oracle}) {
        sub->add_option("--depth", check_depth, "Maximum gamble depth");
        sub->add_option("--trials", trials, "Number of random instances");
    }
    std::string cert_file;
    cert_check->add_option("certificate", cert_file, "Certificate JSON file")->required();
    cert_check->add_option("--expr", expr, "Gamble the certificate should bound");
    cert_check->add_option("--situation", situation, "Conditioning situation");

    // cert
    auto* cert = app.add_subcommand("cert", "Emit the canonical supermartingale certificate for a gamble");
    std::string output;
    cert->add_option("--expr", expr, "Gamble expression")->required();
    cert->add_option("--situation", situation, "Situation the certificate is for");
    cert->add_option("-o,--output", output, "Write the certificate here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*eval) {
            json queries = json::array();
            std::string model_file = g.model_file;
            if (!query_file.empty()) {
                const json doc = iptree::load_json(query_file);
                if (!doc.is_object()) throw iptree::SchemaError("", "expected a query file object");
                if (!doc.contains("schema") || doc["schema"] != iptree::kSchemaVersion) {
                    throw iptree::SchemaError("/schema", "unsupported schema version (expected 1)");
                }
                if (!doc.contains("queries")) throw iptree::SchemaError("/queries", "missing field");
                queries = doc["queries"];
                if (model_file.empty() && doc.contains("model")) {
                    if (!doc["model"].is_string()) throw iptree::SchemaError("/model", "expected a file path");
                    const fs::path ref = doc["model"].get<std::string>();
                    model_file = (ref.is_absolute() ? ref : fs::path(query_file).parent_path() / ref).string();
                }
            } else {
                json q = {{"kind", kind}};
                if (!expr.empty()) q["expr"] = expr;
                if (!situation.empty()) q["situation"] = situation;
                if (!target.empty()) q["target"] = iptree::split_labels(target);
                if (depth) q["depth"] = *depth;
                queries.push_back(std::move(q));
            }
            return run_report(load_optional_model(model_file), queries, g);
        }
        if (*check) {
            json q;
            if (*axioms || *oracle) {
                q = {{"kind", *axioms ? "axiom_suite" : "oracle_check"}, {"depth", check_depth}, {"trials", trials}};
            } else {
                q = {{"kind", "verify_cert"}, {"certificate_file", cert_file}};
                if (!expr.empty()) q["expr"] = expr;
                if (!situation.empty()) q["situation"] = situation;
            }
            return run_report(load_optional_model(g.model_file), json::array({q}), g);
        }
        if (*cert) {
            if (g.model_file.empty()) throw iptree::InvalidInput("cert needs --model");
            const iptree::ImpreciseTree tree = iptree::load_model(g.model_file);
            const iptree::FinitaryGamble f = iptree::compile(iptree::parse_gamble(expr, tree.states()));
            const iptree::Situation s = iptree::parse_situation(situation, tree.states());
            const iptree::TailConstantProcess m = iptree::canonical_supermartingale(tree, f, s);
            const json doc = iptree::certificate_to_json(m, tree.states(), expr, s);
            if (output.empty()) {
                std::cout << doc.dump(2) << '\n';
            } else {
                std::ofstream out(output);
                if (!out) throw iptree::InvalidInput("cannot write '" + output + "'");
                out << doc.dump(2) << '\n';
            }
            return kExitOk;
        }
    } catch (const std::exception& ex) {
        emit(error_report(ex), g);
        return kExitError;
    }
    return kExitError;
}
