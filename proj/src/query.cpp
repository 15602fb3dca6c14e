#include "iptree/query.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "iptree/expression.hpp"
#include "iptree/measure_oracle.hpp"
#include "iptree/properties.hpp"
#include "iptree/sampling.hpp"

namespace iptree {

namespace {

class QueryContext {
public:
    QueryContext(const std::optional<ImpreciseTree>& model, const json& query, std::size_t index, const RunOptions& options)
        : model_(model), q_(query), base_("/queries/" + std::to_string(index)), options_(options) {}

    json run();

private:
    std::string path(const std::string& key) const { return base_ + "/" + key; }

    const ImpreciseTree& tree() const {
        if (!model_) throw InvalidInput("this query kind needs a model (--model or a \"model\" field in the query file)");
        return *model_;
    }
    bool has(const std::string& key) const { return q_.contains(key); }

    std::string string_field(const std::string& key) const {
        if (!has(key)) throw SchemaError(path(key), "missing field");
        if (!q_[key].is_string()) throw SchemaError(path(key), "expected a string");
        return q_[key].get<std::string>();
    }
    std::size_t count_field(const std::string& key, std::size_t fallback) const {
        if (!has(key)) return fallback;
        if (!is_count(q_[key])) throw SchemaError(path(key), "expected a non-negative integer");
        return q_[key].get<std::size_t>();
    }
    double positive_field(const json& obj, const std::string& key, double fallback, const std::string& where) const {
        if (!obj.contains(key)) return fallback;
        if (!obj[key].is_number() || !(obj[key].get<double>() > 0)) throw SchemaError(where + "/" + key, "expected a positive number");
        return obj[key].get<double>();
    }
    std::uint64_t seed() const {
        if (!has("seed")) return options_.seed;
        if (!is_count(q_["seed"])) throw SchemaError(path("seed"), "expected a non-negative integer");
        return q_["seed"].get<std::uint64_t>();
    }

    ApproxPolicy policy() const;
    std::size_t cell_cap() const;
    std::size_t selection_cap() const;
    Situation situation(const StateSpace& space) const {
        return has("situation") ? situation_from_json(q_["situation"], space, path("situation")) : Situation{};
    }
    std::vector<StateIndex> targets(const json& j, const std::string& where) const;
    FinitaryGamble gamble(const std::string& source) const;

    json eval(bool with_upper);
    json hitting(bool time);
    json verify_cert();
    json oracle_check();
    json axiom_suite();

    const std::optional<ImpreciseTree>& model_;
    const json& q_;
    std::string base_;
    const RunOptions& options_;
};

ApproxPolicy QueryContext::policy() const {
    ApproxPolicy p = options_.policy;
    if (!has("policy")) return p;
    const json& pol = q_["policy"];
    const std::string where = path("policy");
    if (!pol.is_object()) throw SchemaError(where, "expected an object");
    p.tol = positive_field(pol, "tol", p.tol, where);
    p.divergence_threshold = positive_field(pol, "divergence_threshold", p.divergence_threshold, where);
    if (pol.contains("max_horizon")) {
        if (!is_count(pol["max_horizon"]) || pol["max_horizon"].get<std::size_t>() == 0) {
            throw SchemaError(where + "/max_horizon", "expected a positive integer");
        }
        p.max_horizon = pol["max_horizon"].get<std::size_t>();
    }
    return p;
}

std::size_t QueryContext::cell_cap() const {
    if (has("policy") && q_["policy"].contains("cell_cap")) {
        const json& c = q_["policy"]["cell_cap"];
        if (!is_count(c) || c.get<std::size_t>() == 0) throw SchemaError(path("policy/cell_cap"), "expected a positive integer");
        return c.get<std::size_t>();
    }
    return options_.cell_cap;
}

std::size_t QueryContext::selection_cap() const {
    if (has("policy") && q_["policy"].contains("selection_cap")) {
        const json& c = q_["policy"]["selection_cap"];
        if (!is_count(c) || c.get<std::size_t>() == 0) {
            throw SchemaError(path("policy/selection_cap"), "expected a positive integer");
        }
        return c.get<std::size_t>();
    }
    return options_.selection_cap;
}

std::vector<StateIndex> QueryContext::targets(const json& j, const std::string& where) const {
    const StateSpace& space = tree().states();
    std::vector<StateIndex> out;
    auto add = [&](const json& label, const std::string& at) {
        if (!label.is_string()) throw SchemaError(at, "expected a state label");
        auto x = space.find(label.get<std::string>());
        if (!x) throw SchemaError(at, "unknown state label '" + label.get<std::string>() + "'");
        out.push_back(*x);
    };
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) add(j[i], where + "/" + std::to_string(i));
    } else {
        add(j, where);
    }
    if (out.empty()) throw SchemaError(where, "target set is empty");
    return out;
}

FinitaryGamble QueryContext::gamble(const std::string& source) const {
    const GambleExpr expr = parse_gamble(source, tree().states());
    std::optional<std::size_t> depth;
    if (has("depth")) {
        depth = count_field("depth", 0);
        if (*depth < expr.depth()) {
            throw SchemaError(path("depth"), "depth " + std::to_string(*depth) + " is below the expression's depth " +
                                                 std::to_string(expr.depth()));
        }
    }
    return compile(expr, depth, cell_cap());
}

json QueryContext::eval(bool with_upper) {
    const FinitaryGamble f = gamble(string_field("expr"));
    const Situation s = situation(tree().states());
    json out;
    out["depth"] = f.depth();
    if (with_upper) out["upper"] = number(finitary_upper(tree(), f, s));
    out["lower"] = number(finitary_lower(tree(), f, s));
    return out;
}

json QueryContext::hitting(bool time) {
    const ImpreciseTree& t = tree();
    const Situation s = situation(t.states());
    const ApproxPolicy pol = policy();
    json out;
    auto approx = [&](const ApproxResult& up, const ApproxResult& low) {
        out["upper"] = to_json(up.value);
        out["lower"] = to_json(low.value);
        out["converged"] = up.converged && low.converged;
        out["upper_detail"] = to_json(up);
        out["lower_detail"] = to_json(low);
    };
    if (time) {
        const LimitVariable v = LimitVariable::hitting_time(t.arity(), targets(q_.value("target", json()), path("target")));
        approx(limit_upper(t, v, s, pol), limit_lower(t, v, s, pol));
        return out;
    }
    EventSpec event = HittingEvent{};
    if (has("event")) {
        const json& e = q_["event"];
        const std::string where = path("event");
        if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string()) throw SchemaError(where + "/kind", "expected an event kind");
        const std::string kind = e["kind"].get<std::string>();
        if (kind == "cylinder") {
            if (!e.contains("situation")) throw SchemaError(where + "/situation", "missing field");
            event = CylinderEvent{situation_from_json(e["situation"], t.states(), where + "/situation")};
        } else if (kind == "union") {
            if (!e.contains("depth") || !is_count(e["depth"])) throw SchemaError(where + "/depth", "expected a non-negative integer");
            if (!e.contains("strings") || !e["strings"].is_array()) throw SchemaError(where + "/strings", "expected an array");
            UnionAtDepth u{e["depth"].get<std::size_t>(), {}};
            for (std::size_t i = 0; i < e["strings"].size(); ++i) {
                u.strings.push_back(situation_from_json(e["strings"][i], t.states(), where + "/strings/" + std::to_string(i)));
            }
            event = std::move(u);
        } else if (kind == "hitting") {
            if (!e.contains("targets")) throw SchemaError(where + "/targets", "missing field");
            event = HittingEvent{targets(e["targets"], where + "/targets")};
        } else {
            throw SchemaError(where + "/kind", "unknown event kind '" + kind + "'");
        }
    } else {
        if (!has("target")) throw SchemaError(path("target"), "missing field");
        event = HittingEvent{targets(q_["target"], path("target"))};
    }
    const ProbabilityResult up = upper_probability(t, event, s, pol);
    const ProbabilityResult low = lower_probability(t, event, s, pol);
    if (std::holds_alternative<double>(up)) {
        out["upper"] = number(std::get<double>(up));
        out["lower"] = number(std::get<double>(low));
    } else {
        approx(std::get<ApproxResult>(up), std::get<ApproxResult>(low));
    }
    return out;
}

json QueryContext::verify_cert() {
    const ImpreciseTree& t = tree();
    json doc;
    std::string where;
    if (has("certificate")) {
        doc = q_["certificate"];
        where = path("certificate");
    } else if (has("certificate_file")) {
        doc = load_json(string_field("certificate_file"));
    } else {
        throw SchemaError(path("certificate"), "missing field (or certificate_file)");
    }
    std::optional<CertificateDocument> cert;
    try {
        cert.emplace(certificate_from_json(doc, t.states()));
    } catch (const SchemaError& e) {
        throw SchemaError(where + (e.path() == "/" ? "" : e.path()), e.message());
    }
    json out;
    const VerifyReport report = verify(cert->process, t);
    out["verification"] = to_json(report, t.states());
    std::optional<std::string> expr = cert->expr;
    if (has("expr")) expr = string_field("expr");
    if (!expr) {
        out["valid"] = report.pass;
        return out;
    }
    const Situation s = has("situation") ? situation(t.states()) : cert->situation.value_or(Situation{});
    const FinitaryGamble f = gamble(*expr);
    const Certificate c = certified_upper_bound(cert->process, f, t, s);
    json failures = json::array();
    for (const auto& z : c.domination_failures) failures.push_back(to_json(z, t.states()));
    out["valid"] = c.valid;
    out["situation"] = to_json(s, t.states());
    out["bound"] = to_json(c.bound);
    out["engine_value"] = number(c.engine_value);
    out["domination_failures"] = std::move(failures);
    return out;
}

json QueryContext::oracle_check() {
    const double tolerance = has("tolerance") ? positive_field(q_, "tolerance", 1e-9, base_) : 1e-9;
    const std::size_t cap = selection_cap();
    json out;
    if (has("expr")) {
        const ImpreciseTree& t = tree();
        const FinitaryGamble f = gamble(string_field("expr"));
        const Situation s = situation(t.states());
        const EnvelopeResult env = envelope_sup(t, f, s, EnvelopeMethod::Enumerate, cap);
        const double rec = finitary_upper(t, f, s);
        json argmax = json::object();
        for (const auto& [point, index] : env.argmax) argmax[format_situation(point, t.states())] = index;
        json per = json::array();
        for (double v : env.per_selection) per.push_back(number(v));
        out["pass"] = std::abs(env.value - rec) <= tolerance;
        out["enumerate"] = number(env.value);
        out["recursion"] = number(rec);
        out["abs_diff"] = number(std::abs(env.value - rec));
        out["selections"] = env.selections;
        out["argmax"] = std::move(argmax);
        out["per_selection"] = std::move(per);
        return out;
    }
    const std::size_t trials = count_field("trials", 50);
    const std::size_t depth = std::max<std::size_t>(1, count_field("depth", 3));
    Sampler sampler(seed());
    double worst = 0.0;
    json failures = json::array();
    for (std::size_t i = 0; i < trials; ++i) {
        std::optional<OracleInstance> inst;
        if (model_) {
            const std::size_t d = 1 + sampler.index(depth);
            FinitaryGamble f = sampler.gamble(model_->arity(), d);
            Situation s = fitting_situation(sampler, *model_, d, cap);
            inst.emplace(OracleInstance{*model_, std::move(f), std::move(s)});
        } else {
            inst.emplace(sample_oracle_instance(sampler, 3, depth, 3, cap));
        }
        const double env = envelope_sup(inst->tree, inst->gamble, inst->situation, EnvelopeMethod::Enumerate, cap).value;
        const double rec = finitary_upper(inst->tree, inst->gamble, inst->situation);
        const double diff = std::abs(env - rec);
        worst = std::max(worst, diff);
        if (diff > tolerance) {
            failures.push_back({{"trial", i}, {"enumerate", number(env)}, {"recursion", number(rec)}, {"abs_diff", number(diff)}});
        }
    }
    out["pass"] = failures.empty();
    out["trials"] = trials;
    out["max_abs_diff"] = number(worst);
    out["failures"] = std::move(failures);
    return out;
}

json QueryContext::axiom_suite() {
    const std::size_t trials = std::max<std::size_t>(2, count_field("trials", 100));
    const std::size_t depth = count_field("depth", 3);
    Sampler sampler(seed());
    std::vector<ImpreciseTree> trees;
    if (model_) {
        trees.push_back(*model_);
    } else {
        for (int i = 0; i < 4; ++i) trees.push_back(sampler.any_tree(Sampler::space(2 + sampler.index(2)), depth, 3));
    }
    AxiomReport c, e, p, v;
    for (const auto& t : trees) {
        const std::size_t k = t.arity();
        for (const auto& credal : t.distinct_models()) {
            std::vector<std::vector<double>> locals;
            std::vector<LocalGamble> extended;
            for (std::size_t i = 0; i < trials; ++i) locals.push_back(sampler.local_gamble(k));
            for (std::size_t i = 0; i < trials; ++i) extended.push_back(sampler.extended_gamble(k));
            c.merge(check_axioms_c(credal, locals));
            e.merge(check_axioms_e(credal, extended));
        }
        std::vector<FinitaryGamble> gambles;
        std::vector<Situation> situations;
        for (std::size_t i = 0; i < std::max<std::size_t>(2, trials / 20); ++i) {
            gambles.push_back(sampler.gamble(k, sampler.index(depth + 1)));
        }
        for (int i = 0; i < 3; ++i) situations.push_back(sampler.situation(k, depth + 1));
        p.merge(check_properties_p(t, engine_upper(t), gambles, situations));
        v.merge(check_properties_v(engine_upper(t), gambles, situations));
    }
    json out;
    out["pass"] = c.ok() && e.ok() && p.ok() && v.ok();
    out["suites"] = {{"C", to_json(c)}, {"E", to_json(e)}, {"P", to_json(p)}, {"V", to_json(v)}};
    return out;
}

json QueryContext::run() {
    if (!q_.is_object()) throw SchemaError(base_, "expected a query object");
    const std::string kind = string_field("kind");
    if (kind == "eval") return eval(true);
    if (kind == "lower") return eval(false);
    if (kind == "hit_prob") return hitting(false);
    if (kind == "hit_time") return hitting(true);
    if (kind == "verify_cert") return verify_cert();
    if (kind == "oracle_check") return oracle_check();
    if (kind == "axiom_suite") return axiom_suite();
    throw SchemaError(path("kind"), "unknown query kind '" + kind + "'");
}

json error_json(const std::exception& ex) {
    json err;
    if (auto* e = dynamic_cast<const SyntaxError*>(&ex)) {
        err["type"] = "syntax_error";
        err["line"] = e->line();
        err["column"] = e->column();
    } else if (auto* s = dynamic_cast<const SchemaError*>(&ex)) {
        err["type"] = "schema_error";
        err["path"] = s->path();
    } else if (auto* r = dynamic_cast<const ResourceLimit*>(&ex)) {
        err["type"] = "resource_limit";
        err["requested"] = r->requested();
        err["cap"] = r->cap();
    } else if (dynamic_cast<const InvalidInput*>(&ex)) {
        err["type"] = "invalid_input";
    } else {
        err["type"] = "internal_error";
    }
    err["message"] = ex.what();
    return err;
}

}  // namespace

json run_query(const std::optional<ImpreciseTree>& model, const json& query, std::size_t index, const RunOptions& options) {
    json record;
    record["index"] = index;
    record["kind"] = query.is_object() && query.contains("kind") && query["kind"].is_string() ? query["kind"] : json();
    record["input"] = query;
    const auto start = std::chrono::steady_clock::now();
    try {
        QueryContext ctx(model, query, index, options);
        json result = ctx.run();
        record["ok"] = true;
        record["result"] = std::move(result);
    } catch (const std::exception& ex) {
        record["ok"] = false;
        record["error"] = error_json(ex);
    }
    if (options.timing) {
        const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
        record["wall_time_ms"] = elapsed.count();
    }
    return record;
}

json run_queries(const std::optional<ImpreciseTree>& model, const json& queries, const RunOptions& options) {
    if (!queries.is_array()) throw SchemaError("/queries", "expected an array of queries");
    std::vector<json> records(queries.size());
    if (options.parallel && queries.size() > 1) {
        std::atomic<std::size_t> next{0};
        const std::size_t workers = std::min<std::size_t>(queries.size(), std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < queries.size(); i = next++) records[i] = run_query(model, queries[i], i, options);
            });
        }
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t i = 0; i < queries.size(); ++i) records[i] = run_query(model, queries[i], i, options);
    }
    std::size_t failed = 0;
    json results = json::array();
    for (auto& r : records) {
        if (!r["ok"].get<bool>()) ++failed;
        results.push_back(std::move(r));
    }
    json report;
    report["schema"] = kSchemaVersion;
    if (model) {
        const json m = model_to_json(*model);
        report["model"] = {{"states", m["states"]}, {"kind", m["model"]["kind"]}};
    } else {
        report["model"] = nullptr;
    }
    report["results"] = std::move(results);
    report["summary"] = {{"queries", queries.size()}, {"succeeded", queries.size() - failed}, {"failed", failed}};
    return report;
}

bool report_ok(const json& report) {
    if (!report.contains("results")) return false;
    for (const auto& r : report["results"]) {
        if (!r.value("ok", false)) return false;
    }
    return true;
}

std::string render_pretty(const json& report) {
    std::ostringstream os;
    auto scalar = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    };
    for (const auto& r : report["results"]) {
        os << '[' << r["index"].get<std::size_t>() << "] " << (r["kind"].is_string() ? r["kind"].get<std::string>() : "?");
        if (!r["ok"].get<bool>()) {
            os << "  ERROR " << r["error"]["type"].get<std::string>() << ": " << r["error"]["message"].get<std::string>() << '\n';
            continue;
        }
        for (const auto& [key, value] : r["result"].items()) {
            if (value.is_primitive()) os << "  " << key << '=' << scalar(value);
        }
        if (r.contains("wall_time_ms")) os << "  time_ms=" << r["wall_time_ms"].dump();
        os << '\n';
    }
    const auto& s = report["summary"];
    os << s["queries"].get<std::size_t>() << " queries, " << s["failed"].get<std::size_t>() << " failed\n";
    return os.str();
}

}  // namespace iptree
