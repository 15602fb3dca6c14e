#include "iptree/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace iptree {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(child(path, key), "missing field");
    return *it;
}

void check_schema(const json& j, const std::string& path) {
    const json& v = require(j, "schema", path);
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
        throw SchemaError(child(path, "schema"), "unsupported schema version (expected 1)");
    }
}

MassFunction mass_from_json(const json& j, std::size_t k, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of probabilities");
    if (j.size() != k) throw SchemaError(path, "expected " + std::to_string(k) + " probabilities");
    std::vector<double> w;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError(child(path, i), "expected a number");
        w.push_back(j[i].get<double>());
    }
    try {
        return MassFunction(std::move(w));
    } catch (const InvalidInput& e) {
        throw SchemaError(path, e.what());
    }
}

CredalSet credal_from_json(const json& j, std::size_t k, const std::string& path) {
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of extreme points");
    std::vector<MassFunction> points;
    for (std::size_t i = 0; i < j.size(); ++i) points.push_back(mass_from_json(j[i], k, child(path, i)));
    return CredalSet(std::move(points));
}

json credal_to_json(const CredalSet& c) {
    json out = json::array();
    for (const auto& p : c.points()) {
        json row = json::array();
        for (double w : p.weights()) row.push_back(w);
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

json number(double x) {
    if (std::isnan(x)) throw InvalidInput("refusing to serialize NaN");
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    return x;
}

json to_json(ExtendedReal x) { return number(x.value()); }

ExtendedReal extended_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "+inf" || s == "inf") return ExtendedReal::pos_inf();
        if (s == "-inf") return ExtendedReal::neg_inf();
    }
    throw SchemaError(path, "expected a number, \"+inf\" or \"-inf\"");
}

json to_json(const ApproxResult& r) {
    json iterates = json::array();
    for (const auto& it : r.iterates) iterates.push_back(json::array({it.horizon, number(it.value)}));
    json out;
    out["value"] = to_json(r.value);
    out["converged"] = r.converged;
    out["stop_reason"] = to_string(r.stop_reason);
    out["converged_at"] = r.converged_at;
    out["iterates"] = std::move(iterates);
    return out;
}

json to_json(const Situation& s, const StateSpace& space) {
    json out = json::array();
    for (auto x : s) out.push_back(space.label(x));
    return out;
}

Situation situation_from_json(const json& j, const StateSpace& space, const std::string& path) {
    try {
        if (j.is_string()) return parse_situation(j.get<std::string>(), space);
        if (j.is_array()) {
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (!j[i].is_string()) throw SchemaError(child(path, i), "expected a state label");
                labels.push_back(j[i].get<std::string>());
            }
            return situation_from_labels(labels, space);
        }
    } catch (const InvalidInput& e) {
        throw SchemaError(path, e.what());
    }
    throw SchemaError(path, "expected a situation (array of labels or comma-separated string)");
}

ImpreciseTree model_from_json(const json& j) {
    check_schema(j, "");
    const json& states = require(j, "states", "");
    if (!states.is_array() || states.empty()) throw SchemaError("/states", "expected a non-empty array of labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!states[i].is_string()) throw SchemaError(child("/states", i), "expected a string label");
        labels.push_back(states[i].get<std::string>());
    }
    StateSpace space = [&] {
        try {
            return StateSpace(std::move(labels));
        } catch (const InvalidInput& e) {
            throw SchemaError("/states", e.what());
        }
    }();
    const std::size_t k = space.size();
    const json& model = require(j, "model", "");
    const json& kind = require(model, "kind", "/model");
    if (!kind.is_string()) throw SchemaError("/model/kind", "expected a string");
    const std::string name = kind.get<std::string>();
    if (name == "homogeneous") {
        return ImpreciseTree::homogeneous(space, credal_from_json(require(model, "extreme_points", "/model"), k,
                                                                  "/model/extreme_points"));
    }
    if (name == "markov") {
        Markov<CredalSet> m{credal_from_json(require(model, "initial", "/model"), k, "/model/initial"), {}};
        const json& transitions = require(model, "transitions", "/model");
        if (!transitions.is_object()) throw SchemaError("/model/transitions", "expected an object keyed by state label");
        for (std::size_t x = 0; x < k; ++x) {
            const std::string& label = space.label(static_cast<StateIndex>(x));
            m.by_last_state.push_back(
                credal_from_json(require(transitions, label, "/model/transitions"), k, "/model/transitions/" + label));
        }
        for (const auto& [label, _] : transitions.items()) {
            if (!space.find(label)) throw SchemaError("/model/transitions/" + label, "unknown state label");
        }
        return ImpreciseTree(space, std::move(m));
    }
    if (name == "table") {
        const json& depth = require(model, "depth", "/model");
        if (!is_count(depth)) throw SchemaError("/model/depth", "expected a non-negative integer");
        Table<CredalSet> t{depth.get<std::size_t>(), {},
                           credal_from_json(require(model, "default", "/model"), k, "/model/default")};
        const json& entries = require(model, "entries", "/model");
        if (!entries.is_array()) throw SchemaError("/model/entries", "expected an array");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const std::string path = child("/model/entries", i);
            Situation s = situation_from_json(require(entries[i], "situation", path), space, path + "/situation");
            if (s.size() > t.depth) throw SchemaError(path + "/situation", "situation deeper than the table depth");
            CredalSet c = credal_from_json(require(entries[i], "extreme_points", path), k, path + "/extreme_points");
            if (!t.entries.emplace(std::move(s), std::move(c)).second) {
                throw SchemaError(path + "/situation", "duplicate entry");
            }
        }
        return ImpreciseTree(space, std::move(t));
    }
    throw SchemaError("/model/kind", "unknown model kind '" + name + "'");
}

json model_to_json(const ImpreciseTree& tree) {
    json out;
    out["schema"] = kSchemaVersion;
    out["states"] = tree.states().labels();
    json model;
    const auto& a = tree.assignment();
    if (auto* h = std::get_if<Homogeneous<CredalSet>>(&a)) {
        model["kind"] = "homogeneous";
        model["extreme_points"] = credal_to_json(h->model);
    } else if (auto* m = std::get_if<Markov<CredalSet>>(&a)) {
        model["kind"] = "markov";
        model["initial"] = credal_to_json(m->initial);
        json transitions = json::object();
        for (std::size_t x = 0; x < m->by_last_state.size(); ++x) {
            transitions[tree.states().label(static_cast<StateIndex>(x))] = credal_to_json(m->by_last_state[x]);
        }
        model["transitions"] = std::move(transitions);
    } else {
        const auto& t = std::get<Table<CredalSet>>(a);
        model["kind"] = "table";
        model["depth"] = t.depth;
        json entries = json::array();
        for (const auto& [s, c] : t.entries) {
            entries.push_back({{"situation", format_situation(s, tree.states())}, {"extreme_points", credal_to_json(c)}});
        }
        model["entries"] = std::move(entries);
        model["default"] = credal_to_json(t.fallback);
    }
    out["model"] = std::move(model);
    return out;
}

json load_json(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw InvalidInput("cannot open '" + file + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON in '") + file + "': " + e.what());
    }
}

ImpreciseTree load_model(const std::string& file) { return model_from_json(load_json(file)); }

CertificateDocument certificate_from_json(const json& j, const StateSpace& space) {
    check_schema(j, "");
    const json& depth_node = require(j, "depth", "");
    if (!is_count(depth_node)) throw SchemaError("/depth", "expected a non-negative integer");
    const std::size_t depth = depth_node.get<std::size_t>();
    const std::size_t k = space.size();
    const json& lb = require(j, "lower_bound", "");
    if (!lb.is_number()) throw SchemaError("/lower_bound", "expected a number");
    const json& table = require(j, "table", "");
    if (!table.is_object()) throw SchemaError("/table", "expected an object keyed by situation");

    std::vector<std::vector<ExtendedReal>> levels(depth + 1);
    std::vector<std::vector<bool>> seen(depth + 1);
    for (std::size_t m = 0; m <= depth; ++m) {
        const std::size_t count = checked_power(k, m, TailConstantProcess::kDefaultEntryCap);
        levels[m].resize(count);
        seen[m].assign(count, false);
    }
    for (const auto& [key, value] : table.items()) {
        const std::string path = "/table/" + key;
        Situation s;
        try {
            s = parse_situation(key, space);
        } catch (const InvalidInput& e) {
            throw SchemaError(path, e.what());
        }
        if (s.size() > depth) throw SchemaError(path, "situation deeper than the declared depth");
        const std::size_t i = string_index(s.states(), k);
        levels[s.size()][i] = extended_from_json(value, path);
        seen[s.size()][i] = true;
    }
    for (std::size_t m = 0; m <= depth; ++m) {
        for (std::size_t i = 0; i < seen[m].size(); ++i) {
            if (!seen[m][i]) {
                throw SchemaError("/table/" + format_situation(string_at(i, m, k), space), "missing entry");
            }
        }
    }
    std::optional<std::string> expr;
    if (auto it = j.find("expr"); it != j.end()) {
        if (!it->is_string()) throw SchemaError("/expr", "expected a string");
        expr = it->get<std::string>();
    }
    std::optional<Situation> situation;
    if (auto it = j.find("situation"); it != j.end()) situation = situation_from_json(*it, space, "/situation");
    try {
        TailConstantProcess process(k, std::move(levels), situation.value_or(Situation{}));
        const double declared = lb.get<double>();
        if (process.lower_bound() < declared) {
            throw SchemaError("/lower_bound", "declared lower bound exceeds the smallest table value");
        }
        return {std::move(process), declared, std::move(expr), std::move(situation)};
    } catch (const InvalidInput& e) {
        throw SchemaError("/table", e.what());
    }
}

json certificate_to_json(const TailConstantProcess& m, const StateSpace& space, const std::optional<std::string>& expr,
                         const std::optional<Situation>& situation) {
    json out;
    out["schema"] = kSchemaVersion;
    out["depth"] = m.depth();
    out["lower_bound"] = m.lower_bound();
    if (expr) out["expr"] = *expr;
    if (situation) out["situation"] = format_situation(*situation, space);
    json table = json::object();
    for (std::size_t level = 0; level <= m.depth(); ++level) {
        for (std::size_t i = 0; i < m.levels()[level].size(); ++i) {
            table[format_situation(string_at(i, level, m.arity()), space)] = to_json(m.levels()[level][i]);
        }
    }
    out["table"] = std::move(table);
    return out;
}

json to_json(const VerifyReport& r, const StateSpace& space) {
    json violations = json::array();
    for (const auto& v : r.violations) {
        violations.push_back({{"situation", to_json(v.situation, space)},
                              {"value", to_json(v.value)},
                              {"local_upper", to_json(v.local_upper)},
                              {"slack", number(v.slack)}});
    }
    json out;
    out["pass"] = r.pass;
    out["checked"] = r.checked;
    out["max_slack"] = number(r.max_slack);
    out["min_slack"] = number(r.min_slack);
    out["violations"] = std::move(violations);
    return out;
}

json to_json(const AxiomReport& r) {
    json violations = json::array();
    for (const auto& v : r.violations) {
        violations.push_back({{"axiom", v.axiom}, {"witness", v.witness}, {"lhs", number(v.lhs)}, {"rhs", number(v.rhs)}});
    }
    json out;
    out["pass"] = r.ok();
    out["checks"] = r.checks;
    out["violations"] = std::move(violations);
    return out;
}

}  // namespace iptree
