// Python bindings. Structured results cross the boundary as JSON text; the
// iptree package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "iptree/engine.hpp"
#include "iptree/errors.hpp"
#include "iptree/expression.hpp"
#include "iptree/json_io.hpp"
#include "iptree/measure_oracle.hpp"
#include "iptree/query.hpp"
#include "iptree/supermartingale.hpp"

namespace py = pybind11;
using namespace iptree;

namespace {

class PyModel {
public:
    explicit PyModel(ImpreciseTree tree) : tree_(std::move(tree)) {}

    static PyModel from_json_text(const std::string& text) { return PyModel(model_from_json(parse_text(text))); }

    std::vector<std::string> states() const { return tree_.states().labels(); }
    std::string to_json_text() const { return model_to_json(tree_).dump(); }

    double upper(const std::string& expr, const std::string& situation) const {
        return finitary_upper(tree_, gamble(expr), at(situation));
    }
    double lower(const std::string& expr, const std::string& situation) const {
        return finitary_lower(tree_, gamble(expr), at(situation));
    }
    double envelope(const std::string& expr, const std::string& situation, std::size_t cap) const {
        return envelope_sup(tree_, gamble(expr), at(situation), EnvelopeMethod::Enumerate, cap).value;
    }

    std::string hit_time(const std::vector<std::string>& targets, const std::string& situation, double tol,
                         std::size_t max_horizon) const {
        const auto v = LimitVariable::hitting_time(tree_.arity(), indices(targets));
        const ApproxPolicy policy{tol, max_horizon};
        json out;
        out["upper"] = to_json(limit_upper(tree_, v, at(situation), policy));
        out["lower"] = to_json(limit_lower(tree_, v, at(situation), policy));
        return out.dump();
    }

    std::pair<double, double> hit_probability(const std::vector<std::string>& targets, const std::string& situation,
                                              double tol, std::size_t max_horizon) const {
        const EventSpec e = HittingEvent{indices(targets)};
        const ApproxPolicy policy{tol, max_horizon};
        return {probability_value(upper_probability(tree_, e, at(situation), policy)),
                probability_value(lower_probability(tree_, e, at(situation), policy))};
    }

    std::string certificate(const std::string& expr, const std::string& situation) const {
        const Situation s = at(situation);
        const TailConstantProcess m = canonical_supermartingale(tree_, gamble(expr), s);
        return certificate_to_json(m, tree_.states(), expr, s).dump();
    }

    std::string verify_certificate(const std::string& text, const std::string& expr, const std::string& situation) const {
        const CertificateDocument doc = certificate_from_json(parse_text(text), tree_.states());
        const Situation s = situation.empty() ? doc.situation.value_or(Situation{}) : at(situation);
        const Certificate c = certified_upper_bound(doc.process, gamble(expr), tree_, s);
        json out;
        out["valid"] = c.valid;
        out["bound"] = to_json(c.bound);
        out["engine_value"] = number(c.engine_value);
        out["verification"] = to_json(c.verification, tree_.states());
        return out.dump();
    }

    const ImpreciseTree& tree() const { return tree_; }

private:
    static json parse_text(const std::string& text) {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw SchemaError("", e.what());
        }
    }
    FinitaryGamble gamble(const std::string& expr) const { return compile(parse_gamble(expr, tree_.states())); }
    Situation at(const std::string& situation) const { return parse_situation(situation, tree_.states()); }
    std::vector<StateIndex> indices(const std::vector<std::string>& labels) const {
        std::vector<StateIndex> out;
        for (const auto& l : labels) out.push_back(tree_.states().index_of(l));
        return out;
    }

    ImpreciseTree tree_;
};

std::string run(const std::optional<PyModel>& model, const std::string& queries, std::uint64_t seed, bool parallel) {
    std::optional<ImpreciseTree> tree;
    if (model) tree = model->tree();
    RunOptions options;
    options.seed = seed;
    options.parallel = parallel;
    json list;
    try {
        list = json::parse(queries);
    } catch (const json::parse_error& e) {
        throw SchemaError("", e.what());
    }
    return run_queries(tree, list, options).dump();
}

}  // namespace

PYBIND11_MODULE(_iptree, m) {
    m.doc() = "Imprecise probability trees: upper and lower expectations";

    static py::exception<Error> base(m, "Error", PyExc_ValueError);
    static py::exception<SyntaxError> syntax(m, "ExpressionSyntaxError", base.ptr());
    static py::exception<SchemaError> schema(m, "SchemaError", base.ptr());
    static py::exception<ResourceLimit> limit(m, "ResourceLimit", base.ptr());
    static py::exception<InvalidInput> invalid(m, "InvalidInput", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const SyntaxError& e) {
            py::set_error(syntax, e.what());
        } catch (const SchemaError& e) {
            py::set_error(schema, e.what());
        } catch (const ResourceLimit& e) {
            py::set_error(limit, e.what());
        } catch (const InvalidInput& e) {
            py::set_error(invalid, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<PyModel>(m, "Model")
        .def_static("from_json", &PyModel::from_json_text, py::arg("text"))
        .def_static("load", [](const std::string& path) { return PyModel(load_model(path)); }, py::arg("path"))
        .def_property_readonly("states", &PyModel::states)
        .def("to_json", &PyModel::to_json_text)
        .def("upper", &PyModel::upper, py::arg("expr"), py::arg("situation") = "")
        .def("lower", &PyModel::lower, py::arg("expr"), py::arg("situation") = "")
        .def("envelope", &PyModel::envelope, py::arg("expr"), py::arg("situation") = "",
             py::arg("cap") = std::size_t{1} << 16)
        .def("hit_time", &PyModel::hit_time, py::arg("targets"), py::arg("situation") = "", py::arg("tol") = 1e-9,
             py::arg("max_horizon") = 200)
        .def("hit_probability", &PyModel::hit_probability, py::arg("targets"), py::arg("situation") = "",
             py::arg("tol") = 1e-9, py::arg("max_horizon") = 200)
        .def("certificate", &PyModel::certificate, py::arg("expr"), py::arg("situation") = "")
        .def("verify_certificate", &PyModel::verify_certificate, py::arg("certificate"), py::arg("expr"),
             py::arg("situation") = "");

    m.def("run_queries", &run, py::arg("model"), py::arg("queries"), py::arg("seed") = 0, py::arg("parallel") = false);
}
