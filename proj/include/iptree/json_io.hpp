#pragma once

#include <optional>
#include <cstdint>
#include <string>

#include "json.hpp"

#include "iptree/engine.hpp"
#include "iptree/supermartingale.hpp"

namespace iptree {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

/// True for integral JSON numbers >= 0, whether parsed as signed or unsigned.
inline bool is_count(const json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

/// Finite values as numbers; infinities as "+inf" / "-inf".
json to_json(ExtendedReal x);
json number(double x);
ExtendedReal extended_from_json(const json& j, const std::string& path);

json to_json(const ApproxResult& r);
json to_json(const Situation& s, const StateSpace& space);

/// Accepts a label array or a comma-separated string ("" is the initial situation).
Situation situation_from_json(const json& j, const StateSpace& space, const std::string& path);

/// {"schema": 1, "states": [...], "model": {"kind": "homogeneous" | "markov" | "table", ...}}
ImpreciseTree model_from_json(const json& j);
json model_to_json(const ImpreciseTree& tree);
ImpreciseTree load_model(const std::string& file);

/// Reads and parses a JSON file; parse failures become SchemaError at "/".
json load_json(const std::string& file);

struct CertificateDocument {
    TailConstantProcess process;
    double declared_lower_bound;
    std::optional<std::string> expr;
    std::optional<Situation> situation;
};

/// {"schema": 1, "depth": n, "lower_bound": c, "table": {"": v, "H": v, "H,T": v, ...},
///  optional "expr" and "situation"}. Every situation up to depth must be present.
CertificateDocument certificate_from_json(const json& j, const StateSpace& space);
json certificate_to_json(const TailConstantProcess& m, const StateSpace& space, const std::optional<std::string>& expr,
                         const std::optional<Situation>& situation);

json to_json(const VerifyReport& r, const StateSpace& space);
json to_json(const AxiomReport& r);

}  // namespace iptree
