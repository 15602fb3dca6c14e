#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "iptree/json_io.hpp"

namespace iptree {

/// Defaults applied to every query; a query's own "policy" object overrides them.
struct RunOptions {
    ApproxPolicy policy;
    std::uint64_t seed = 0;
    std::size_t cell_cap = FinitaryGamble::kDefaultCellCap;
    std::size_t selection_cap = std::size_t{1} << 12;
    bool parallel = false;
    bool timing = false;
};

/// Runs one query object. Never throws: failures become {"ok": false, "error": {...}}.
json run_query(const std::optional<ImpreciseTree>& model, const json& query, std::size_t index, const RunOptions& options);

/// Runs a query list and assembles the versioned report. Output order follows
/// the input order regardless of `options.parallel`.
json run_queries(const std::optional<ImpreciseTree>& model, const json& queries, const RunOptions& options);

/// True when every record in the report succeeded.
bool report_ok(const json& report);

/// Plain-text rendering of a report.
std::string render_pretty(const json& report);

}  // namespace iptree
