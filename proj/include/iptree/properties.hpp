#pragma once

#include <functional>
#include <span>
#include <vector>

#include "iptree/engine.hpp"

namespace iptree {

/// Any conditional upper expectation on finitary gambles: the recursion engine,
/// the compatible-tree envelope, or a test double.
using UpperFn = std::function<double(const FinitaryGamble&, const Situation&)>;

UpperFn engine_upper(const ImpreciseTree& tree);
UpperFn envelope_upper(const ImpreciseTree& tree, std::size_t cap = std::size_t{1} << 16);

/// Local agreement (one-step gambles at s reduce to the local model at s),
/// restriction to the cylinder of s, the law of iterated upper expectations
/// and monotonicity, each checked on every (gamble, situation) pair.
/// One-step gambles are built from the first k values of each gamble's table.
AxiomReport check_properties_p(const ImpreciseTree& tree, const UpperFn& upper, std::span<const FinitaryGamble> gambles,
                               std::span<const Situation> situations, double tol = 1e-9);

/// Conditional bounds over the cylinder of s, sub-additivity, non-negative
/// homogeneity and constant additivity. Consecutive gambles are paired.
AxiomReport check_properties_v(const UpperFn& upper, std::span<const FinitaryGamble> gambles,
                               std::span<const Situation> situations, double tol = 1e-9);

struct FatouResult {
    double upper_of_liminf;
    double liminf_of_upper;
    bool holds;
};

/// Compares the upper expectation of the pointwise liminf of a finite sequence,
/// read as eventually equal to its last term, with the liminf of the term-wise
/// upper expectations.
FatouResult fatou_check(const ImpreciseTree& tree, std::span<const FinitaryGamble> terms, const Situation& s,
                        double tol = 1e-9);

}  // namespace iptree
