#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iptree/engine.hpp"

namespace iptree {

/// P(z | x) for a precise tree: the product of p(z_{i+1} | z_{1:i}) for i = |x| .. |z|-1
/// when x is a proper prefix of z; 1 when z is a prefix of x; 0 otherwise.
double conditional_prob(const PreciseTree& p, const Situation& z, const Situation& x);

/// Expectation of a finitary gamble under P(. | s), by explicit summation of
/// f(z) P(z | s) over every string z of length depth(f). Cost k^depth.
double precise_expectation(const PreciseTree& p, const FinitaryGamble& f, const Situation& s,
                           std::size_t cap = std::size_t{1} << 20);

/// Same expectation, computed by pushing probability mass forward through the
/// gamble's diagram and the tree's contexts, merging paths that reach the same
/// (node, context) pair. Scales to long horizons for structured gambles.
double precise_expectation_lumped(const PreciseTree& p, const FinitaryGamble& f, const Situation& s);

enum class EnvelopeMethod { Enumerate, Recursion };

struct EnvelopeResult {
    double value = 0.0;
    /// Number of compatible selections evaluated (1 for the recursion).
    std::size_t selections = 1;
    /// Maximizing selection (enumeration only): generating-point index per choice situation.
    std::map<Situation, std::size_t> argmax;
    std::optional<PreciseTree> argmax_tree;
    /// Value of every selection, kept when there are at most 64.
    std::vector<double> per_selection;
};

/// Upper envelope over compatible precise trees of their expectations of f given s.
/// Enumerate: brute force over generating-point selections at the situations that
/// can influence P(. | s) (those extending s, shorter than depth(f)).
/// Recursion: delegates to finitary_upper.
EnvelopeResult envelope_sup(const ImpreciseTree& q, const FinitaryGamble& f, const Situation& s, EnvelopeMethod method,
                            std::size_t cap = std::size_t{1} << 16);

struct DominationSample {
    std::string label;
    ApproxResult precise;
    bool dominated = false;
};

struct DominationReport {
    ApproxResult upper;
    std::vector<DominationSample> samples;
    bool ok = true;
};

/// For every sampled compatible precise tree, compares the limit of its
/// expectations of v's terms with the engine's upper value. Throws InvalidInput
/// for samples that are not compatible up to the policy's horizon.
DominationReport domination_check(const ImpreciseTree& q, const LimitVariable& v, const Situation& s,
                                  const std::vector<std::pair<std::string, PreciseTree>>& samples,
                                  const ApproxPolicy& policy = {}, double tol = 1e-9);

struct ArgmaxGap {
    std::size_t horizon;
    double upper;
    double precise;
    double gap;
};

/// Gap, at a fixed horizon, between the engine's upper value of v's term and
/// the expectation of that term under the recursion's maximizing selection.
ArgmaxGap argmax_gap(const ImpreciseTree& q, const LimitVariable& v, const Situation& s, std::size_t horizon);

}  // namespace iptree
