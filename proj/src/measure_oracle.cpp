#include "iptree/measure_oracle.hpp"

#include <cmath>
#include <map>

namespace iptree {

double conditional_prob(const PreciseTree& p, const Situation& z, const Situation& x) {
    z.validate(p.arity());
    x.validate(p.arity());
    const std::size_t n = x.size();
    const std::size_t m = z.size();
    if (n >= m) return z.precedes(x) ? 1.0 : 0.0;
    if (!x.precedes(z)) return 0.0;
    double prob = 1.0;
    Context ctx = p.context_of(x);
    for (std::size_t i = n; i < m; ++i) {
        prob *= p.mass_at(ctx)[z[i]];
        ctx = p.next_context(ctx, z[i]);
    }
    return prob;
}

double precise_expectation(const PreciseTree& p, const FinitaryGamble& f, const Situation& s, std::size_t cap) {
    if (p.arity() != f.arity()) throw InvalidInput("gamble and tree use different state spaces");
    const std::size_t k = p.arity();
    const std::size_t n = f.depth();
    const std::size_t cells = checked_power(k, n, cap);
    double total = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const Situation z = string_at(i, n, k);
        const double weight = conditional_prob(p, z, s);
        if (weight != 0.0) total += f.value(z) * weight;
    }
    return total;
}

double precise_expectation_lumped(const PreciseTree& p, const FinitaryGamble& f, const Situation& s) {
    if (p.arity() != f.arity()) throw InvalidInput("gamble and tree use different state spaces");
    s.validate(p.arity());
    const Diagram& d = f.diagram();
    const NodeId start = f.node_at(s);
    if (d.is_leaf(start)) return d.value(start);

    std::map<std::pair<NodeId, Context>, double> frontier{{{start, p.context_of(s)}, 1.0}};
    double total = 0.0;
    while (!frontier.empty()) {
        std::map<std::pair<NodeId, Context>, double> next;
        for (const auto& [key, mass] : frontier) {
            const auto [node, ctx] = key;
            const MassFunction& local = p.mass_at(ctx);
            for (StateIndex x = 0; x < p.arity(); ++x) {
                if (local[x] == 0.0) continue;
                const NodeId child = d.child(node, x);
                const double flow = mass * local[x];
                if (d.is_leaf(child)) {
                    total += d.value(child) * flow;
                } else {
                    next[{child, p.next_context(ctx, x)}] += flow;
                }
            }
        }
        frontier = std::move(next);
    }
    return total;
}

EnvelopeResult envelope_sup(const ImpreciseTree& q, const FinitaryGamble& f, const Situation& s, EnvelopeMethod method,
                            std::size_t cap) {
    EnvelopeResult result;
    if (method == EnvelopeMethod::Recursion) {
        result.value = finitary_upper(q, f, s);
        return result;
    }
    const CompatibleTrees trees(q, f.depth(), s, cap);
    result.selections = trees.count();
    std::size_t best = 0;
    for (std::size_t i = 0; i < trees.count(); ++i) {
        const double v = precise_expectation(trees.at(i), f, s);
        if (trees.count() <= 64) result.per_selection.push_back(v);
        if (i == 0 || v > result.value) {
            result.value = v;
            best = i;
        }
    }
    std::size_t ordinal = best;
    for (std::size_t i = 0; i < trees.choice_points().size(); ++i) {
        const std::size_t radix = q.local_model(trees.choice_points()[i]).size();
        result.argmax.emplace(trees.choice_points()[i], ordinal % radix);
        ordinal /= radix;
    }
    result.argmax_tree = trees.at(best);
    return result;
}

DominationReport domination_check(const ImpreciseTree& q, const LimitVariable& v, const Situation& s,
                                  const std::vector<std::pair<std::string, PreciseTree>>& samples, const ApproxPolicy& policy,
                                  double tol) {
    for (const auto& [label, p] : samples) {
        if (!is_compatible(p, q, policy.max_horizon)) throw InvalidInput("sample '" + label + "' is not compatible with the model");
    }
    DominationReport report;
    report.upper = limit_upper(q, v, s, policy);
    for (const auto& [label, p] : samples) {
        DominationSample sample;
        sample.label = label;
        sample.precise = approximate_limit(
            [&](std::size_t m) { return precise_expectation_lumped(p, v.term(m), s); }, v.direction(), policy);
        sample.dominated = sample.precise.value <= report.upper.value + ExtendedReal(tol);
        report.ok = report.ok && sample.dominated;
        report.samples.push_back(std::move(sample));
    }
    return report;
}

ArgmaxGap argmax_gap(const ImpreciseTree& q, const LimitVariable& v, const Situation& s, std::size_t horizon) {
    const FinitaryGamble term = v.term(horizon);
    const double upper = finitary_upper(q, term, s);
    const double precise = precise_expectation_lumped(adversarial_selection(q, term), term, s);
    return {horizon, upper, precise, upper - precise};
}

}  // namespace iptree
