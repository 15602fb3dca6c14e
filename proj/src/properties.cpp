#include "iptree/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iptree/measure_oracle.hpp"

namespace iptree {

namespace {

void leq(AxiomReport& report, const char* name, double lhs, double rhs, double tol, const std::string& witness) {
    ++report.checks;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (!(lhs <= rhs + tol * scale)) report.violations.push_back({name, witness, lhs, rhs});
}

void eq(AxiomReport& report, const char* name, double lhs, double rhs, double tol, const std::string& witness) {
    ++report.checks;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (!(std::abs(lhs - rhs) <= tol * scale)) report.violations.push_back({name, witness, lhs, rhs});
}

std::string describe(const FinitaryGamble& f, const Situation& s) {
    std::string out = "depth " + std::to_string(f.depth()) + " at [";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "]";
}

}  // namespace

UpperFn engine_upper(const ImpreciseTree& tree) {
    return [tree](const FinitaryGamble& f, const Situation& s) { return finitary_upper(tree, f, s); };
}

UpperFn envelope_upper(const ImpreciseTree& tree, std::size_t cap) {
    return [tree, cap](const FinitaryGamble& f, const Situation& s) {
        return envelope_sup(tree, f, s, EnvelopeMethod::Enumerate, cap).value;
    };
}

AxiomReport check_properties_p(const ImpreciseTree& tree, const UpperFn& upper, std::span<const FinitaryGamble> gambles,
                               std::span<const Situation> situations, double tol) {
    AxiomReport report;
    const std::size_t k = tree.arity();
    for (std::size_t i = 0; i < gambles.size(); ++i) {
        const FinitaryGamble& f = gambles[i];
        const FinitaryGamble& g = gambles[(i + 1) % gambles.size()];
        for (const Situation& s : situations) {
            const std::string w = describe(f, s);
            const double value = upper(f, s);

            // one-step gamble h(X_{|s|+1})
            std::vector<double> h(k);
            for (StateIndex x = 0; x < k; ++x) {
                h[x] = f.depth() == 0 ? f.value(Situation{}) + x
                                      : f.value(Situation(std::vector<StateIndex>(f.depth(), x)));
            }
            eq(report, "P1", upper(FinitaryGamble::one_step(s.size(), h), s), upper_expectation(tree.local_model(s), h), tol, w);

            if (s.size() <= f.depth()) eq(report, "P2", value, upper(restrict(f, s), s), tol, w);

            const std::size_t n = s.size();
            const FinitaryGamble next = FinitaryGamble::tabulate(
                k, n + 1, [&](std::span<const StateIndex> path) { return upper(f, Situation({path.begin(), path.end()})); });
            eq(report, "P3=", value, upper(next, s), tol, w);

            FinitaryGamble dominating = combine(f, g, [](double a, double b) { return a + std::abs(b); });
            leq(report, "P4", value, upper(dominating, s), tol, w);
        }
    }
    return report;
}

AxiomReport check_properties_v(const UpperFn& upper, std::span<const FinitaryGamble> gambles,
                               std::span<const Situation> situations, double tol) {
    AxiomReport report;
    for (std::size_t i = 0; i < gambles.size(); ++i) {
        const FinitaryGamble& f = gambles[i];
        const FinitaryGamble& g = gambles[(i + 1) % gambles.size()];
        for (const Situation& s : situations) {
            const std::string w = describe(f, s);
            const double up = upper(f, s);
            const double low = -upper(-f, s);
            leq(report, "V1", f.inf_on(s), low, tol, w);
            leq(report, "V1", low, up, tol, w);
            leq(report, "V1", up, f.sup_on(s), tol, w);
            leq(report, "V2", upper(f + g, s), up + upper(g, s), tol, w);
            for (double lambda : {0.0, 0.25, 3.0}) eq(report, "V3", upper(affine(f, lambda, 0.0), s), lambda * up, tol, w);
            for (double mu : {-2.5, 4.0}) eq(report, "V4", upper(affine(f, 1.0, mu), s), up + mu, tol, w);
        }
    }
    return report;
}

FatouResult fatou_check(const ImpreciseTree& tree, std::span<const FinitaryGamble> terms, const Situation& s, double tol) {
    if (terms.empty()) throw InvalidInput("fatou check needs at least one term");
    const std::size_t n = terms.size();
    // Tail infima from the back: inf_{j >= m} f_j, with the sequence equal to f_n from n on.
    std::vector<FinitaryGamble> tail_inf;
    tail_inf.reserve(n);
    tail_inf.push_back(terms[n - 1]);
    for (std::size_t m = n - 1; m-- > 0;) {
        tail_inf.push_back(combine(terms[m], tail_inf.back(), [](double a, double b) { return std::min(a, b); }));
    }
    FinitaryGamble liminf = tail_inf.front();
    for (const auto& t : tail_inf) liminf = combine(liminf, t, [](double a, double b) { return std::max(a, b); });

    std::vector<double> values(n);
    for (std::size_t m = 0; m < n; ++m) values[m] = finitary_upper(tree, terms[m], s);
    double liminf_values = -std::numeric_limits<double>::infinity();
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t m = n; m-- > 0;) {
        running = std::min(running, values[m]);
        liminf_values = std::max(liminf_values, running);
    }
    const double lhs = finitary_upper(tree, liminf, s);
    return {lhs, liminf_values, lhs <= liminf_values + tol};
}

}  // namespace iptree
