// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "iptree/measure_oracle.hpp"
#include "iptree/properties.hpp"
#include "iptree/sampling.hpp"
#include "iptree/supermartingale.hpp"

using namespace iptree;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("criterion %d %s  %s: %s (%.2fs)\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

const StateSpace kCoin({"H", "T"});
constexpr StateIndex H = 0;
constexpr StateIndex T = 1;

ImpreciseTree imprecise_coin() { return ImpreciseTree::homogeneous(kCoin, CredalSet::from_rows({{0.4, 0.6}, {0.6, 0.4}})); }

Outcome degenerate_tree_regression() {
    // Q_s(f) = f(H) at every situation.
    const ImpreciseTree q = ImpreciseTree::homogeneous(kCoin, CredalSet::from_rows({{1.0, 0.0}}));
    std::vector<FinitaryGamble> terms;
    double worst = 0.0;
    for (std::size_t n = 1; n <= 20; ++n) {
        terms.push_back(affine(cylinder_indicator(2, Situation(std::vector<StateIndex>(n, H))), -1.0, 1.0));
        worst = std::max(worst, std::abs(finitary_upper(q, terms.back(), {})));
    }
    const auto v = LimitVariable::from_terms(terms, Direction::NonDecreasing);
    const ApproxResult r = limit_upper(q, v, {}, {1e-12, 20});
    const bool ok = worst <= 1e-12 && std::abs(r.value.value()) <= 1e-12 && r.converged && r.converged_at == 1;
    return {ok, fmt("max |E(f_n)| = %g for n=1..20, limit %g, converged at horizon %g", worst, r.value.value(),
                    static_cast<double>(r.converged_at))};
}

Outcome oracle_equivalence() {
    Sampler sampler(20240601);
    double worst = 0.0;
    std::size_t selections = 0;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 200; ++i) {
        const OracleInstance inst = sample_oracle_instance(sampler, 3, 4, 3, 4096);
        const EnvelopeResult env = envelope_sup(inst.tree, inst.gamble, inst.situation, EnvelopeMethod::Enumerate, 4096);
        selections += env.selections;
        worst = std::max(worst, std::abs(env.value - finitary_upper(inst.tree, inst.gamble, inst.situation)));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst <= 1e-9 && seconds < 30.0,
            fmt("200 instances, %g selections enumerated, max |diff| = %.3g, %.2fs", static_cast<double>(selections), worst,
                seconds)};
}

Outcome precise_collapse() {
    Sampler sampler(7);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const PreciseTree p = sampler.precise_tree(space, 3);
        const ImpreciseTree q = p.as_imprecise();
        const FinitaryGamble f = sampler.gamble(space.size(), sampler.index(6));
        const Situation s = sampler.situation(space.size(), 4);
        const double up = finitary_upper(q, f, s);
        const double low = finitary_lower(q, f, s);
        const double exact = precise_expectation(p, f, s);
        worst = std::max({worst, std::abs(up - low), std::abs(up - exact), std::abs(low - exact)});
    }
    return {worst <= 1e-10, fmt("200 trees, max spread between upper, lower and precise = %.3g", worst)};
}

Outcome axiom_suites() {
    Sampler sampler(99);
    AxiomReport c, e, p, penv, v;
    for (int t = 0; t < 10; ++t) {
        const std::size_t k = 2 + sampler.index(3);
        const CredalSet credal = sampler.credal(k, 4);
        std::vector<std::vector<double>> locals;
        for (int i = 0; i < 50; ++i) locals.push_back(sampler.local_gamble(k));
        c.merge(check_axioms_c(credal, locals));
        std::vector<LocalGamble> extended;
        for (int i = 0; i < 20; ++i) extended.push_back(sampler.extended_gamble(k));
        e.merge(check_axioms_e(credal, extended));
    }
    for (int t = 0; t < 10; ++t) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const ImpreciseTree tree = sampler.any_tree(space, 2, 3);
        std::vector<FinitaryGamble> gambles;
        for (int i = 0; i < 4; ++i) gambles.push_back(sampler.gamble(space.size(), sampler.index(4)));
        std::vector<Situation> situations;
        for (int i = 0; i < 3; ++i) situations.push_back(sampler.situation(space.size(), 3));
        p.merge(check_properties_p(tree, engine_upper(tree), gambles, situations));
        v.merge(check_properties_v(engine_upper(tree), gambles, situations));
    }
    for (int t = 0; t < 5; ++t) {
        const ImpreciseTree tree = sampler.table_tree(Sampler::space(2), 1, 2);
        std::vector<FinitaryGamble> gambles;
        for (int i = 0; i < 3; ++i) gambles.push_back(sampler.gamble(2, 1 + sampler.index(2)));
        const std::vector<Situation> situations{Situation{}, Situation{T}};
        penv.merge(check_properties_p(tree, envelope_upper(tree), gambles, situations));
    }
    const std::size_t violations =
        c.violations.size() + e.violations.size() + p.violations.size() + penv.violations.size() + v.violations.size();
    std::string detail = "C " + std::to_string(c.checks) + " checks on 500 gambles, E " + std::to_string(e.checks) +
                         " on 200, P " + std::to_string(p.checks) + " (engine) + " + std::to_string(penv.checks) +
                         " (envelope), V " + std::to_string(v.checks) + "; violations " + std::to_string(violations);
    for (const auto* r : {&c, &e, &p, &penv, &v}) {
        if (!r->ok()) detail += "; first: " + r->violations.front().axiom + " " + r->violations.front().witness;
    }
    return {violations == 0, detail};
}

Outcome monotone_convergence() {
    const ImpreciseTree fair = ImpreciseTree::homogeneous(kCoin, CredalSet::from_rows({{0.5, 0.5}}));
    const ImpreciseTree q = imprecise_coin();
    const auto tau = LimitVariable::hitting_time(2, {T});
    const auto hit = LimitVariable::hitting_event(2, {T});
    const ApproxResult fair_r = limit_upper(fair, tau, {}, {1e-12, 40});
    const ApproxResult up = limit_upper(q, tau, {}, {1e-12, 80});
    const ApproxResult low = limit_lower(q, tau, {}, {1e-12, 80});
    const ApproxResult pu = limit_upper(q, hit, {}, {1e-12, 40});
    const ApproxResult pl = limit_lower(q, hit, {}, {1e-12, 40});
    const double e1 = std::abs(fair_r.value.value() - 2.0);
    const double e2 = std::max(std::abs(up.value.value() - 2.5), std::abs(low.value.value() - 5.0 / 3.0));
    const double e3 = std::max(std::abs(pu.value.value() - 1.0), std::abs(pl.value.value() - 1.0));
    const bool ok = e1 <= 1e-9 && e2 <= 1e-8 && e3 <= 1e-6 && fair_r.iterates.back().horizon <= 40 &&
                    up.iterates.back().horizon <= 80 && low.iterates.back().horizon <= 80 &&
                    pu.iterates.back().horizon <= 40 && pl.iterates.back().horizon <= 40;
    return {ok, fmt("fair coin |E tau - 2| = %.3g; imprecise coin max error %.3g (upper/lower); hitting probability error %.3g",
                    e1, e2, e3)};
}

// Random supermartingale dominating f: depth-n values f + slack, earlier
// levels the local upper expectation plus a non-negative slack.
TailConstantProcess random_certificate(Sampler& sampler, const ImpreciseTree& tree, const FinitaryGamble& f) {
    const std::size_t k = tree.arity();
    const std::size_t n = f.depth();
    std::vector<std::vector<ExtendedReal>> levels(n + 1);
    levels[n].resize(checked_power(k, n, 1u << 20));
    for (std::size_t i = 0; i < levels[n].size(); ++i) {
        const double slack = sampler.coin(0.5) ? 0.0 : sampler.uniform(0.0, 0.5);
        levels[n][i] = f.value(string_at(i, n, k)) + slack;
    }
    for (std::size_t m = n; m-- > 0;) {
        levels[m].resize(levels[m + 1].size() / k);
        for (std::size_t i = 0; i < levels[m].size(); ++i) {
            std::vector<ExtendedReal> next(levels[m + 1].begin() + static_cast<std::ptrdiff_t>(i * k),
                                           levels[m + 1].begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
            const ExtendedReal local = extended_upper_expectation(tree.local_model(string_at(i, m, k)), LocalGamble(next));
            levels[m][i] = local + (sampler.coin(0.5) ? 0.0 : sampler.uniform(0.0, 0.5));
        }
    }
    return TailConstantProcess(k, std::move(levels));
}

Outcome supermartingale_tightness() {
    Sampler sampler(4242);
    double max_slack = 0.0;
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const ImpreciseTree tree = sampler.any_tree(space, 3, 3);
        const FinitaryGamble f = sampler.gamble(space.size(), sampler.index(5));
        const Situation s = sampler.situation(space.size(), 4);
        const TailConstantProcess m = canonical_supermartingale(tree, f, s);
        const VerifyReport r = verify(m, tree);
        max_slack = std::max({max_slack, std::abs(r.max_slack), std::abs(r.min_slack)});
        if (!r.pass || !(m.at(s).value() == finitary_upper(tree, f, s))) ++mismatches;
    }
    int invalid = 0;
    int below = 0;
    for (int i = 0; i < 100; ++i) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const ImpreciseTree tree = sampler.any_tree(space, 3, 3);
        const FinitaryGamble f = sampler.gamble(space.size(), 1 + sampler.index(4));
        const Situation s = sampler.situation(space.size(), 4);
        const TailConstantProcess m = random_certificate(sampler, tree, f);
        const Certificate c = certified_upper_bound(m, f, tree, s);
        if (!c.valid) ++invalid;
        if (c.bound.value() < c.engine_value - 1e-9) ++below;
    }
    const bool ok = max_slack <= 1e-10 && mismatches == 0 && invalid == 0 && below == 0;
    return {ok, "canonical: max |slack| " + fmt("%.3g", max_slack) + ", " + std::to_string(mismatches) +
                    " mismatches; perturbed: " + std::to_string(invalid) + " invalid, " + std::to_string(below) +
                    " below the engine value"};
}

Outcome fatou() {
    Sampler sampler(31337);
    int violations = 0;
    double worst = -1e300;
    for (int i = 0; i < 100; ++i) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const ImpreciseTree tree = sampler.any_tree(space, 2, 3);
        const std::size_t n = 1 + sampler.index(6);
        std::vector<FinitaryGamble> terms;
        for (std::size_t j = 0; j < n; ++j) terms.push_back(sampler.gamble(space.size(), sampler.index(4), -3.0, 5.0));
        const FatouResult r = fatou_check(tree, terms, sampler.situation(space.size(), 3));
        worst = std::max(worst, r.upper_of_liminf - r.liminf_of_upper);
        if (!r.holds) ++violations;
    }
    return {violations == 0, std::to_string(violations) + " violations in 100 sequences; max E(liminf) - liminf E = " +
                                 fmt("%.3g", worst)};
}

Outcome domination() {
    const ImpreciseTree q = imprecise_coin();
    const auto v = LimitVariable::hitting_time(2, {T});
    Sampler sampler(8);
    auto hull_point = [&] {
        const double t = sampler.uniform(0.4, 0.6);
        return MassFunction({1.0 - t, t});
    };
    std::vector<std::pair<std::string, PreciseTree>> samples;
    for (int i = 0; i < 20; ++i) {
        switch (i % 3) {
            case 0:
                samples.emplace_back("homogeneous " + std::to_string(i), PreciseTree::homogeneous(kCoin, hull_point()));
                break;
            case 1:
                samples.emplace_back("markov " + std::to_string(i),
                                     PreciseTree(kCoin, Markov<MassFunction>{hull_point(), {hull_point(), hull_point()}}));
                break;
            default: {
                Table<MassFunction> t{3, {}, hull_point()};
                for (std::size_t len = 0; len <= 3; ++len) {
                    for (std::size_t j = 0; j < (std::size_t{1} << len); ++j) t.entries.emplace(string_at(j, len, 2), hull_point());
                }
                samples.emplace_back("table " + std::to_string(i), PreciseTree(kCoin, std::move(t)));
            }
        }
    }
    const DominationReport r = domination_check(q, v, {}, samples, {1e-12, 80}, 1e-9);
    double closest = 1e300;
    for (const auto& s : r.samples) closest = std::min(closest, r.upper.value.value() - s.precise.value.value());
    const ArgmaxGap gap = argmax_gap(q, v, {}, 80);
    const bool ok = r.ok && r.samples.size() == 20 && std::abs(gap.gap) < 1e-6;
    return {ok, fmt("upper %.12g, smallest margin over 20 samples %.3g, argmax-selection gap at horizon 80 %.3g",
                    r.upper.value.value(), closest, gap.gap)};
}

}  // namespace

int main() {
    report(1, "degenerate-tree regression", degenerate_tree_regression);
    report(2, "oracle equivalence", oracle_equivalence);
    report(3, "precise collapse", precise_collapse);
    report(4, "axiom suites", axiom_suites);
    report(5, "monotone convergence", monotone_convergence);
    report(6, "supermartingale tightness", supermartingale_tightness);
    report(7, "Fatou on stabilizing sequences", fatou);
    report(8, "domination by compatible trees", domination);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
