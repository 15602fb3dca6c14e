#include "iptree/local_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace iptree {

namespace {

constexpr double kNormalizationBand = 1e-9;

void require_dimension(const CredalSet& credal, std::size_t n) {
    if (credal.dimension() != n) {
        throw InvalidInput("gamble has " + std::to_string(n) + " values but the state space has " +
                           std::to_string(credal.dimension()) + " states");
    }
}

bool all_equal(std::span<const double> f) {
    return std::adjacent_find(f.begin(), f.end(), std::not_equal_to<>()) == f.end();
}

double dot(const MassFunction& p, std::span<const double> f) {
    double sum = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) sum += p[x] * f[x];
    return sum;
}

// sum_x p(x) f(x) in extended arithmetic, finite terms first, then +inf, then -inf.
ExtendedReal extended_dot(const MassFunction& p, const LocalGamble& f) {
    double finite = 0.0;
    bool pos = false;
    bool neg = false;
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (p[x] == 0.0) continue;
        if (f[x].is_finite()) {
            finite += p[x] * f[x].value();
        } else if (f[x].is_pos_inf()) {
            pos = true;
        } else {
            neg = true;
        }
    }
    ExtendedReal sum(finite);
    if (pos) sum = sum + ExtendedReal::pos_inf();
    if (neg) sum = sum + ExtendedReal::neg_inf();
    return sum;
}

std::vector<double> clip(const LocalGamble& f, double lo, double hi) {
    std::vector<double> out(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) out[x] = std::clamp(f[x].value(), lo, hi);
    return out;
}

}  // namespace

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw InvalidInput("state space must contain at least one state");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (l.empty()) throw InvalidInput("state labels must be non-empty");
        if (!seen.insert(l).second) throw InvalidInput("duplicate state label '" + l + "'");
    }
}

std::optional<StateIndex> StateSpace::find(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<StateIndex>(it - labels_.begin());
}

StateIndex StateSpace::index_of(std::string_view label) const {
    if (auto i = find(label)) return *i;
    throw InvalidInput("unknown state label '" + std::string(label) + "'");
}

MassFunction::MassFunction(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InvalidInput("mass function needs at least one weight");
    double total = 0.0;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) throw InvalidInput("mass function weights must be finite and non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > kNormalizationBand) {
        std::ostringstream os;
        os << "mass function weights sum to " << total << ", not 1";
        throw InvalidInput(os.str());
    }
    // Rounding-level drift (0.7 + 0.2 + 0.1 != 1) is left alone so that values survive a round trip.
    const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(weights_.size());
    if (std::abs(total - 1.0) > rounding) {
        for (double& w : weights_) w /= total;
    }
}

CredalSet::CredalSet(std::vector<MassFunction> points) {
    if (points.empty()) throw InvalidInput("credal set needs at least one mass function");
    const std::size_t k = points.front().size();
    for (auto& p : points) {
        if (p.size() != k) throw InvalidInput("credal set mixes mass functions of different dimension");
        if (std::find(points_.begin(), points_.end(), p) == points_.end()) points_.push_back(std::move(p));
    }
}

CredalSet CredalSet::from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<MassFunction> points;
    points.reserve(rows.size());
    for (const auto& r : rows) points.emplace_back(r);
    return CredalSet(std::move(points));
}

LocalGamble::LocalGamble(std::vector<ExtendedReal> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidInput("local gamble needs at least one value");
}

LocalGamble LocalGamble::from_reals(std::span<const double> values) {
    return LocalGamble(std::vector<ExtendedReal>(values.begin(), values.end()));
}

bool LocalGamble::is_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](ExtendedReal v) { return v.is_finite(); });
}

std::vector<double> LocalGamble::reals() const {
    if (!is_finite()) throw InvalidInput("gamble takes infinite values");
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].value();
    return out;
}

LocalGamble LocalGamble::upper_cut(double c) const {
    std::vector<ExtendedReal> out(values_);
    for (auto& v : out) v = std::min(v.value(), c);
    return LocalGamble(std::move(out));
}

LocalGamble LocalGamble::lower_cut(double c) const {
    std::vector<ExtendedReal> out(values_);
    for (auto& v : out) v = std::max(v.value(), c);
    return LocalGamble(std::move(out));
}

LocalOptimum maximize(const CredalSet& credal, std::span<const double> f) {
    require_dimension(credal, f.size());
    if (all_equal(f)) return {f.front(), 0};
    LocalOptimum best{dot(credal[0], f), 0};
    for (std::size_t i = 1; i < credal.size(); ++i) {
        const double v = dot(credal[i], f);
        if (v > best.value) best = {v, i};
    }
    return best;
}

double upper_expectation(const CredalSet& credal, std::span<const double> f) { return maximize(credal, f).value; }

double upper_expectation(const CredalSet& credal, const LocalGamble& f) { return upper_expectation(credal, f.reals()); }

double lower_expectation(const CredalSet& credal, std::span<const double> f) {
    std::vector<double> neg(f.size());
    std::transform(f.begin(), f.end(), neg.begin(), std::negate<>());
    return -upper_expectation(credal, neg);
}

double lower_expectation(const CredalSet& credal, const LocalGamble& f) { return lower_expectation(credal, f.reals()); }

ExtendedReal extended_upper_expectation(const CredalSet& credal, const LocalGamble& f) {
    require_dimension(credal, f.size());
    if (f.is_finite()) return upper_expectation(credal, f.reals());
    ExtendedReal best = extended_dot(credal[0], f);
    for (std::size_t i = 1; i < credal.size(); ++i) best = std::max(best, extended_dot(credal[i], f));
    return best;
}

ExtendedReal extended_lower_expectation(const CredalSet& credal, const LocalGamble& f) {
    std::vector<ExtendedReal> neg(f.values());
    for (auto& v : neg) v = -v;
    return -extended_upper_expectation(credal, LocalGamble(std::move(neg)));
}

ExtendedReal cut_limit_upper(const CredalSet& credal, const LocalGamble& f, const CutSchedule& schedule) {
    require_dimension(credal, f.size());
    if (f.is_finite()) return upper_expectation(credal, f.reals());

    double lo = 0.0;
    double hi = 0.0;
    bool any_finite = false;
    for (auto v : f.values()) {
        if (!v.is_finite()) continue;
        lo = any_finite ? std::min(lo, v.value()) : v.value();
        hi = any_finite ? std::max(hi, v.value()) : v.value();
        any_finite = true;
    }
    const double scale = schedule.start + std::max(std::abs(lo), std::abs(hi));
    const double top = hi + scale;

    // Inner limit d -> +inf at a fixed lower cut c. For c below every finite value
    // the map d -> Q(f clipped to [c, d]) is a max of affine functions with
    // non-negative slopes once d exceeds every finite value: it is either constant
    // there or grows without bound.
    auto inner = [&](double c) -> ExtendedReal {
        const double at_top = upper_expectation(credal, clip(f, c, top));
        const double near_probe = upper_expectation(credal, clip(f, c, schedule.probe / 2));
        const double at_probe = upper_expectation(credal, clip(f, c, schedule.probe));
        if (at_probe > near_probe) return ExtendedReal::pos_inf();
        return at_top;
    };

    // Outer limit c -> -inf. The map c -> inner(c) is convex and non-decreasing,
    // so two equal values at consecutive levels mean it is constant from there on.
    double c = lo - scale;
    ExtendedReal previous = inner(c);
    if (previous.is_pos_inf()) return previous;
    const double floor = -std::numeric_limits<double>::max() / 4;
    while (c / 2 > floor / 2 && c * 2 > floor) {
        c *= 2;
        const ExtendedReal current = inner(c);
        if (current.is_pos_inf()) return current;
        if (current == previous) return current;
        previous = current;
    }
    return ExtendedReal::neg_inf();
}

void AxiomReport::merge(const AxiomReport& other) {
    checks += other.checks;
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::string format_values(std::span<const double> values) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << to_string(ExtendedReal(values[i]));
    os << ')';
    return os.str();
}

std::string format_values(const LocalGamble& f) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << to_string(f[i]);
    os << ')';
    return os.str();
}

namespace {

class Checker {
public:
    Checker(AxiomReport& report, double tol) : report_(report), tol_(tol) {}

    // Asserts lhs <= rhs up to a tolerance scaled by the magnitudes involved.
    void leq(const char* axiom, double lhs, double rhs, const std::string& witness) {
        ++report_.checks;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (!(lhs <= rhs + tol_ * scale)) report_.violations.push_back({axiom, witness, lhs, rhs});
    }
    void eq(const char* axiom, double lhs, double rhs, const std::string& witness) {
        ++report_.checks;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (!(std::abs(lhs - rhs) <= tol_ * scale)) report_.violations.push_back({axiom, witness, lhs, rhs});
    }
    void leq(const char* axiom, ExtendedReal lhs, ExtendedReal rhs, const std::string& witness) {
        if (lhs.is_finite() && rhs.is_finite()) return leq(axiom, lhs.value(), rhs.value(), witness);
        ++report_.checks;
        if (!(lhs <= rhs)) report_.violations.push_back({axiom, witness, lhs.value(), rhs.value()});
    }
    void eq(const char* axiom, ExtendedReal lhs, ExtendedReal rhs, const std::string& witness) {
        if (lhs.is_finite() && rhs.is_finite()) return eq(axiom, lhs.value(), rhs.value(), witness);
        ++report_.checks;
        if (!(lhs == rhs)) report_.violations.push_back({axiom, witness, lhs.value(), rhs.value()});
    }
    void exact(const char* axiom, ExtendedReal lhs, ExtendedReal rhs, const std::string& witness) {
        ++report_.checks;
        if (!(lhs == rhs)) report_.violations.push_back({axiom, witness, lhs.value(), rhs.value()});
    }

private:
    AxiomReport& report_;
    double tol_;
};

std::vector<double> plus(std::span<const double> f, std::span<const double> g) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + g[i];
    return out;
}

std::vector<double> affine(std::span<const double> f, double scale, double shift) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = scale * f[i] + shift;
    return out;
}

}  // namespace

AxiomReport check_axioms_c(const CredalSet& credal, std::span<const std::vector<double>> samples, double tol) {
    AxiomReport report;
    Checker check(report, tol);
    const std::size_t n = samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = samples[i];
        const auto& g = samples[(i + 1) % n];
        const std::string w = format_values(f);
        const double up = upper_expectation(credal, f);
        const double low = lower_expectation(credal, f);
        const double sup = *std::max_element(f.begin(), f.end());
        const double inf = *std::min_element(f.begin(), f.end());

        check.leq("C1", up, sup, w);
        check.leq("C2", upper_expectation(credal, plus(f, g)), up + upper_expectation(credal, g), w + " + " + format_values(g));
        for (double lambda : {0.0, 0.5, 2.0, 7.25}) {
            check.eq("C3", upper_expectation(credal, affine(f, lambda, 0.0)), lambda * up, w + " * " + std::to_string(lambda));
        }
        std::vector<double> dominating(f.size());
        for (std::size_t x = 0; x < f.size(); ++x) dominating[x] = f[x] + std::abs(g[x]);
        check.leq("C4", up, upper_expectation(credal, dominating), w + " <= " + format_values(dominating));
        check.leq("C5", inf, low, w);
        check.leq("C5", low, up, w);
        check.leq("C5", up, sup, w);
        for (double mu : {-3.5, 2.0}) {
            check.eq("C6", upper_expectation(credal, affine(f, 1.0, mu)), up + mu, w + " + " + std::to_string(mu));
        }
        double distance = 0.0;
        for (std::size_t x = 0; x < f.size(); ++x) distance = std::max(distance, std::abs(f[x] - g[x]));
        check.leq("C7", std::abs(up - upper_expectation(credal, g)), distance, w + " vs " + format_values(g));
    }
    return report;
}

AxiomReport check_axioms_e(const CredalSet& credal, std::span<const LocalGamble> samples, double tol) {
    AxiomReport report;
    Checker check(report, tol);
    const std::size_t n = samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        const LocalGamble& f = samples[i];
        const LocalGamble& g = samples[(i + 1) % n];
        const std::string w = format_values(f);
        const ExtendedReal up = extended_upper_expectation(credal, f);

        check.exact("cut-limit", up, cut_limit_upper(credal, f), w);

        // E1 on the constant taken from the first finite value (or 0).
        double c = 0.0;
        for (auto v : f.values()) {
            if (v.is_finite()) {
                c = v.value();
                break;
            }
        }
        check.exact("E1", extended_upper_expectation(credal, LocalGamble(std::vector<ExtendedReal>(f.size(), c))), c, w);

        std::vector<ExtendedReal> sum(f.size());
        std::vector<ExtendedReal> upper_env(f.size());
        for (std::size_t x = 0; x < f.size(); ++x) {
            sum[x] = f[x] + g[x];
            upper_env[x] = std::max(f[x], g[x]);
        }
        check.leq("E2", extended_upper_expectation(credal, LocalGamble(sum)), up + extended_upper_expectation(credal, g),
                  w + " + " + format_values(g));

        for (double lambda : {0.5, 3.0}) {
            std::vector<ExtendedReal> scaled(f.values());
            for (auto& v : scaled) v = lambda * v;
            check.eq("E3", extended_upper_expectation(credal, LocalGamble(scaled)), lambda * up,
                     w + " * " + std::to_string(lambda));
        }

        check.leq("E4", up, extended_upper_expectation(credal, LocalGamble(upper_env)), w + " <= " + format_values(LocalGamble(upper_env)));

        // E5: the non-decreasing non-negative sequence min(max(f, 0), d_j) increases to max(f, 0).
        const LocalGamble positive = f.lower_cut(0.0);
        const ExtendedReal limit = extended_upper_expectation(credal, positive);
        double top = 1.0;
        for (auto v : positive.values()) {
            if (v.is_finite()) top = std::max(top, v.value() + 1.0);
        }
        ExtendedReal previous = extended_upper_expectation(credal, positive.upper_cut(top));
        bool nondecreasing = true;
        ExtendedReal last = previous;
        for (int j = 1; j <= 40; ++j) {
            last = extended_upper_expectation(credal, positive.upper_cut(top * std::ldexp(1.0, j)));
            nondecreasing = nondecreasing && previous <= last;
            previous = last;
        }
        ++report.checks;
        if (!nondecreasing) report.violations.push_back({"E5", w + " (sequence not monotone)", last.value(), limit.value()});
        if (limit.is_finite()) {
            check.exact("E5", last, limit, w);
        } else {
            // diverging: the 40th cut has grown past 2^40 times the first cut level
            check.leq("E5", top * std::ldexp(1.0, 20), last, w + " (divergence)");
        }
    }
    return report;
}

}  // namespace iptree
