#include "iptree/supermartingale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iptree {

TailConstantProcess::TailConstantProcess(std::size_t k, std::vector<std::vector<ExtendedReal>> levels, Situation anchor)
    : k_(k), levels_(std::move(levels)), anchor_(std::move(anchor)) {
    if (k_ == 0) throw InvalidInput("process needs a non-empty state space");
    if (levels_.empty()) throw InvalidInput("process needs at least the value at the initial situation");
    anchor_.validate(k_);
    std::size_t expected = 1;
    std::size_t total = 0;
    for (std::size_t m = 0; m < levels_.size(); ++m) {
        if (levels_[m].size() != expected) {
            throw InvalidInput("process level " + std::to_string(m) + " has " + std::to_string(levels_[m].size()) +
                               " entries, expected " + std::to_string(expected));
        }
        for (auto v : levels_[m]) {
            if (v.is_neg_inf()) throw InvalidInput("process takes the value -inf and is not bounded below");
        }
        total += expected;
        if (total > kDefaultEntryCap) throw ResourceLimit("process table entries", total, kDefaultEntryCap);
        expected *= k_;
    }
}

ExtendedReal TailConstantProcess::at(const Situation& s) const {
    s.validate(k_);
    const std::size_t m = std::min(s.size(), depth());
    return levels_[m][string_index(s.states().first(m), k_)];
}

double TailConstantProcess::lower_bound() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& level : levels_) {
        for (auto v : level) lo = std::min(lo, v.value());
    }
    return lo;
}

TailConstantProcess operator+(const TailConstantProcess& a, const TailConstantProcess& b) {
    if (a.k_ != b.k_) throw InvalidInput("cannot add processes over different state spaces");
    const std::size_t depth = std::max(a.depth(), b.depth());
    std::vector<std::vector<ExtendedReal>> levels(depth + 1);
    for (std::size_t m = 0; m <= depth; ++m) {
        const std::size_t count = checked_power(a.k_, m, TailConstantProcess::kDefaultEntryCap);
        levels[m].resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            const Situation s = string_at(i, m, a.k_);
            levels[m][i] = a.at(s) + b.at(s);
        }
    }
    return TailConstantProcess(a.k_, std::move(levels), a.anchor_);
}

TailConstantProcess TailConstantProcess::shifted(double c) const {
    auto levels = levels_;
    for (auto& level : levels) {
        for (auto& v : level) v = v + ExtendedReal(c);
    }
    return TailConstantProcess(k_, std::move(levels), anchor_);
}

VerifyReport verify(const TailConstantProcess& m, const ImpreciseTree& tree, double tol) {
    if (m.arity() != tree.arity()) throw InvalidInput("process and tree use different state spaces");
    const std::size_t k = m.arity();
    VerifyReport report;
    bool first = true;
    std::vector<ExtendedReal> next(k);
    for (std::size_t level = 0; level < m.depth(); ++level) {
        for (std::size_t i = 0; i < m.levels()[level].size(); ++i) {
            const Situation s = string_at(i, level, k);
            for (StateIndex x = 0; x < k; ++x) next[x] = m.levels()[level + 1][i * k + x];
            const ExtendedReal value = m.levels()[level][i];
            const ExtendedReal local = extended_upper_expectation(tree.local_model(s), LocalGamble(next));
            double slack;
            if (value.is_pos_inf() && local.is_pos_inf()) {
                slack = 0.0;
            } else {
                slack = (value - local).value();
            }
            ++report.checked;
            if (first) {
                report.max_slack = report.min_slack = slack;
                first = false;
            }
            report.max_slack = std::max(report.max_slack, slack);
            report.min_slack = std::min(report.min_slack, slack);
            const double scale = value.is_finite() ? std::max(1.0, std::abs(value.value())) : 1.0;
            if (slack < -tol * scale) report.violations.push_back({s, value, local, slack});
        }
    }
    report.pass = report.violations.empty();
    return report;
}

TailConstantProcess canonical_supermartingale(const ImpreciseTree& tree, const FinitaryGamble& f, const Situation& base) {
    base.validate(tree.arity());
    const BackwardRecursion solver(tree, f);
    const std::size_t k = tree.arity();
    std::vector<std::vector<ExtendedReal>> levels(f.depth() + 1);
    for (std::size_t m = 0; m <= f.depth(); ++m) {
        const std::size_t count = checked_power(k, m, TailConstantProcess::kDefaultEntryCap);
        levels[m].resize(count);
        for (std::size_t i = 0; i < count; ++i) levels[m][i] = solver.at(string_at(i, m, k));
    }
    return TailConstantProcess(k, std::move(levels), base);
}

Certificate certified_upper_bound(const TailConstantProcess& m, const FinitaryGamble& f, const ImpreciseTree& tree,
                                  const Situation& s) {
    if (m.depth() < f.depth()) {
        throw InvalidInput("certificate depth " + std::to_string(m.depth()) + " is below the gamble's depth " +
                           std::to_string(f.depth()));
    }
    s.validate(tree.arity());
    Certificate cert;
    cert.verification = verify(m, tree);
    cert.bound = m.at(s);
    cert.engine_value = finitary_upper(tree, f, s);

    const std::size_t k = m.arity();
    const std::size_t n = m.depth();
    if (s.size() >= n) {
        if (m.at(s) < ExtendedReal(f.value(s.prefix(n)))) cert.domination_failures.push_back(s.prefix(n));
    } else {
        // strings of length n extending s
        const std::size_t free = n - s.size();
        const std::size_t count = checked_power(k, free, TailConstantProcess::kDefaultEntryCap);
        const std::size_t base = string_index(s.states(), k) * count;
        for (std::size_t i = 0; i < count; ++i) {
            const Situation z = string_at(base + i, n, k);
            if (m.levels()[n][base + i] < ExtendedReal(f.value(z))) cert.domination_failures.push_back(z);
        }
    }
    cert.valid = cert.verification.pass && cert.domination_failures.empty();
    return cert;
}

}  // namespace iptree
