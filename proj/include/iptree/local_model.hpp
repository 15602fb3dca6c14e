#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iptree/extended_real.hpp"

namespace iptree {

using StateIndex = std::uint32_t;

/// Ordered set of state labels. Index <-> label is a stable bijection.
class StateSpace {
public:
    explicit StateSpace(std::vector<std::string> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::string& label(StateIndex i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::optional<StateIndex> find(std::string_view label) const;
    /// Like find(), but throws InvalidInput naming the unknown label.
    StateIndex index_of(std::string_view label) const;

    friend bool operator==(const StateSpace&, const StateSpace&) = default;

private:
    std::vector<std::string> labels_;
};

/// Probability mass function on a finite state space.
///
/// Weights must be non-negative and sum to 1 within 1e-9; they are then
/// divided by their sum so the stored weights sum to 1 up to rounding.
class MassFunction {
public:
    explicit MassFunction(std::vector<double> weights);

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }

    friend bool operator==(const MassFunction&, const MassFunction&) = default;

private:
    std::vector<double> weights_;
};

/// Finitely generated credal set, stored as its list of generating mass functions.
/// Exact (bitwise) duplicates are dropped; no convex-hull reduction is attempted.
class CredalSet {
public:
    explicit CredalSet(std::vector<MassFunction> points);
    /// Convenience: each row is one mass function.
    static CredalSet from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t dimension() const noexcept { return points_.front().size(); }
    std::size_t size() const noexcept { return points_.size(); }
    const MassFunction& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<MassFunction>& points() const noexcept { return points_; }
    bool is_precise() const noexcept { return points_.size() == 1; }

    friend bool operator==(const CredalSet&, const CredalSet&) = default;

private:
    std::vector<MassFunction> points_;
};

/// Extended-real local gamble on the state space.
class LocalGamble {
public:
    explicit LocalGamble(std::vector<ExtendedReal> values);
    static LocalGamble from_reals(std::span<const double> values);

    std::size_t size() const noexcept { return values_.size(); }
    ExtendedReal operator[](std::size_t i) const { return values_[i]; }
    const std::vector<ExtendedReal>& values() const noexcept { return values_; }
    bool is_finite() const noexcept;
    /// Finite values as doubles; throws InvalidInput if any value is infinite.
    std::vector<double> reals() const;

    /// x -> min(f(x), c)
    LocalGamble upper_cut(double c) const;
    /// x -> max(f(x), c)
    LocalGamble lower_cut(double c) const;

private:
    std::vector<ExtendedReal> values_;
};

/// Value of a maximization over the generating points, with the lowest-index maximizer.
struct LocalOptimum {
    double value;
    std::size_t argmax;
};

/// max over generating points p of sum_x f(x) p(x). Constant gambles return the constant exactly.
double upper_expectation(const CredalSet& credal, std::span<const double> f);
double upper_expectation(const CredalSet& credal, const LocalGamble& f);
/// Same as upper_expectation, also reporting which point attains it.
LocalOptimum maximize(const CredalSet& credal, std::span<const double> f);

/// -upper_expectation(credal, -f).
double lower_expectation(const CredalSet& credal, std::span<const double> f);
double lower_expectation(const CredalSet& credal, const LocalGamble& f);

/// Extension of the upper expectation to extended-real gambles: the max over
/// generating points of sum_x p(x) f(x) in extended arithmetic. Finite terms
/// are summed first (in index order), then +inf terms, then -inf terms.
ExtendedReal extended_upper_expectation(const CredalSet& credal, const LocalGamble& f);
ExtendedReal extended_lower_expectation(const CredalSet& credal, const LocalGamble& f);

/// Controls the cut sequences of cut_limit_upper.
struct CutSchedule {
    /// Cut levels are start * 2^j beyond the finite range of f.
    double start = 1.0;
    /// Upper cut used to probe for divergence towards +inf.
    double probe = 1e300;
};

/// Independent evaluation of the extended upper expectation as
/// lim_{c -> -inf} lim_{d -> +inf} upper_expectation(f clipped to [c, d]),
/// where each limit is detected by stabilization or monotone divergence.
ExtendedReal cut_limit_upper(const CredalSet& credal, const LocalGamble& f, const CutSchedule& schedule = {});

struct AxiomViolation {
    std::string axiom;
    std::string witness;
    double lhs;
    double rhs;
};

struct AxiomReport {
    std::size_t checks = 0;
    std::vector<AxiomViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
    void merge(const AxiomReport& other);
};

/// Property harness for the bounded coherence axioms and their consequences
/// (upper bound, sub-additivity, homogeneity, monotonicity, bounds, constant
/// additivity, Lipschitz continuity) on the given finite gambles.
AxiomReport check_axioms_c(const CredalSet& credal, std::span<const std::vector<double>> samples, double tol = 1e-9);

/// Harness for the extended-domain properties: constants, sub-additivity,
/// positive homogeneity, monotonicity, monotone convergence on non-negative
/// sequences, and exact agreement with cut_limit_upper.
AxiomReport check_axioms_e(const CredalSet& credal, std::span<const LocalGamble> samples, double tol = 1e-9);

std::string format_values(std::span<const double> values);
std::string format_values(const LocalGamble& f);

}  // namespace iptree
