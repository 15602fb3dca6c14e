#pragma once

#include <optional>
#include <vector>

#include "iptree/engine.hpp"

namespace iptree {

/// A process on situations given by a table up to `depth` and constant beyond:
/// M(s) = M(s_{1:depth}) for longer s. Values may be +inf but not -inf, so the
/// process is bounded below by the smallest table entry.
class TailConstantProcess {
public:
    static constexpr std::size_t kDefaultEntryCap = std::size_t{1} << 22;

    /// levels[m] holds M on the k^m situations of length m, in string_index order.
    TailConstantProcess(std::size_t k, std::vector<std::vector<ExtendedReal>> levels, Situation anchor = {});

    std::size_t arity() const noexcept { return k_; }
    std::size_t depth() const noexcept { return levels_.size() - 1; }
    const std::vector<std::vector<ExtendedReal>>& levels() const noexcept { return levels_; }
    /// Situation the process was built for (informational; used in certificates).
    const Situation& anchor() const noexcept { return anchor_; }

    ExtendedReal at(const Situation& s) const;
    /// Smallest value taken anywhere (the tail repeats depth-level values).
    double lower_bound() const;

    /// Pointwise sum (depth is the larger of the two).
    friend TailConstantProcess operator+(const TailConstantProcess& a, const TailConstantProcess& b);
    TailConstantProcess shifted(double c) const;

private:
    std::size_t k_;
    std::vector<std::vector<ExtendedReal>> levels_;
    Situation anchor_;
};

struct SlackEntry {
    Situation situation;
    ExtendedReal value;        // M(s)
    ExtendedReal local_upper;  // upper expectation of M(s .) under the local model at s
    double slack;              // M(s) - local_upper; +inf - +inf counts as 0
};

struct VerifyReport {
    bool pass = true;
    std::size_t checked = 0;
    double max_slack = 0.0;
    double min_slack = 0.0;
    std::vector<SlackEntry> violations;
};

/// Checks the supermartingale inequality at every situation shorter than depth(M);
/// deeper situations hold automatically because M is constant there.
VerifyReport verify(const TailConstantProcess& m, const ImpreciseTree& tree, double tol = 1e-9);

/// M(x_{1:m}) = finitary_upper(f | x_{1:m}) for m <= depth(f), constant beyond.
TailConstantProcess canonical_supermartingale(const ImpreciseTree& tree, const FinitaryGamble& f, const Situation& base = {});

struct Certificate {
    bool valid = false;
    /// M(s), an upper bound on the upper expectation of f given s when valid.
    ExtendedReal bound;
    double engine_value = 0.0;
    VerifyReport verification;
    /// Depth-level strings through s where M falls below f.
    std::vector<Situation> domination_failures;
};

/// Validates (M, f, s) as an upper-bound certificate: M must be a supermartingale
/// and dominate f at its depth on every string through s. Throws InvalidInput if
/// depth(M) < depth(f).
Certificate certified_upper_bound(const TailConstantProcess& m, const FinitaryGamble& f, const ImpreciseTree& tree,
                                  const Situation& s);

}  // namespace iptree
