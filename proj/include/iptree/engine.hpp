#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "iptree/gamble.hpp"
#include "iptree/tree.hpp"

namespace iptree {

/// Backward recursion for one (tree, gamble) pair.
///
/// value(node, ctx) is the global upper expectation of the subgamble `node`
/// conditional on any situation that reaches `node` in the gamble's diagram and
/// `ctx` in the tree's context automaton. Results are memoized, so gambles whose
/// diagrams share structure (hitting times, indicators) cost time linear in the
/// number of distinct (node, context) pairs rather than k^depth.
class BackwardRecursion {
public:
    BackwardRecursion(ImpreciseTree tree, FinitaryGamble f);

    /// Upper expectation of f conditional on s.
    double at(const Situation& s) const;
    double value(NodeId node, Context ctx) const;
    /// Lowest-index generating point attaining the local maximum at (node, ctx).
    std::size_t argmax(NodeId node, Context ctx) const;

    const ImpreciseTree& tree() const noexcept { return tree_; }
    const FinitaryGamble& gamble() const noexcept { return f_; }

private:
    struct Entry {
        double value;
        std::size_t argmax;
    };
    struct KeyHash {
        std::size_t operator()(const std::pair<NodeId, Context>& k) const noexcept {
            return std::hash<Context>{}(k.second * 0x9e3779b97f4a7c15ULL ^ k.first);
        }
    };
    const Entry& solve(NodeId node, Context ctx) const;

    ImpreciseTree tree_;
    FinitaryGamble f_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::pair<NodeId, Context>, Entry, KeyHash> memo_;
};

/// Global upper expectation of a finitary gamble conditional on s.
double finitary_upper(const ImpreciseTree& tree, const FinitaryGamble& f, const Situation& s);
/// -finitary_upper(tree, -f, s).
double finitary_lower(const ImpreciseTree& tree, const FinitaryGamble& f, const Situation& s);

/// Precise tree selecting, at every situation, the generating point that
/// attains the local maximum of the recursion for f (ties: lowest index).
PreciseTree adversarial_selection(const ImpreciseTree& tree, const FinitaryGamble& f);

enum class StopReason { Exact, Stabilized, HorizonCap, Diverging };
std::string to_string(StopReason r);

struct ApproxPolicy {
    double tol = 1e-9;
    std::size_t max_horizon = 200;
    /// |iterate| beyond this, with monotone iterates, is reported as divergence.
    double divergence_threshold = 1e12;
};

struct Iterate {
    std::size_t horizon;
    double value;
};

struct ApproxResult {
    ExtendedReal value;
    std::vector<Iterate> iterates;
    bool converged = false;
    StopReason stop_reason = StopReason::HorizonCap;
    /// Earliest horizon from which every iterate is within tol of the final one.
    std::size_t converged_at = 0;
};

/// Runs iterate(1), iterate(2), ... until two successive values differ by less
/// than tol, the horizon cap is reached, or the values cross the divergence
/// threshold in the sequence's direction.
ApproxResult approximate_limit(const std::function<double(std::size_t)>& iterate, Direction direction,
                               const ApproxPolicy& policy);

/// Upper expectation of a limit variable via its monotone approximations.
/// Throws InvalidInput with a witness when the sequence is not monotone.
ApproxResult limit_upper(const ImpreciseTree& tree, const LimitVariable& v, const Situation& s, const ApproxPolicy& policy = {});
ApproxResult limit_lower(const ImpreciseTree& tree, const LimitVariable& v, const Situation& s, const ApproxPolicy& policy = {});

/// Exact value for cylinder and union events, an approximation for hitting events.
using ProbabilityResult = std::variant<double, ApproxResult>;
ProbabilityResult upper_probability(const ImpreciseTree& tree, const EventSpec& e, const Situation& s,
                                    const ApproxPolicy& policy = {});
ProbabilityResult lower_probability(const ImpreciseTree& tree, const EventSpec& e, const Situation& s,
                                    const ApproxPolicy& policy = {});

/// Numeric value of a probability result (the approximation's value for limits).
double probability_value(const ProbabilityResult& r);

}  // namespace iptree
