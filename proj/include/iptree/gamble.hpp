#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "iptree/situation.hpp"

namespace iptree {

using NodeId = std::uint32_t;

/// Immutable, hash-consed k-ary decision diagram over state sequences.
///
/// A node denotes a function of the remaining states. A leaf is a constant;
/// an inner node branches on the next state. Identical subfunctions share a
/// node, so gambles such as truncated hitting times stay linear in the horizon.
class Diagram {
public:
    std::size_t arity() const noexcept { return k_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool is_leaf(NodeId n) const { return nodes_[n].leaf; }
    /// Leaf value; for inner nodes, undefined.
    double value(NodeId n) const { return nodes_[n].value; }
    /// Child reached by state x; a leaf is its own child.
    NodeId child(NodeId n, StateIndex x) const { return nodes_[n].leaf ? n : children_[nodes_[n].first_child + x]; }
    double min_value(NodeId n) const { return nodes_[n].lo; }
    double max_value(NodeId n) const { return nodes_[n].hi; }
    /// Number of states after which every path from n has reached a leaf.
    std::size_t height(NodeId n) const { return nodes_[n].height; }

private:
    friend class DiagramBuilder;
    struct Node {
        bool leaf;
        double value;
        std::uint32_t first_child;
        double lo;
        double hi;
        std::size_t height;
    };
    std::size_t k_ = 0;
    std::vector<Node> nodes_;
    std::vector<NodeId> children_;
};

class DiagramBuilder {
public:
    explicit DiagramBuilder(std::size_t k);

    NodeId leaf(double v);
    /// Node branching on the next state. Returns the leaf itself when all children are the same leaf.
    NodeId inner(std::span<const NodeId> children);
    /// Copies the subdiagram rooted at `n`; `memo` maps source ids to ids in this builder.
    NodeId import(const Diagram& source, NodeId n, std::unordered_map<NodeId, NodeId>& memo);

    std::shared_ptr<const Diagram> finish();

private:
    struct VectorHash {
        std::size_t operator()(const std::vector<NodeId>& v) const noexcept;
    };
    std::shared_ptr<Diagram> diagram_;
    std::unordered_map<std::uint64_t, NodeId> leaves_;
    std::unordered_map<std::vector<NodeId>, NodeId, VectorHash> inner_;
};

/// A bounded real payoff that depends on the first `depth` states only.
class FinitaryGamble {
public:
    /// Default cap on dense tabulation (k^depth cells); 4096 = depth 12 for k = 2.
    static constexpr std::size_t kDefaultCellCap = 4096;

    FinitaryGamble(std::size_t depth, std::shared_ptr<const Diagram> diagram, NodeId root);

    static FinitaryGamble constant(std::size_t k, double c);
    /// `values` indexed by string_index over strings of length `depth`.
    static FinitaryGamble from_table(std::size_t k, std::size_t depth, std::span<const double> values,
                                     std::size_t cap = kDefaultCellCap);
    static FinitaryGamble tabulate(std::size_t k, std::size_t depth,
                                   const std::function<double(std::span<const StateIndex>)>& payoff,
                                   std::size_t cap = kDefaultCellCap);
    /// The gamble h(X_{n+1}), as an (n+1)-measurable gamble.
    static FinitaryGamble one_step(std::size_t n, std::span<const double> h);

    std::size_t arity() const noexcept { return diagram_->arity(); }
    std::size_t depth() const noexcept { return depth_; }
    const Diagram& diagram() const noexcept { return *diagram_; }
    const std::shared_ptr<const Diagram>& diagram_ptr() const noexcept { return diagram_; }
    NodeId root() const noexcept { return root_; }

    /// Node reached after walking the states of s.
    NodeId node_at(const Situation& s) const;
    /// f(x_{1:n}); `path` must have at least depth() states or reach a constant region.
    double value(std::span<const StateIndex> path) const;
    double value(const Situation& path) const { return value(path.states()); }
    /// sup / inf of f over all paths extending s.
    double sup_on(const Situation& s) const;
    double inf_on(const Situation& s) const;
    /// Dense payoff table over all strings of length depth().
    std::vector<double> table(std::size_t cap = kDefaultCellCap) const;
    /// Same function, declared measurable at a larger depth.
    FinitaryGamble lifted(std::size_t depth) const;

private:
    std::size_t depth_;
    std::shared_ptr<const Diagram> diagram_;
    NodeId root_;
};

/// Pointwise combination; depth is the larger of the two.
FinitaryGamble combine(const FinitaryGamble& f, const FinitaryGamble& g, const std::function<double(double, double)>& op);
FinitaryGamble transform(const FinitaryGamble& f, const std::function<double(double)>& op);
FinitaryGamble operator+(const FinitaryGamble& f, const FinitaryGamble& g);
FinitaryGamble operator-(const FinitaryGamble& f);
FinitaryGamble affine(const FinitaryGamble& f, double scale, double shift);

/// Depth-n string (or shorter, if the gamble is constant beyond it) where f > g, if any.
std::optional<Situation> first_exceedance(const FinitaryGamble& f, const FinitaryGamble& g);

/// f * 1_{Gamma(s)}: equal to f on paths through s and 0 elsewhere.
FinitaryGamble restrict(const FinitaryGamble& f, const Situation& s);

/// min{first i with x_i in targets, horizon}.
FinitaryGamble truncated_hitting_time(std::size_t k, const std::vector<StateIndex>& targets, std::size_t horizon);
/// Indicator that some x_i, i <= horizon, is in targets.
FinitaryGamble hitting_indicator(std::size_t k, const std::vector<StateIndex>& targets, std::size_t horizon);
/// Indicator of the cylinder event of s.
FinitaryGamble cylinder_indicator(std::size_t k, const Situation& s);
/// Indicator of the union of the cylinders of the given length-n strings.
FinitaryGamble union_indicator(std::size_t k, std::size_t n, const std::vector<Situation>& strings);

enum class Direction { NonDecreasing, NonIncreasing };

/// An extended-real variable given by a monotone sequence of finitary gambles
/// f_1, f_2, ... (indices start at 1) that converges to it pointwise.
class LimitVariable {
public:
    using Generator = std::function<FinitaryGamble(std::size_t)>;

    /// `bound` is a uniform lower bound (NonDecreasing) or upper bound (NonIncreasing).
    LimitVariable(Generator generator, Direction direction, double bound, std::string description = {});

    /// Non-decreasing truncated hitting times min(tau, m) of the target set.
    static LimitVariable hitting_time(std::size_t k, std::vector<StateIndex> targets);
    /// Non-decreasing indicators of hitting the target set within m steps.
    static LimitVariable hitting_event(std::size_t k, std::vector<StateIndex> targets);
    /// Given terms f_1..f_N; the sequence is constant from f_N on.
    static LimitVariable from_terms(std::vector<FinitaryGamble> terms, Direction direction);

    FinitaryGamble term(std::size_t m) const;
    Direction direction() const noexcept { return direction_; }
    double bound() const noexcept { return bound_; }
    const std::string& description() const noexcept { return description_; }

    /// -v, with the direction flipped.
    LimitVariable negated() const;

    /// Checks monotonicity of f_1..f_horizon and the uniform bound. Throws
    /// InvalidInput with a witness string on the first violation.
    void check_monotone(std::size_t horizon, const StateSpace& space) const;
    /// Single step of check_monotone: f_m vs f_{m+1}.
    void check_step(const FinitaryGamble& current, const FinitaryGamble& next, std::size_t m, const StateSpace& space) const;

private:
    Generator generator_;
    Direction direction_;
    double bound_;
    std::string description_;
};

struct CylinderEvent {
    Situation situation;
};
struct UnionAtDepth {
    std::size_t depth = 0;
    std::vector<Situation> strings;
};
struct HittingEvent {
    std::vector<StateIndex> targets;
};
using EventSpec = std::variant<CylinderEvent, UnionAtDepth, HittingEvent>;

}  // namespace iptree
