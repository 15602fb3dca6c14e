#include "iptree/tree.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

namespace iptree {

namespace {

template <class Leaf>
std::size_t leaf_dimension(const Leaf& leaf) {
    if constexpr (std::is_same_v<Leaf, CredalSet>) {
        return leaf.dimension();
    } else {
        return leaf.size();
    }
}

template <class Leaf>
void check_dimensions(const std::vector<Leaf>& leaves, std::size_t k) {
    for (const auto& leaf : leaves) {
        if (leaf_dimension(leaf) != k) {
            throw InvalidInput("local model has dimension " + std::to_string(leaf_dimension(leaf)) +
                               " but the state space has " + std::to_string(k) + " states");
        }
    }
}

constexpr Context pack(std::size_t hi, Context lo) { return (static_cast<Context>(hi) << 32) | lo; }
constexpr std::size_t high(Context c) { return static_cast<std::size_t>(c >> 32); }
constexpr Context low(Context c) { return c & 0xffffffffULL; }

class PointSelection final : public SelectionRule {
public:
    PointSelection(ImpreciseTree base, std::size_t depth, const std::map<Situation, std::size_t>& choices)
        : base_(std::move(base)), depth_(depth), coder_(base_.arity(), depth), choice_(coder_.count(), 0) {
        for (const auto& [s, index] : choices) {
            if (s.size() >= depth_) throw InvalidInput("selection for a situation at or beyond the selection depth");
            s.validate(base_.arity());
            if (index >= base_.local_model(s).size()) throw InvalidInput("selection index out of range");
            choice_[coder_.code_of(s)] = index;
        }
    }

    Context root() const override { return pack(coder_.root(), base_.root_context()); }
    Context next(Context ctx, StateIndex x) const override {
        return pack(coder_.next(high(ctx), x), base_.next_context(low(ctx), x));
    }
    const MassFunction& at(Context ctx) const override {
        const std::size_t code = high(ctx);
        const CredalSet& credal = base_.model_at(low(ctx));
        if (code == coder_.deep() || coder_.length(code) >= depth_) return credal[0];
        return credal[choice_[code]];
    }

private:
    ImpreciseTree base_;
    std::size_t depth_;
    PrefixCoder coder_;
    std::vector<std::size_t> choice_;
};

}  // namespace

ImpreciseTree::ImpreciseTree(StateSpace states, Assignment assignment)
    : states_(std::move(states)), structure_(states_.size(), std::move(assignment)) {
    check_dimensions(structure_.leaves(), states_.size());
}

ImpreciseTree ImpreciseTree::homogeneous(StateSpace states, CredalSet model) {
    return ImpreciseTree(std::move(states), Homogeneous<CredalSet>{std::move(model)});
}

Context ImpreciseTree::context_of(const Situation& s) const {
    s.validate(arity());
    Context ctx = root_context();
    for (auto x : s) ctx = next_context(ctx, x);
    return ctx;
}

const CredalSet& ImpreciseTree::local_model(const Situation& s) const { return model_at(context_of(s)); }

PreciseTree::PreciseTree(StateSpace states, Assignment assignment)
    : states_(std::move(states)), assignment_(std::move(assignment)) {
    const std::size_t k = states_.size();
    std::visit(
        [&](const auto& a) {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, std::shared_ptr<const SelectionRule>>) {
                if (!a) throw InvalidInput("null selection rule");
                rule_ = a;
            } else {
                structure_.emplace(k, Structure<MassFunction>::Variant(a));
                check_dimensions(structure_->leaves(), k);
            }
        },
        assignment_);
}

PreciseTree PreciseTree::homogeneous(StateSpace states, MassFunction p) {
    return PreciseTree(std::move(states), Homogeneous<MassFunction>{std::move(p)});
}

Context PreciseTree::root_context() const noexcept { return rule_ ? rule_->root() : structure_->root(); }

Context PreciseTree::next_context(Context ctx, StateIndex x) const {
    if (x >= arity()) throw InvalidInput("state index out of range");
    return rule_ ? rule_->next(ctx, x) : structure_->next(ctx, x);
}

Context PreciseTree::context_of(const Situation& s) const {
    Context ctx = root_context();
    for (auto x : s) ctx = next_context(ctx, x);
    return ctx;
}

const MassFunction& PreciseTree::mass_at(Context ctx) const { return rule_ ? rule_->at(ctx) : structure_->at(ctx); }

const MassFunction& PreciseTree::local_mass(const Situation& s) const { return mass_at(context_of(s)); }

ImpreciseTree PreciseTree::as_imprecise() const {
    auto lift = [](const MassFunction& p) { return CredalSet({p}); };
    return std::visit(
        [&](const auto& a) -> ImpreciseTree {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, Homogeneous<MassFunction>>) {
                return ImpreciseTree(states_, Homogeneous<CredalSet>{lift(a.model)});
            } else if constexpr (std::is_same_v<A, Markov<MassFunction>>) {
                Markov<CredalSet> m{lift(a.initial), {}};
                for (const auto& p : a.by_last_state) m.by_last_state.push_back(lift(p));
                return ImpreciseTree(states_, std::move(m));
            } else if constexpr (std::is_same_v<A, Table<MassFunction>>) {
                Table<CredalSet> t{a.depth, {}, lift(a.fallback)};
                for (const auto& [s, p] : a.entries) t.entries.emplace(s, lift(p));
                return ImpreciseTree(states_, std::move(t));
            } else {
                throw InvalidInput("rule-based precise trees have no structured imprecise form");
            }
        },
        assignment_);
}

bool in_convex_hull(const MassFunction& p, const CredalSet& credal, double tol) {
    const std::size_t k = p.size();
    if (credal.dimension() != k) throw InvalidInput("mass function and credal set differ in dimension");
    for (const auto& q : credal.points()) {
        if (q == p) return true;
    }
    // By Caratheodory, p is in the hull iff it is a convex combination of some
    // affinely independent subset of at most k generating points.
    const std::size_t r = credal.size();
    if (r > 20) throw ResourceLimit("convex hull membership: generating points", r, 20);
    Eigen::VectorXd target(k + 1);
    for (std::size_t x = 0; x < k; ++x) target(static_cast<Eigen::Index>(x)) = p[x];
    target(static_cast<Eigen::Index>(k)) = 1.0;
    for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
        const auto m = static_cast<std::size_t>(std::popcount(mask));
        if (m > k) continue;
        Eigen::MatrixXd a(k + 1, m);
        std::size_t col = 0;
        for (std::size_t j = 0; j < r; ++j) {
            if (!(mask & (1u << j))) continue;
            for (std::size_t x = 0; x < k; ++x) a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(col)) = credal[j][x];
            a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(col)) = 1.0;
            ++col;
        }
        const Eigen::VectorXd lambda = a.colPivHouseholderQr().solve(target);
        if ((a * lambda - target).cwiseAbs().maxCoeff() <= tol && lambda.minCoeff() >= -tol) return true;
    }
    return false;
}

bool is_compatible(const PreciseTree& p, const ImpreciseTree& q, std::size_t depth, double tol) {
    if (!(p.states() == q.states())) throw InvalidInput("precise and imprecise trees use different state spaces");
    std::set<std::pair<Context, Context>> frontier{{p.root_context(), q.root_context()}};
    std::set<std::pair<Context, Context>> checked;
    for (std::size_t level = 0; level < depth && !frontier.empty(); ++level) {
        std::set<std::pair<Context, Context>> next;
        for (const auto& pair : frontier) {
            if (!checked.insert(pair).second) continue;
            if (!in_convex_hull(p.mass_at(pair.first), q.model_at(pair.second), tol)) return false;
            for (StateIndex x = 0; x < p.arity(); ++x) {
                next.emplace(p.next_context(pair.first, x), q.next_context(pair.second, x));
            }
        }
        frontier = std::move(next);
    }
    return true;
}

CompatibleTrees::CompatibleTrees(ImpreciseTree q, std::size_t depth, Situation anchor, std::size_t cap)
    : q_(std::move(q)), depth_(depth), anchor_(std::move(anchor)) {
    anchor_.validate(q_.arity());
    constexpr std::size_t situation_cap = std::size_t{1} << 22;
    std::vector<Situation> level{anchor_};
    std::size_t visited = 0;
    double total = 1.0;
    for (std::size_t len = anchor_.size(); len < depth_; ++len) {
        std::vector<Situation> deeper;
        for (const auto& s : level) {
            if (++visited > situation_cap) throw ResourceLimit("compatible-tree enumeration: situations", visited, situation_cap);
            const std::size_t points = q_.local_model(s).size();
            if (points > 1) {
                choice_points_.push_back(s);
                radices_.push_back(points);
                total *= static_cast<double>(points);
            }
            for (StateIndex x = 0; x < q_.arity(); ++x) deeper.push_back(s.extended(x));
        }
        level = std::move(deeper);
    }
    if (total > static_cast<double>(cap)) {
        const double limit = static_cast<double>(std::numeric_limits<std::size_t>::max());
        throw ResourceLimit("compatible-tree enumeration: selections",
                            total >= limit ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(total), cap);
    }
    for (auto r : radices_) count_ *= r;
}

PreciseTree CompatibleTrees::at(std::size_t ordinal) const {
    if (ordinal >= count_) throw InvalidInput("selection ordinal out of range");
    std::map<Situation, std::size_t> choices;
    for (std::size_t i = 0; i < choice_points_.size(); ++i) {
        choices.emplace(choice_points_[i], ordinal % radices_[i]);
        ordinal /= radices_[i];
    }
    return PreciseTree(q_.states(), make_point_selection(q_, depth_, std::move(choices)));
}

CompatibleTrees enumerate_compatible(const ImpreciseTree& q, std::size_t depth, std::size_t cap) {
    return CompatibleTrees(q, depth, Situation{}, cap);
}

std::shared_ptr<const SelectionRule> make_point_selection(const ImpreciseTree& base, std::size_t depth,
                                                          std::map<Situation, std::size_t> choices) {
    return std::make_shared<PointSelection>(base, depth, choices);
}

}  // namespace iptree
