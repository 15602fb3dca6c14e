#include "iptree/engine.hpp"

#include <cmath>

namespace iptree {

namespace {

constexpr Context pack(NodeId node, Context ctx) { return (static_cast<Context>(node) << 32) | ctx; }

// Selection following the recursion's maximizers. Context = (gamble node, tree context).
class RecursionPolicy final : public SelectionRule {
public:
    explicit RecursionPolicy(std::shared_ptr<const BackwardRecursion> solver) : solver_(std::move(solver)) {}

    Context root() const override { return pack(solver_->gamble().root(), solver_->tree().root_context()); }
    Context next(Context ctx, StateIndex x) const override {
        const auto node = static_cast<NodeId>(ctx >> 32);
        const Context base = ctx & 0xffffffffULL;
        return pack(solver_->gamble().diagram().child(node, x), solver_->tree().next_context(base, x));
    }
    const MassFunction& at(Context ctx) const override {
        const auto node = static_cast<NodeId>(ctx >> 32);
        const Context base = ctx & 0xffffffffULL;
        const CredalSet& credal = solver_->tree().model_at(base);
        if (solver_->gamble().diagram().is_leaf(node)) return credal[0];
        return credal[solver_->argmax(node, base)];
    }

private:
    std::shared_ptr<const BackwardRecursion> solver_;
};

void require_same_arity(const ImpreciseTree& tree, const FinitaryGamble& f) {
    if (tree.arity() != f.arity()) {
        throw InvalidInput("gamble over " + std::to_string(f.arity()) + " states used with a tree over " +
                           std::to_string(tree.arity()) + " states");
    }
}

}  // namespace

BackwardRecursion::BackwardRecursion(ImpreciseTree tree, FinitaryGamble f) : tree_(std::move(tree)), f_(std::move(f)) {
    require_same_arity(tree_, f_);
}

const BackwardRecursion::Entry& BackwardRecursion::solve(NodeId node, Context ctx) const {
    if (auto it = memo_.find({node, ctx}); it != memo_.end()) return it->second;
    const Diagram& d = f_.diagram();
    Entry entry{0.0, 0};
    if (d.is_leaf(node)) {
        entry.value = d.value(node);
    } else {
        std::vector<double> next(tree_.arity());
        for (StateIndex x = 0; x < tree_.arity(); ++x) next[x] = solve(d.child(node, x), tree_.next_context(ctx, x)).value;
        const LocalOptimum opt = maximize(tree_.model_at(ctx), next);
        entry = {opt.value, opt.argmax};
    }
    return memo_.emplace(std::pair{node, ctx}, entry).first->second;
}

double BackwardRecursion::value(NodeId node, Context ctx) const {
    std::lock_guard lock(mutex_);
    return solve(node, ctx).value;
}

std::size_t BackwardRecursion::argmax(NodeId node, Context ctx) const {
    std::lock_guard lock(mutex_);
    return solve(node, ctx).argmax;
}

double BackwardRecursion::at(const Situation& s) const {
    s.validate(tree_.arity());
    NodeId node = f_.root();
    Context ctx = tree_.root_context();
    for (auto x : s) {
        if (f_.diagram().is_leaf(node)) return f_.diagram().value(node);
        node = f_.diagram().child(node, x);
        ctx = tree_.next_context(ctx, x);
    }
    return value(node, ctx);
}

double finitary_upper(const ImpreciseTree& tree, const FinitaryGamble& f, const Situation& s) {
    return BackwardRecursion(tree, f).at(s);
}

double finitary_lower(const ImpreciseTree& tree, const FinitaryGamble& f, const Situation& s) {
    return -finitary_upper(tree, -f, s);
}

PreciseTree adversarial_selection(const ImpreciseTree& tree, const FinitaryGamble& f) {
    auto solver = std::make_shared<const BackwardRecursion>(tree, f);
    return PreciseTree(tree.states(), std::make_shared<RecursionPolicy>(std::move(solver)));
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Exact:
            return "exact";
        case StopReason::Stabilized:
            return "stabilized";
        case StopReason::HorizonCap:
            return "horizon_cap";
        case StopReason::Diverging:
            return "diverging";
    }
    return "unknown";
}

ApproxResult approximate_limit(const std::function<double(std::size_t)>& iterate, Direction direction,
                               const ApproxPolicy& policy) {
    if (!(policy.tol > 0.0) || policy.max_horizon == 0) throw InvalidInput("approximation policy needs tol > 0 and max_horizon >= 1");
    const bool up = direction == Direction::NonDecreasing;
    ApproxResult result;
    for (std::size_t m = 1; m <= policy.max_horizon; ++m) {
        const double v = iterate(m);
        result.iterates.push_back({m, v});
        if (up ? v > policy.divergence_threshold : v < -policy.divergence_threshold) {
            result.value = up ? ExtendedReal::pos_inf() : ExtendedReal::neg_inf();
            result.stop_reason = StopReason::Diverging;
            result.converged = false;
            return result;
        }
        if (m > 1 && std::abs(v - result.iterates[m - 2].value) < policy.tol) {
            result.stop_reason = StopReason::Stabilized;
            result.converged = true;
            break;
        }
    }
    const double last = result.iterates.back().value;
    result.value = last;
    std::size_t from = result.iterates.size();
    while (from > 1 && std::abs(result.iterates[from - 2].value - last) < policy.tol) --from;
    result.converged_at = result.iterates[from - 1].horizon;
    return result;
}

namespace {

ApproxResult run_limit(const ImpreciseTree& tree, const LimitVariable& v, const Situation& s, const ApproxPolicy& policy,
                       bool lower) {
    s.validate(tree.arity());
    std::optional<FinitaryGamble> previous;
    auto iterate = [&](std::size_t m) {
        FinitaryGamble term = v.term(m);
        require_same_arity(tree, term);
        if (previous) {
            v.check_step(*previous, term, m - 1, tree.states());
        } else {
            v.check_step(term, term, 1, tree.states());
        }
        const double value = lower ? finitary_lower(tree, term, s) : finitary_upper(tree, term, s);
        previous = std::move(term);
        return value;
    };
    return approximate_limit(iterate, v.direction(), policy);
}

FinitaryGamble event_indicator(std::size_t k, const EventSpec& e) {
    if (const auto* c = std::get_if<CylinderEvent>(&e)) return cylinder_indicator(k, c->situation);
    const auto& u = std::get<UnionAtDepth>(e);
    return union_indicator(k, u.depth, u.strings);
}

}  // namespace

ApproxResult limit_upper(const ImpreciseTree& tree, const LimitVariable& v, const Situation& s, const ApproxPolicy& policy) {
    return run_limit(tree, v, s, policy, false);
}

ApproxResult limit_lower(const ImpreciseTree& tree, const LimitVariable& v, const Situation& s, const ApproxPolicy& policy) {
    return run_limit(tree, v, s, policy, true);
}

ProbabilityResult upper_probability(const ImpreciseTree& tree, const EventSpec& e, const Situation& s, const ApproxPolicy& policy) {
    if (const auto* h = std::get_if<HittingEvent>(&e)) {
        return limit_upper(tree, LimitVariable::hitting_event(tree.arity(), h->targets), s, policy);
    }
    return finitary_upper(tree, event_indicator(tree.arity(), e), s);
}

ProbabilityResult lower_probability(const ImpreciseTree& tree, const EventSpec& e, const Situation& s, const ApproxPolicy& policy) {
    if (const auto* h = std::get_if<HittingEvent>(&e)) {
        return limit_lower(tree, LimitVariable::hitting_event(tree.arity(), h->targets), s, policy);
    }
    return finitary_lower(tree, event_indicator(tree.arity(), e), s);
}

double probability_value(const ProbabilityResult& r) {
    if (const auto* d = std::get_if<double>(&r)) return *d;
    return std::get<ApproxResult>(r).value.value();
}

}  // namespace iptree
