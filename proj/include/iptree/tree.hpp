#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iptree/local_model.hpp"
#include "iptree/situation.hpp"

namespace iptree {

/// Opaque state of a tree's context automaton. Two situations with the same
/// context have the same local model and the same local models below them,
/// which is what lets the recursion share work between situations.
using Context = std::uint64_t;

template <class Leaf>
struct Homogeneous {
    Leaf model;
};

/// Local model depends on the last state only; `initial` applies to the empty situation.
template <class Leaf>
struct Markov {
    Leaf initial;
    std::vector<Leaf> by_last_state;
};

/// Explicit per-situation models for situations of length <= depth, `fallback` elsewhere.
template <class Leaf>
struct Table {
    std::size_t depth = 0;
    std::map<Situation, Leaf> entries;
    Leaf fallback;
};

/// One of the three structured assignments, with its context automaton precomputed.
template <class Leaf>
class Structure {
public:
    using Variant = std::variant<Homogeneous<Leaf>, Markov<Leaf>, Table<Leaf>>;

    Structure(std::size_t k, Variant assignment);

    const Variant& assignment() const noexcept { return assignment_; }
    Context root() const noexcept { return 0; }
    Context next(Context ctx, StateIndex x) const;
    const Leaf& at(Context ctx) const { return leaves_.at(ctx); }
    std::size_t context_count() const noexcept { return leaves_.size(); }
    const std::vector<Leaf>& leaves() const noexcept { return leaves_; }

private:
    Variant assignment_;
    std::size_t k_;
    std::optional<PrefixCoder> coder_;
    std::vector<Leaf> leaves_;  // indexed by context
};

/// Assignment of a finitely generated credal set to every situation.
class ImpreciseTree {
public:
    using Assignment = Structure<CredalSet>::Variant;

    ImpreciseTree(StateSpace states, Assignment assignment);
    static ImpreciseTree homogeneous(StateSpace states, CredalSet model);

    const StateSpace& states() const noexcept { return states_; }
    std::size_t arity() const noexcept { return states_.size(); }
    const Assignment& assignment() const noexcept { return structure_.assignment(); }

    const CredalSet& local_model(const Situation& s) const;

    Context root_context() const noexcept { return structure_.root(); }
    Context next_context(Context ctx, StateIndex x) const { return structure_.next(ctx, x); }
    Context context_of(const Situation& s) const;
    const CredalSet& model_at(Context ctx) const { return structure_.at(ctx); }
    /// Every credal set the tree can return, one per context.
    const std::vector<CredalSet>& distinct_models() const noexcept { return structure_.leaves(); }

private:
    StateSpace states_;
    Structure<CredalSet> structure_;
};

/// A context automaton choosing one mass function per situation, for precise
/// trees that are not one of the structured forms (selections, policies).
class SelectionRule {
public:
    virtual ~SelectionRule() = default;
    virtual Context root() const = 0;
    virtual Context next(Context ctx, StateIndex x) const = 0;
    virtual const MassFunction& at(Context ctx) const = 0;
};

/// Assignment of a single mass function to every situation.
class PreciseTree {
public:
    using Assignment = std::variant<Homogeneous<MassFunction>, Markov<MassFunction>, Table<MassFunction>,
                                    std::shared_ptr<const SelectionRule>>;

    PreciseTree(StateSpace states, Assignment assignment);
    static PreciseTree homogeneous(StateSpace states, MassFunction p);

    const StateSpace& states() const noexcept { return states_; }
    std::size_t arity() const noexcept { return states_.size(); }
    const Assignment& assignment() const noexcept { return assignment_; }

    /// p(. | s)
    const MassFunction& local_mass(const Situation& s) const;

    Context root_context() const noexcept;
    Context next_context(Context ctx, StateIndex x) const;
    Context context_of(const Situation& s) const;
    const MassFunction& mass_at(Context ctx) const;

    /// The same tree viewed as an imprecise tree with singleton credal sets.
    /// Throws InvalidInput for rule-based trees.
    ImpreciseTree as_imprecise() const;

private:
    StateSpace states_;
    Assignment assignment_;
    std::optional<Structure<MassFunction>> structure_;
    std::shared_ptr<const SelectionRule> rule_;
};

/// True iff p lies in the convex hull of the credal set's generating points (tolerance `tol`).
bool in_convex_hull(const MassFunction& p, const CredalSet& credal, double tol = 1e-9);

/// True iff p(.|s) lies in the credal set of q at s for every situation s of length < depth.
bool is_compatible(const PreciseTree& p, const ImpreciseTree& q, std::size_t depth, double tol = 1e-9);

/// Selection of one generating point per situation of length < depth that
/// extends `anchor`; every other situation uses the first generating point.
class CompatibleTrees {
public:
    static constexpr std::size_t kDefaultCap = std::size_t{1} << 20;

    CompatibleTrees(ImpreciseTree q, std::size_t depth, Situation anchor = {}, std::size_t cap = kDefaultCap);

    /// Number of distinct selections (product of generating-point counts).
    std::size_t count() const noexcept { return count_; }
    /// The `ordinal`-th selection in mixed-radix order, 0 <= ordinal < count().
    PreciseTree at(std::size_t ordinal) const;
    /// Situations at which a choice is made, in enumeration order.
    const std::vector<Situation>& choice_points() const noexcept { return choice_points_; }

    class iterator {
    public:
        using value_type = PreciseTree;
        using difference_type = std::ptrdiff_t;
        iterator(const CompatibleTrees* owner, std::size_t i) : owner_(owner), i_(i) {}
        PreciseTree operator*() const { return owner_->at(i_); }
        iterator& operator++() {
            ++i_;
            return *this;
        }
        bool operator==(const iterator& o) const { return i_ == o.i_; }

    private:
        const CompatibleTrees* owner_;
        std::size_t i_;
    };
    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, count_}; }

private:
    ImpreciseTree q_;
    std::size_t depth_;
    Situation anchor_;
    std::vector<Situation> choice_points_;
    std::vector<std::size_t> radices_;
    std::size_t count_ = 1;
};

/// All extreme-point selections for situations of length < depth; throws
/// ResourceLimit naming the count when it exceeds `cap`.
CompatibleTrees enumerate_compatible(const ImpreciseTree& q, std::size_t depth,
                                     std::size_t cap = CompatibleTrees::kDefaultCap);

/// Selection rule that picks, per situation of length < depth, a generating point of
/// the base tree by index (table keyed by situation), defaulting to index 0.
std::shared_ptr<const SelectionRule> make_point_selection(const ImpreciseTree& base, std::size_t depth,
                                                          std::map<Situation, std::size_t> choices);

// ---------------------------------------------------------------------------

template <class Leaf>
Structure<Leaf>::Structure(std::size_t k, Variant assignment) : assignment_(std::move(assignment)), k_(k) {
    if (auto* h = std::get_if<Homogeneous<Leaf>>(&assignment_)) {
        leaves_.push_back(h->model);
    } else if (auto* m = std::get_if<Markov<Leaf>>(&assignment_)) {
        if (m->by_last_state.size() != k) throw InvalidInput("markov assignment needs one model per state");
        leaves_.push_back(m->initial);
        leaves_.insert(leaves_.end(), m->by_last_state.begin(), m->by_last_state.end());
    } else {
        auto& t = std::get<Table<Leaf>>(assignment_);
        for (const auto& [s, leaf] : t.entries) {
            if (s.size() > t.depth) throw InvalidInput("table entry deeper than the declared table depth");
            s.validate(k);
        }
        coder_.emplace(k, t.depth);
        leaves_.assign(coder_->count(), t.fallback);
        for (const auto& [s, leaf] : t.entries) leaves_[coder_->code_of(s)] = leaf;
    }
}

template <class Leaf>
Context Structure<Leaf>::next(Context ctx, StateIndex x) const {
    if (x >= k_) throw InvalidInput("state index out of range");
    switch (assignment_.index()) {
        case 0:
            return 0;
        case 1:
            return 1 + static_cast<Context>(x);
        default:
            return coder_->next(static_cast<std::size_t>(ctx), x);
    }
}

}  // namespace iptree
