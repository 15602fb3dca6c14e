#include "iptree/gamble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

namespace iptree {

namespace {

std::uint64_t leaf_key(double v) { return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v); }

std::string describe_targets(const std::vector<StateIndex>& targets) {
    std::string out = "{";
    for (std::size_t i = 0; i < targets.size(); ++i) out += (i ? "," : "") + std::to_string(targets[i]);
    return out + "}";
}

std::vector<bool> target_mask(std::size_t k, const std::vector<StateIndex>& targets) {
    if (targets.empty()) throw InvalidInput("target state set must be non-empty");
    std::vector<bool> mask(k, false);
    for (auto t : targets) {
        if (t >= k) throw InvalidInput("target state index out of range");
        mask[t] = true;
    }
    return mask;
}

}  // namespace

std::size_t DiagramBuilder::VectorHash::operator()(const std::vector<NodeId>& v) const noexcept {
    std::size_t h = v.size();
    for (auto id : v) h ^= std::hash<NodeId>{}(id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

DiagramBuilder::DiagramBuilder(std::size_t k) : diagram_(std::make_shared<Diagram>()) {
    if (k == 0) throw InvalidInput("diagram arity must be positive");
    diagram_->k_ = k;
}

NodeId DiagramBuilder::leaf(double v) {
    if (!std::isfinite(v)) throw InvalidInput("finitary gambles take finite values only");
    if (v == 0.0) v = 0.0;
    auto [it, inserted] = leaves_.try_emplace(leaf_key(v), static_cast<NodeId>(diagram_->nodes_.size()));
    if (inserted) diagram_->nodes_.push_back({true, v, 0, v, v, 0});
    return it->second;
}

NodeId DiagramBuilder::inner(std::span<const NodeId> children) {
    const std::size_t k = diagram_->k_;
    if (children.size() != k) throw InvalidInput("inner node needs one child per state");
    const auto& nodes = diagram_->nodes_;
    if (nodes[children[0]].leaf && std::all_of(children.begin(), children.end(), [&](NodeId c) { return c == children[0]; })) {
        return children[0];
    }
    std::vector<NodeId> key(children.begin(), children.end());
    auto it = inner_.find(key);
    if (it != inner_.end()) return it->second;

    Diagram::Node node{false, 0.0, static_cast<std::uint32_t>(diagram_->children_.size()), nodes[children[0]].lo,
                       nodes[children[0]].hi, 0};
    for (auto c : children) {
        node.lo = std::min(node.lo, nodes[c].lo);
        node.hi = std::max(node.hi, nodes[c].hi);
        node.height = std::max(node.height, nodes[c].height + 1);
    }
    const auto id = static_cast<NodeId>(nodes.size());
    diagram_->nodes_.push_back(node);
    diagram_->children_.insert(diagram_->children_.end(), children.begin(), children.end());
    inner_.emplace(std::move(key), id);
    return id;
}

NodeId DiagramBuilder::import(const Diagram& source, NodeId n, std::unordered_map<NodeId, NodeId>& memo) {
    if (source.arity() != diagram_->k_) throw InvalidInput("cannot combine gambles over different state spaces");
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    NodeId id;
    if (source.is_leaf(n)) {
        id = leaf(source.value(n));
    } else {
        std::vector<NodeId> kids(source.arity());
        for (StateIndex x = 0; x < source.arity(); ++x) kids[x] = import(source, source.child(n, x), memo);
        id = inner(kids);
    }
    memo.emplace(n, id);
    return id;
}

std::shared_ptr<const Diagram> DiagramBuilder::finish() {
    std::shared_ptr<const Diagram> out = std::move(diagram_);
    diagram_ = std::make_shared<Diagram>();
    diagram_->k_ = out->arity();
    leaves_.clear();
    inner_.clear();
    return out;
}

FinitaryGamble::FinitaryGamble(std::size_t depth, std::shared_ptr<const Diagram> diagram, NodeId root)
    : depth_(depth), diagram_(std::move(diagram)), root_(root) {
    if (!diagram_ || root_ >= diagram_->size()) throw InvalidInput("gamble root is not a node of its diagram");
    if (diagram_->height(root_) > depth_) {
        throw InvalidInput("gamble depends on " + std::to_string(diagram_->height(root_)) +
                           " states but is declared " + std::to_string(depth_) + "-measurable");
    }
}

FinitaryGamble FinitaryGamble::constant(std::size_t k, double c) {
    DiagramBuilder b(k);
    const NodeId r = b.leaf(c);
    return FinitaryGamble(0, b.finish(), r);
}

FinitaryGamble FinitaryGamble::from_table(std::size_t k, std::size_t depth, std::span<const double> values, std::size_t cap) {
    const std::size_t cells = checked_power(k, depth, cap);
    if (values.size() != cells) {
        throw InvalidInput("payoff table has " + std::to_string(values.size()) + " cells, expected " + std::to_string(cells));
    }
    DiagramBuilder b(k);
    std::vector<NodeId> level(cells);
    for (std::size_t i = 0; i < cells; ++i) level[i] = b.leaf(values[i]);
    for (std::size_t j = depth; j-- > 0;) {
        std::vector<NodeId> up(level.size() / k);
        for (std::size_t i = 0; i < up.size(); ++i) up[i] = b.inner(std::span<const NodeId>(level).subspan(i * k, k));
        level = std::move(up);
    }
    return FinitaryGamble(depth, b.finish(), level.front());
}

FinitaryGamble FinitaryGamble::tabulate(std::size_t k, std::size_t depth,
                                        const std::function<double(std::span<const StateIndex>)>& payoff, std::size_t cap) {
    const std::size_t cells = checked_power(k, depth, cap);
    std::vector<double> values(cells);
    for (std::size_t i = 0; i < cells; ++i) values[i] = payoff(string_at(i, depth, k).states());
    return from_table(k, depth, values, cap);
}

FinitaryGamble FinitaryGamble::one_step(std::size_t n, std::span<const double> h) {
    DiagramBuilder b(h.size());
    std::vector<NodeId> kids(h.size());
    for (std::size_t x = 0; x < h.size(); ++x) kids[x] = b.leaf(h[x]);
    NodeId node = b.inner(kids);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(kids.begin(), kids.end(), node);
        node = b.inner(kids);
    }
    return FinitaryGamble(n + 1, b.finish(), node);
}

NodeId FinitaryGamble::node_at(const Situation& s) const {
    NodeId n = root_;
    for (auto x : s) {
        if (x >= arity()) throw InvalidInput("state index out of range");
        n = diagram_->child(n, x);
    }
    return n;
}

double FinitaryGamble::value(std::span<const StateIndex> path) const {
    NodeId n = root_;
    for (auto x : path) {
        if (diagram_->is_leaf(n)) break;
        if (x >= arity()) throw InvalidInput("state index out of range");
        n = diagram_->child(n, x);
    }
    if (!diagram_->is_leaf(n)) throw InvalidInput("path too short to determine the gamble's value");
    return diagram_->value(n);
}

double FinitaryGamble::sup_on(const Situation& s) const { return diagram_->max_value(node_at(s)); }
double FinitaryGamble::inf_on(const Situation& s) const { return diagram_->min_value(node_at(s)); }

std::vector<double> FinitaryGamble::table(std::size_t cap) const {
    const std::size_t k = arity();
    const std::size_t cells = checked_power(k, depth_, cap);
    std::vector<double> out(cells);
    for (std::size_t i = 0; i < cells; ++i) out[i] = value(string_at(i, depth_, k).states());
    return out;
}

FinitaryGamble FinitaryGamble::lifted(std::size_t depth) const {
    if (depth < depth_) throw InvalidInput("cannot lift a gamble to a smaller depth");
    return FinitaryGamble(depth, diagram_, root_);
}

FinitaryGamble combine(const FinitaryGamble& f, const FinitaryGamble& g, const std::function<double(double, double)>& op) {
    if (f.arity() != g.arity()) throw InvalidInput("cannot combine gambles over different state spaces");
    const Diagram& a = f.diagram();
    const Diagram& b = g.diagram();
    DiagramBuilder builder(f.arity());
    std::map<std::pair<NodeId, NodeId>, NodeId> memo;
    std::function<NodeId(NodeId, NodeId)> go = [&](NodeId u, NodeId v) -> NodeId {
        if (auto it = memo.find({u, v}); it != memo.end()) return it->second;
        NodeId id;
        if (a.is_leaf(u) && b.is_leaf(v)) {
            id = builder.leaf(op(a.value(u), b.value(v)));
        } else {
            std::vector<NodeId> kids(f.arity());
            for (StateIndex x = 0; x < f.arity(); ++x) kids[x] = go(a.child(u, x), b.child(v, x));
            id = builder.inner(kids);
        }
        memo.emplace(std::pair{u, v}, id);
        return id;
    };
    const NodeId root = go(f.root(), g.root());
    return FinitaryGamble(std::max(f.depth(), g.depth()), builder.finish(), root);
}

FinitaryGamble transform(const FinitaryGamble& f, const std::function<double(double)>& op) {
    const Diagram& a = f.diagram();
    DiagramBuilder builder(f.arity());
    std::unordered_map<NodeId, NodeId> memo;
    std::function<NodeId(NodeId)> go = [&](NodeId u) -> NodeId {
        if (auto it = memo.find(u); it != memo.end()) return it->second;
        NodeId id;
        if (a.is_leaf(u)) {
            id = builder.leaf(op(a.value(u)));
        } else {
            std::vector<NodeId> kids(f.arity());
            for (StateIndex x = 0; x < f.arity(); ++x) kids[x] = go(a.child(u, x));
            id = builder.inner(kids);
        }
        memo.emplace(u, id);
        return id;
    };
    const NodeId root = go(f.root());
    return FinitaryGamble(f.depth(), builder.finish(), root);
}

FinitaryGamble operator+(const FinitaryGamble& f, const FinitaryGamble& g) {
    return combine(f, g, [](double a, double b) { return a + b; });
}

FinitaryGamble operator-(const FinitaryGamble& f) {
    return transform(f, [](double a) { return -a; });
}

FinitaryGamble affine(const FinitaryGamble& f, double scale, double shift) {
    return transform(f, [=](double a) { return scale * a + shift; });
}

std::optional<Situation> first_exceedance(const FinitaryGamble& f, const FinitaryGamble& g) {
    if (f.arity() != g.arity()) throw InvalidInput("cannot compare gambles over different state spaces");
    const Diagram& a = f.diagram();
    const Diagram& b = g.diagram();
    std::set<std::pair<NodeId, NodeId>> cleared;
    std::vector<StateIndex> path;
    std::function<bool(NodeId, NodeId)> go = [&](NodeId u, NodeId v) -> bool {
        if (a.max_value(u) <= b.min_value(v) || cleared.count({u, v})) return false;
        if (a.is_leaf(u) && b.is_leaf(v)) return a.value(u) > b.value(v);
        for (StateIndex x = 0; x < f.arity(); ++x) {
            path.push_back(x);
            if (go(a.child(u, x), b.child(v, x))) return true;
            path.pop_back();
        }
        cleared.emplace(u, v);
        return false;
    };
    if (go(f.root(), g.root())) return Situation(path);
    return std::nullopt;
}

FinitaryGamble restrict(const FinitaryGamble& f, const Situation& s) {
    DiagramBuilder b(f.arity());
    std::unordered_map<NodeId, NodeId> memo;
    NodeId node = b.import(f.diagram(), f.node_at(s), memo);
    const NodeId zero = b.leaf(0.0);
    std::vector<NodeId> kids(f.arity());
    for (std::size_t i = s.size(); i-- > 0;) {
        std::fill(kids.begin(), kids.end(), zero);
        kids[s[i]] = node;
        node = b.inner(kids);
    }
    return FinitaryGamble(std::max(f.depth(), s.size()), b.finish(), node);
}

namespace {

// Shared shape of hitting-type gambles: along a path that has not yet hit the
// targets the diagram continues; on hitting at step i it ends in hit_value(i);
// never hitting within the horizon ends in miss_value.
FinitaryGamble hitting_shape(std::size_t k, const std::vector<StateIndex>& targets, std::size_t horizon,
                             const std::function<double(std::size_t)>& hit_value, double miss_value) {
    if (horizon == 0) throw InvalidInput("hitting horizon must be at least 1");
    const auto mask = target_mask(k, targets);
    DiagramBuilder b(k);
    NodeId node = b.leaf(miss_value);
    std::vector<NodeId> kids(k);
    for (std::size_t step = horizon; step >= 1; --step) {
        const NodeId hit = b.leaf(hit_value(step));
        for (StateIndex x = 0; x < k; ++x) kids[x] = mask[x] ? hit : node;
        node = b.inner(kids);
    }
    return FinitaryGamble(horizon, b.finish(), node);
}

}  // namespace

FinitaryGamble truncated_hitting_time(std::size_t k, const std::vector<StateIndex>& targets, std::size_t horizon) {
    return hitting_shape(k, targets, horizon, [](std::size_t i) { return static_cast<double>(i); },
                         static_cast<double>(horizon));
}

FinitaryGamble hitting_indicator(std::size_t k, const std::vector<StateIndex>& targets, std::size_t horizon) {
    return hitting_shape(k, targets, horizon, [](std::size_t) { return 1.0; }, 0.0);
}

FinitaryGamble cylinder_indicator(std::size_t k, const Situation& s) {
    s.validate(k);
    return restrict(FinitaryGamble::constant(k, 1.0), s);
}

FinitaryGamble union_indicator(std::size_t k, std::size_t n, const std::vector<Situation>& strings) {
    DiagramBuilder b(k);
    const NodeId one = b.leaf(1.0);
    const NodeId zero = b.leaf(0.0);
    // Build a trie of the strings bottom-up via a recursive descent over sorted strings.
    std::vector<Situation> sorted(strings);
    for (const auto& s : sorted) {
        if (s.size() != n) throw InvalidInput("union event strings must all have length " + std::to_string(n));
        s.validate(k);
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::function<NodeId(std::size_t, std::size_t, std::size_t)> go = [&](std::size_t lo, std::size_t hi, std::size_t level) {
        if (lo == hi) return zero;
        if (level == n) return one;
        std::vector<NodeId> kids(k, zero);
        std::size_t i = lo;
        for (StateIndex x = 0; x < k; ++x) {
            std::size_t j = i;
            while (j < hi && sorted[j][level] == x) ++j;
            kids[x] = go(i, j, level + 1);
            i = j;
        }
        return b.inner(kids);
    };
    const NodeId root = go(0, sorted.size(), 0);
    return FinitaryGamble(n, b.finish(), root);
}

LimitVariable::LimitVariable(Generator generator, Direction direction, double bound, std::string description)
    : generator_(std::move(generator)), direction_(direction), bound_(bound), description_(std::move(description)) {
    if (!generator_) throw InvalidInput("limit variable needs a generator");
    if (!std::isfinite(bound_)) throw InvalidInput("limit variable bound must be finite");
}

LimitVariable LimitVariable::hitting_time(std::size_t k, std::vector<StateIndex> targets) {
    target_mask(k, targets);
    const std::string text = "hitting time of " + describe_targets(targets);
    return LimitVariable([k, targets](std::size_t m) { return truncated_hitting_time(k, targets, m); },
                         Direction::NonDecreasing, 1.0, text);
}

LimitVariable LimitVariable::hitting_event(std::size_t k, std::vector<StateIndex> targets) {
    target_mask(k, targets);
    const std::string text = "hitting event of " + describe_targets(targets);
    return LimitVariable([k, targets](std::size_t m) { return hitting_indicator(k, targets, m); },
                         Direction::NonDecreasing, 0.0, text);
}

LimitVariable LimitVariable::from_terms(std::vector<FinitaryGamble> terms, Direction direction) {
    if (terms.empty()) throw InvalidInput("limit variable needs at least one term");
    const bool up = direction == Direction::NonDecreasing;
    double bound = up ? terms.front().diagram().min_value(terms.front().root())
                      : terms.front().diagram().max_value(terms.front().root());
    for (const auto& t : terms) {
        bound = up ? std::min(bound, t.diagram().min_value(t.root())) : std::max(bound, t.diagram().max_value(t.root()));
    }
    auto shared = std::make_shared<const std::vector<FinitaryGamble>>(std::move(terms));
    return LimitVariable(
        [shared](std::size_t m) { return (*shared)[std::min(std::max<std::size_t>(m, 1), shared->size()) - 1]; },
        direction, bound, "explicit sequence of " + std::to_string(shared->size()) + " terms");
}

FinitaryGamble LimitVariable::term(std::size_t m) const {
    if (m == 0) throw InvalidInput("limit variable terms are indexed from 1");
    return generator_(m);
}

LimitVariable LimitVariable::negated() const {
    auto gen = generator_;
    return LimitVariable([gen](std::size_t m) { return -gen(m); },
                         direction_ == Direction::NonDecreasing ? Direction::NonIncreasing : Direction::NonDecreasing,
                         -bound_, "-(" + description_ + ")");
}

void LimitVariable::check_step(const FinitaryGamble& current, const FinitaryGamble& next, std::size_t m,
                               const StateSpace& space) const {
    const bool up = direction_ == Direction::NonDecreasing;
    if (m == 1) {
        const double extreme = up ? current.diagram().min_value(current.root()) : current.diagram().max_value(current.root());
        if (up ? extreme < bound_ : extreme > bound_) {
            throw InvalidInput("term 1 violates the declared uniform bound " + to_string(ExtendedReal(bound_)));
        }
    }
    const double extreme = up ? next.diagram().min_value(next.root()) : next.diagram().max_value(next.root());
    if (up ? extreme < bound_ : extreme > bound_) {
        throw InvalidInput("term " + std::to_string(m + 1) + " violates the declared uniform bound " +
                           to_string(ExtendedReal(bound_)));
    }
    const auto witness = up ? first_exceedance(current, next) : first_exceedance(next, current);
    if (witness) {
        throw InvalidInput("sequence is not " + std::string(up ? "non-decreasing" : "non-increasing") + " between terms " +
                           std::to_string(m) + " and " + std::to_string(m + 1) + " at [" +
                           format_situation(*witness, space) + "]");
    }
}

void LimitVariable::check_monotone(std::size_t horizon, const StateSpace& space) const {
    if (horizon == 0) return;
    FinitaryGamble current = term(1);
    for (std::size_t m = 1; m < horizon; ++m) {
        FinitaryGamble next = term(m + 1);
        check_step(current, next, m, space);
        current = std::move(next);
    }
}

}  // namespace iptree
