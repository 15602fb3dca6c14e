#include "iptree/sampling.hpp"

#include <cmath>
#include <map>
#include <string>

namespace iptree {

double Sampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

std::size_t Sampler::index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

bool Sampler::coin(double p_true) { return std::bernoulli_distribution(p_true)(rng_); }

MassFunction Sampler::mass(std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    // Occasionally put zero mass on some states to exercise boundary cases.
    for (auto& v : w) {
        v = coin(0.1) ? 0.0 : std::exponential_distribution<double>(1.0)(rng_);
        total += v;
    }
    if (total == 0.0) {
        w[index(k)] = 1.0;
        total = 1.0;
    }
    for (auto& v : w) v /= total;
    return MassFunction(std::move(w));
}

CredalSet Sampler::credal(std::size_t k, std::size_t max_points) {
    const std::size_t n = 1 + index(max_points);
    std::vector<MassFunction> points;
    for (std::size_t i = 0; i < n; ++i) points.push_back(mass(k));
    return CredalSet(std::move(points));
}

ImpreciseTree Sampler::homogeneous_tree(const StateSpace& space, std::size_t max_points) {
    return ImpreciseTree::homogeneous(space, credal(space.size(), max_points));
}

ImpreciseTree Sampler::markov_tree(const StateSpace& space, std::size_t max_points) {
    Markov<CredalSet> m{credal(space.size(), max_points), {}};
    for (std::size_t x = 0; x < space.size(); ++x) m.by_last_state.push_back(credal(space.size(), max_points));
    return ImpreciseTree(space, std::move(m));
}

ImpreciseTree Sampler::table_tree(const StateSpace& space, std::size_t depth, std::size_t max_points) {
    Table<CredalSet> t{depth, {}, credal(space.size(), max_points)};
    const std::size_t k = space.size();
    for (std::size_t len = 0; len <= depth; ++len) {
        const std::size_t count = checked_power(k, len, std::size_t{1} << 16);
        for (std::size_t i = 0; i < count; ++i) {
            if (coin(0.7)) t.entries.emplace(string_at(i, len, k), credal(k, max_points));
        }
    }
    return ImpreciseTree(space, std::move(t));
}

ImpreciseTree Sampler::any_tree(const StateSpace& space, std::size_t table_depth, std::size_t max_points) {
    switch (index(3)) {
        case 0: return homogeneous_tree(space, max_points);
        case 1: return markov_tree(space, max_points);
        default: return table_tree(space, table_depth, max_points);
    }
}

PreciseTree Sampler::precise_tree(const StateSpace& space, std::size_t table_depth) {
    const std::size_t k = space.size();
    switch (index(3)) {
        case 0: return PreciseTree::homogeneous(space, mass(k));
        case 1: {
            Markov<MassFunction> m{mass(k), {}};
            for (std::size_t x = 0; x < k; ++x) m.by_last_state.push_back(mass(k));
            return PreciseTree(space, std::move(m));
        }
        default: {
            Table<MassFunction> t{table_depth, {}, mass(k)};
            for (std::size_t len = 0; len <= table_depth; ++len) {
                const std::size_t count = checked_power(k, len, std::size_t{1} << 16);
                for (std::size_t i = 0; i < count; ++i) {
                    if (coin(0.7)) t.entries.emplace(string_at(i, len, k), mass(k));
                }
            }
            return PreciseTree(space, std::move(t));
        }
    }
}

FinitaryGamble Sampler::gamble(std::size_t k, std::size_t depth, double lo, double hi) {
    const std::size_t count = checked_power(k, depth, FinitaryGamble::kDefaultCellCap);
    std::vector<double> values(count);
    for (auto& v : values) v = uniform(lo, hi);
    return FinitaryGamble::from_table(k, depth, values);
}

Situation Sampler::situation(std::size_t k, std::size_t max_length) {
    const std::size_t len = index(max_length + 1);
    std::vector<StateIndex> states(len);
    for (auto& x : states) x = static_cast<StateIndex>(index(k));
    return Situation(std::move(states));
}

LocalGamble Sampler::extended_gamble(std::size_t k, double p_inf) {
    std::vector<ExtendedReal> values(k);
    for (auto& v : values) {
        const double u = uniform(0.0, 1.0);
        if (u < p_inf) {
            v = ExtendedReal::pos_inf();
        } else if (u < 2 * p_inf) {
            v = ExtendedReal::neg_inf();
        } else {
            v = uniform(-5.0, 5.0);
        }
    }
    return LocalGamble(std::move(values));
}

std::vector<double> Sampler::local_gamble(std::size_t k, double lo, double hi) {
    std::vector<double> values(k);
    for (auto& v : values) v = uniform(lo, hi);
    return values;
}

StateSpace Sampler::space(std::size_t k) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back("s" + std::to_string(i));
    return StateSpace(std::move(labels));
}

double selection_count(const ImpreciseTree& tree, const Situation& s, std::size_t depth) {
    double total = 1.0;
    std::vector<Situation> level{s};
    for (std::size_t len = s.size(); len < depth; ++len) {
        std::vector<Situation> deeper;
        for (const auto& t : level) {
            total *= static_cast<double>(tree.local_model(t).size());
            for (StateIndex x = 0; x < tree.arity(); ++x) deeper.push_back(t.extended(x));
        }
        level = std::move(deeper);
    }
    return total;
}

Situation fitting_situation(Sampler& sampler, const ImpreciseTree& tree, std::size_t depth, std::size_t selection_cap) {
    Situation s = sampler.situation(tree.arity(), depth);
    while (selection_count(tree, s, depth) > static_cast<double>(selection_cap)) {
        s = s.extended(static_cast<StateIndex>(sampler.index(tree.arity())));
    }
    return s;
}

OracleInstance sample_oracle_instance(Sampler& sampler, std::size_t max_k, std::size_t max_depth, std::size_t max_points,
                                      std::size_t selection_cap) {
    const std::size_t k = 2 + sampler.index(max_k - 1);
    const StateSpace space = Sampler::space(k);
    const std::size_t depth = 1 + sampler.index(max_depth);
    ImpreciseTree tree = sampler.any_tree(space, depth, max_points);
    FinitaryGamble f = sampler.gamble(k, depth);
    Situation s = fitting_situation(sampler, tree, depth, selection_cap);
    return {std::move(tree), std::move(f), std::move(s)};
}

}  // namespace iptree
