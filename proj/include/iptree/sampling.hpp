#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "iptree/gamble.hpp"
#include "iptree/tree.hpp"

namespace iptree {

/// Seeded random instances for property suites and cross-checks. All draws go
/// through one mt19937_64, so a seed fixes the whole instance stream.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& engine() noexcept { return rng_; }

    double uniform(double lo, double hi);
    std::size_t index(std::size_t n);  // uniform in [0, n)
    bool coin(double p_true);

    MassFunction mass(std::size_t k);
    /// Between 1 and max_points generating points.
    CredalSet credal(std::size_t k, std::size_t max_points);

    ImpreciseTree homogeneous_tree(const StateSpace& space, std::size_t max_points);
    ImpreciseTree markov_tree(const StateSpace& space, std::size_t max_points);
    ImpreciseTree table_tree(const StateSpace& space, std::size_t depth, std::size_t max_points);
    /// One of the three assignment kinds, chosen uniformly.
    ImpreciseTree any_tree(const StateSpace& space, std::size_t table_depth, std::size_t max_points);
    PreciseTree precise_tree(const StateSpace& space, std::size_t table_depth);

    /// Dense table with payoffs uniform in [lo, hi].
    FinitaryGamble gamble(std::size_t k, std::size_t depth, double lo = -5.0, double hi = 5.0);
    Situation situation(std::size_t k, std::size_t max_length);
    /// Values are +inf or -inf with probability `p_inf` each, otherwise uniform in [-5, 5].
    LocalGamble extended_gamble(std::size_t k, double p_inf = 0.15);
    std::vector<double> local_gamble(std::size_t k, double lo = -5.0, double hi = 5.0);

    /// Random space labelled "s0", "s1", ... of size k.
    static StateSpace space(std::size_t k);

private:
    std::mt19937_64 rng_;
};

/// A random (tree, gamble, situation) instance whose compatible-tree
/// enumeration stays within `selection_cap`.
struct OracleInstance {
    ImpreciseTree tree;
    FinitaryGamble gamble;
    Situation situation;
};

/// Number of generating-point selections at situations extending s shorter than depth.
double selection_count(const ImpreciseTree& tree, const Situation& s, std::size_t depth);

/// A random situation of length <= depth, extended at random until the
/// selection count drops to the cap.
Situation fitting_situation(Sampler& sampler, const ImpreciseTree& tree, std::size_t depth, std::size_t selection_cap);

OracleInstance sample_oracle_instance(Sampler& sampler, std::size_t max_k, std::size_t max_depth, std::size_t max_points,
                                      std::size_t selection_cap);

}  // namespace iptree
