#include <gtest/gtest.h>

#include "iptree/properties.hpp"
#include "iptree/sampling.hpp"

using namespace iptree;

namespace {

std::string first_violation(const AxiomReport& r) {
    if (r.ok()) return {};
    const auto& v = r.violations.front();
    return v.axiom + " " + v.witness + " lhs=" + std::to_string(v.lhs) + " rhs=" + std::to_string(v.rhs);
}

}  // namespace

TEST(Properties, EngineSatisfiesPAndV) {
    Sampler sampler(51);
    for (int t = 0; t < 10; ++t) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const ImpreciseTree tree = sampler.any_tree(space, 2, 3);
        std::vector<FinitaryGamble> gambles;
        for (int i = 0; i < 4; ++i) gambles.push_back(sampler.gamble(space.size(), sampler.index(4)));
        std::vector<Situation> situations;
        for (int i = 0; i < 3; ++i) situations.push_back(sampler.situation(space.size(), 3));
        const AxiomReport p = check_properties_p(tree, engine_upper(tree), gambles, situations);
        const AxiomReport v = check_properties_v(engine_upper(tree), gambles, situations);
        EXPECT_TRUE(p.ok()) << first_violation(p);
        EXPECT_TRUE(v.ok()) << first_violation(v);
        EXPECT_GT(p.checks, 0u);
    }
}

TEST(Properties, EnvelopeSatisfiesPDirectly) {
    Sampler sampler(52);
    const StateSpace space = Sampler::space(2);
    const ImpreciseTree tree = sampler.table_tree(space, 2, 2);
    std::vector<FinitaryGamble> gambles;
    for (int i = 0; i < 3; ++i) gambles.push_back(sampler.gamble(2, 1 + sampler.index(3)));
    const std::vector<Situation> situations{Situation{}, Situation{1}, Situation{0, 1}};
    const AxiomReport p = check_properties_p(tree, envelope_upper(tree), gambles, situations);
    EXPECT_TRUE(p.ok()) << first_violation(p);
}

TEST(Properties, DetectsANonCoherentFunctional) {
    // Doubling the engine value breaks the bounds and constant additivity.
    Sampler sampler(53);
    const ImpreciseTree tree = sampler.homogeneous_tree(Sampler::space(2), 2);
    const UpperFn doubled = [tree](const FinitaryGamble& f, const Situation& s) { return 2 * finitary_upper(tree, f, s); };
    std::vector<FinitaryGamble> gambles{FinitaryGamble::constant(2, 1.0).lifted(1), sampler.gamble(2, 2)};
    const AxiomReport v = check_properties_v(doubled, gambles, std::vector<Situation>{Situation{}});
    EXPECT_FALSE(v.ok());
}

TEST(Fatou, StabilizingSequences) {
    Sampler sampler(54);
    for (int t = 0; t < 20; ++t) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const ImpreciseTree tree = sampler.any_tree(space, 2, 3);
        const std::size_t n = 1 + sampler.index(6);
        std::vector<FinitaryGamble> terms;
        for (std::size_t i = 0; i < n; ++i) terms.push_back(sampler.gamble(space.size(), sampler.index(3), -2.0, 5.0));
        const FatouResult r = fatou_check(tree, terms, sampler.situation(space.size(), 2));
        EXPECT_TRUE(r.holds) << r.upper_of_liminf << " vs " << r.liminf_of_upper;
    }
}

TEST(Fatou, EmptySequenceIsRejected) {
    Sampler sampler(55);
    const ImpreciseTree tree = sampler.homogeneous_tree(Sampler::space(2), 2);
    EXPECT_THROW(fatou_check(tree, std::vector<FinitaryGamble>{}, {}), InvalidInput);
}
