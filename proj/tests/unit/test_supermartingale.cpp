#include <gtest/gtest.h>

#include "iptree/expression.hpp"
#include "iptree/sampling.hpp"
#include "iptree/supermartingale.hpp"

using namespace iptree;

namespace {

const StateSpace kCoin({"H", "T"});
constexpr StateIndex H = 0;
constexpr StateIndex T = 1;

ImpreciseTree fair_coin() { return ImpreciseTree::homogeneous(kCoin, CredalSet::from_rows({{0.5, 0.5}})); }
ImpreciseTree imprecise_coin() { return ImpreciseTree::homogeneous(kCoin, CredalSet::from_rows({{0.4, 0.6}, {0.6, 0.4}})); }
FinitaryGamble gamble(std::string_view src) { return compile(parse_gamble(src, kCoin)); }

TailConstantProcess process(std::vector<std::vector<ExtendedReal>> levels) {
    return TailConstantProcess(2, std::move(levels));
}

}  // namespace

TEST(TailConstantProcess, TailRule) {
    const auto m = process({{1.0}, {2.0, 3.0}});
    EXPECT_EQ(m.depth(), 1u);
    EXPECT_EQ(m.at(Situation{}), ExtendedReal(1.0));
    EXPECT_EQ(m.at(Situation{T}), ExtendedReal(3.0));
    EXPECT_EQ(m.at(Situation{T, H, H}), ExtendedReal(3.0));
    EXPECT_EQ(m.lower_bound(), 1.0);
}

TEST(TailConstantProcess, RejectsMinusInfinityAndBadShapes) {
    EXPECT_THROW(process({{1.0}, {ExtendedReal::neg_inf(), 0.0}}), InvalidInput);
    EXPECT_THROW(process({{1.0}, {0.0}}), InvalidInput);
    EXPECT_THROW(process({}), InvalidInput);
    EXPECT_NO_THROW(process({{ExtendedReal::pos_inf()}, {ExtendedReal::pos_inf(), 0.0}}));
}

TEST(Verify, ConstantProcessPasses) {
    const auto r = verify(process({{2.0}, {2.0, 2.0}}), imprecise_coin());
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.checked, 1u);
    EXPECT_EQ(r.max_slack, 0.0);
}

TEST(Verify, IncreasingProcessFailsAtRoot) {
    const auto r = verify(process({{0.0}, {1.0, 1.0}}), imprecise_coin());
    EXPECT_FALSE(r.pass);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].situation, Situation{});
    EXPECT_EQ(r.violations[0].slack, -1.0);
}

TEST(Verify, InfiniteValues) {
    const auto inf = ExtendedReal::pos_inf();
    EXPECT_TRUE(verify(process({{inf}, {inf, 0.0}}), imprecise_coin()).pass);
    EXPECT_FALSE(verify(process({{5.0}, {inf, 0.0}}), imprecise_coin()).pass);
    // zero mass on the infinite branch
    const auto sure = ImpreciseTree::homogeneous(kCoin, CredalSet::from_rows({{0.0, 1.0}}));
    EXPECT_TRUE(verify(process({{0.0}, {inf, 0.0}}), sure).pass);
}

TEST(Canonical, FairCoinOneStep) {
    const auto m = canonical_supermartingale(fair_coin(), gamble("ind(X[1]==H)"));
    EXPECT_EQ(m.at(Situation{}), ExtendedReal(0.5));
    EXPECT_EQ(m.at(Situation{H}), ExtendedReal(1.0));
    EXPECT_EQ(m.at(Situation{T}), ExtendedReal(0.0));
}

TEST(Canonical, ImpreciseCoinTwoSteps) {
    const auto f = gamble("ind(X[1]==H && X[2]==H)");
    const auto m = canonical_supermartingale(imprecise_coin(), f);
    EXPECT_NEAR(m.at(Situation{}).value(), 0.36, 1e-15);
    EXPECT_NEAR(m.at(Situation{H}).value(), 0.6, 1e-15);
    EXPECT_EQ(m.at(Situation{T}), ExtendedReal(0.0));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m.levels()[2][i].value(), f.value(string_at(i, 2, 2)));
    const auto r = verify(m, imprecise_coin());
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.max_slack, 0.0);
    EXPECT_EQ(r.min_slack, 0.0);
}

TEST(Canonical, ConstantGamble) {
    const auto m = canonical_supermartingale(imprecise_coin(), FinitaryGamble::constant(2, 4.0).lifted(2));
    for (const auto& level : m.levels()) {
        for (auto v : level) EXPECT_EQ(v, ExtendedReal(4.0));
    }
}

TEST(Certificate, CanonicalIsTight) {
    Sampler sampler(41);
    for (int i = 0; i < 30; ++i) {
        const StateSpace space = Sampler::space(2 + sampler.index(2));
        const ImpreciseTree t = sampler.any_tree(space, 2, 3);
        const auto f = sampler.gamble(space.size(), 1 + sampler.index(3));
        const Situation s = sampler.situation(space.size(), f.depth());
        const auto m = canonical_supermartingale(t, f, s);
        const Certificate c = certified_upper_bound(m, f, t, s);
        EXPECT_TRUE(c.valid);
        EXPECT_EQ(c.bound.value(), c.engine_value);
        EXPECT_LE(verify(m, t).max_slack, 1e-10);
    }
}

TEST(Certificate, ShiftedCanonicalIsValidAndLoose) {
    const auto f = gamble("ind(X[1]==H && X[2]==H)");
    const auto m = canonical_supermartingale(imprecise_coin(), f).shifted(0.25);
    const Certificate c = certified_upper_bound(m, f, imprecise_coin(), {});
    EXPECT_TRUE(c.valid);
    EXPECT_NEAR(c.bound.value(), 0.36 + 0.25, 1e-15);
}

TEST(Certificate, DominationFailureListsWitness) {
    const auto f = gamble("ind(X[1]==H && X[2]==H)");
    auto levels = canonical_supermartingale(imprecise_coin(), f).levels();
    levels[2][string_index(Situation{H, H}.states(), 2)] = 0.5;
    const TailConstantProcess m(2, levels);
    const Certificate c = certified_upper_bound(m, f, imprecise_coin(), {});
    EXPECT_FALSE(c.valid);
    ASSERT_EQ(c.domination_failures.size(), 1u);
    EXPECT_EQ(c.domination_failures[0], (Situation{H, H}));
    // Conditioning on T ignores the broken branch.
    EXPECT_TRUE(certified_upper_bound(m, f, imprecise_coin(), Situation{T}).domination_failures.empty());
}

TEST(Certificate, TooShallowIsRejected) {
    const auto m = process({{1.0}, {1.0, 1.0}});
    EXPECT_THROW(certified_upper_bound(m, gamble("ind(X[2]==H)"), imprecise_coin(), {}), InvalidInput);
}

TEST(Certificate, SumOfVerifiedProcessesVerifies) {
    Sampler sampler(42);
    for (int i = 0; i < 20; ++i) {
        const ImpreciseTree t = sampler.any_tree(Sampler::space(3), 2, 3);
        const auto a = canonical_supermartingale(t, sampler.gamble(3, 2));
        const auto b = canonical_supermartingale(t, sampler.gamble(3, 3));
        EXPECT_TRUE(verify(a + b, t).pass);
    }
}
