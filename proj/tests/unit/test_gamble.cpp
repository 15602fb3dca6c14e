#include <gtest/gtest.h>

#include "iptree/gamble.hpp"
#include "iptree/sampling.hpp"

using namespace iptree;

namespace {

const StateSpace kCoin({"H", "T"});
constexpr StateIndex H = 0;
constexpr StateIndex T = 1;

}  // namespace

TEST(FinitaryGamble, ConstantHasDepthZero) {
    const auto f = FinitaryGamble::constant(2, 3.5);
    EXPECT_EQ(f.depth(), 0u);
    EXPECT_EQ(f.value(Situation{}), 3.5);
    EXPECT_EQ(f.value(Situation{1, 0, 1}), 3.5);
}

TEST(FinitaryGamble, TableRoundTrip) {
    const std::vector<double> values{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto f = FinitaryGamble::from_table(3, 2, values);
    EXPECT_EQ(f.table(), values);
    EXPECT_EQ(f.value(Situation{1, 2}), 6.0);
    EXPECT_EQ(f.sup_on(Situation{1}), 6.0);
    EXPECT_EQ(f.inf_on(Situation{1}), 4.0);
    EXPECT_EQ(f.sup_on(Situation{}), 9.0);
}

TEST(FinitaryGamble, RejectsBadTables) {
    const std::vector<double> three{1, 2, 3};
    EXPECT_THROW(FinitaryGamble::from_table(2, 2, three), InvalidInput);
    const std::vector<double> nan{1, std::numeric_limits<double>::quiet_NaN()};
    EXPECT_THROW(FinitaryGamble::from_table(2, 1, nan), InvalidInput);
    const std::vector<double> inf{1, std::numeric_limits<double>::infinity()};
    EXPECT_THROW(FinitaryGamble::from_table(2, 1, inf), InvalidInput);
}

TEST(FinitaryGamble, CellCap) {
    EXPECT_THROW(FinitaryGamble::tabulate(2, 13, [](auto) { return 0.0; }), ResourceLimit);
    EXPECT_NO_THROW(FinitaryGamble::tabulate(2, 12, [](auto) { return 0.0; }));
}

TEST(FinitaryGamble, LiftPreservesValues) {
    Sampler sampler(1);
    const auto f = sampler.gamble(3, 2);
    const auto g = f.lifted(4);
    EXPECT_EQ(g.depth(), 4u);
    for (std::size_t i = 0; i < 81; ++i) {
        const Situation z = string_at(i, 4, 3);
        EXPECT_EQ(g.value(z), f.value(z.prefix(2)));
    }
    EXPECT_THROW(f.lifted(1), InvalidInput);
}

TEST(FinitaryGamble, OneStep) {
    const std::vector<double> h{2.0, -1.0};
    const auto f = FinitaryGamble::one_step(2, h);
    EXPECT_EQ(f.depth(), 3u);
    EXPECT_EQ(f.value(Situation{T, T, H}), 2.0);
    EXPECT_EQ(f.value(Situation{H, T, T}), -1.0);
}

TEST(Combine, PointwiseAndDepth) {
    const std::vector<double> a{1, 2};
    const std::vector<double> b{10, 20, 30, 40};
    const auto f = FinitaryGamble::from_table(2, 1, a);
    const auto g = FinitaryGamble::from_table(2, 2, b);
    const auto sum = f + g;
    EXPECT_EQ(sum.depth(), 2u);
    EXPECT_EQ(sum.table(), (std::vector<double>{11, 21, 32, 42}));
    EXPECT_EQ((-f).table(), (std::vector<double>{-1, -2}));
    EXPECT_EQ(affine(f, 2.0, 1.0).table(), (std::vector<double>{3, 5}));
}

TEST(Combine, NegativeZeroIsNormalized) {
    const auto z = -FinitaryGamble::constant(2, 0.0);
    EXPECT_FALSE(std::signbit(z.value(Situation{})));
}

TEST(Restrict, Examples) {
    const auto one = FinitaryGamble::constant(2, 1.0).lifted(1);
    EXPECT_EQ(restrict(one, Situation{H}).table(), (std::vector<double>{1, 0}));
    Sampler sampler(4);
    const auto f = sampler.gamble(2, 3);
    const Situation s{T, H};
    EXPECT_EQ(restrict(restrict(f, s), s).table(), restrict(f, s).table());
    EXPECT_EQ(restrict(f, Situation{}).table(), f.table());
    const auto r = restrict(f, s);
    for (std::size_t i = 0; i < 8; ++i) {
        const Situation z = string_at(i, 3, 2);
        EXPECT_EQ(r.value(z), s.precedes(z) ? f.value(z) : 0.0);
    }
}

TEST(FirstExceedance, FindsWitness) {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{1, 2, 2.5, 4};
    const auto f = FinitaryGamble::from_table(2, 2, a);
    const auto g = FinitaryGamble::from_table(2, 2, b);
    EXPECT_FALSE(first_exceedance(g, f).has_value());
    ASSERT_TRUE(first_exceedance(f, g).has_value());
    EXPECT_EQ(*first_exceedance(f, g), (Situation{T, H}));
}

TEST(HittingTime, Examples) {
    const auto tau = truncated_hitting_time(2, {T}, 3);
    EXPECT_EQ(tau.value(Situation{H, H, H}), 3.0);
    EXPECT_EQ(tau.value(Situation{H, T, H}), 2.0);
    EXPECT_EQ(tau.value(Situation{T, H, H}), 1.0);
    EXPECT_THROW(truncated_hitting_time(2, {}, 3), InvalidInput);
    EXPECT_THROW(truncated_hitting_time(2, {T}, 0), InvalidInput);
}

TEST(HittingTime, DiagramStaysSmallAtLongHorizons) {
    const auto tau = truncated_hitting_time(2, {T}, 200);
    EXPECT_EQ(tau.depth(), 200u);
    EXPECT_LT(tau.diagram().size(), 1000u);
    EXPECT_EQ(tau.value(Situation(std::vector<StateIndex>(200, H))), 200.0);
}

TEST(HittingTime, SequenceIsMonotoneAndBounded) {
    const auto v = LimitVariable::hitting_time(2, {T});
    EXPECT_EQ(v.bound(), 1.0);
    EXPECT_NO_THROW(v.check_monotone(10, kCoin));
    for (std::size_t m = 1; m <= 6; ++m) EXPECT_GE(v.term(m).inf_on(Situation{}), 1.0);
}

TEST(Indicators, CylinderUnionHitting) {
    EXPECT_EQ(cylinder_indicator(2, Situation{H, T}).table(), (std::vector<double>{0, 1, 0, 0}));
    EXPECT_EQ(union_indicator(2, 2, {Situation{H, H}, Situation{T, T}}).table(), (std::vector<double>{1, 0, 0, 1}));
    EXPECT_EQ(hitting_indicator(2, {T}, 2).table(), (std::vector<double>{0, 1, 1, 1}));
    EXPECT_THROW(union_indicator(2, 2, {Situation{H}}), InvalidInput);
}

TEST(LimitVariable, DetectsNonMonotoneWithWitness) {
    const std::vector<double> up{0, 1};
    const std::vector<double> down{0, 0.5};
    const auto v = LimitVariable::from_terms(
        {FinitaryGamble::from_table(2, 1, up), FinitaryGamble::from_table(2, 1, down)}, Direction::NonDecreasing);
    try {
        v.check_monotone(3, kCoin);
        FAIL() << "expected a monotonicity violation";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("[T]"), std::string::npos) << e.what();
    }
}

TEST(LimitVariable, FromTermsIsConstantAfterLastTerm) {
    const std::vector<double> a{3, 1};
    const std::vector<double> b{2, 1};
    const auto v = LimitVariable::from_terms({FinitaryGamble::from_table(2, 1, a), FinitaryGamble::from_table(2, 1, b)},
                                             Direction::NonIncreasing);
    EXPECT_EQ(v.term(7).table(), b);
    EXPECT_EQ(v.bound(), 3.0);
    EXPECT_THROW(v.term(0), InvalidInput);
    const auto n = v.negated();
    EXPECT_EQ(n.direction(), Direction::NonDecreasing);
    EXPECT_EQ(n.term(1).table(), (std::vector<double>{-3, -1}));
}
