#include <gtest/gtest.h>

#include <set>

#include "iptree/sampling.hpp"
#include "iptree/tree.hpp"

using namespace iptree;

namespace {

const StateSpace kCoin({"H", "T"});

CredalSet c(std::vector<std::vector<double>> rows) { return CredalSet::from_rows(rows); }

ImpreciseTree imprecise_coin() { return ImpreciseTree::homogeneous(kCoin, c({{0.4, 0.6}, {0.6, 0.4}})); }

}  // namespace

TEST(ImpreciseTree, HomogeneousLookup) {
    const auto t = imprecise_coin();
    EXPECT_EQ(t.local_model(Situation{}), c({{0.4, 0.6}, {0.6, 0.4}}));
    EXPECT_EQ(t.local_model(Situation{1, 0, 1}), c({{0.4, 0.6}, {0.6, 0.4}}));
    EXPECT_THROW(t.local_model(Situation{2}), InvalidInput);
}

TEST(ImpreciseTree, MarkovUsesLastState) {
    const auto a = c({{0.9, 0.1}});
    const auto b = c({{0.2, 0.8}});
    const auto init = c({{0.5, 0.5}});
    const ImpreciseTree t(StateSpace({"a", "b"}), Markov<CredalSet>{init, {a, b}});
    EXPECT_EQ(t.local_model(Situation{}), init);
    EXPECT_EQ(t.local_model(Situation{0, 1}), b);
    EXPECT_EQ(t.local_model(Situation{1, 0}), a);
}

TEST(ImpreciseTree, MarkovNeedsOneModelPerState) {
    EXPECT_THROW(ImpreciseTree(kCoin, Markov<CredalSet>{c({{0.5, 0.5}}), {c({{0.5, 0.5}})}}), InvalidInput);
}

TEST(ImpreciseTree, TableFallsBack) {
    const auto c1 = c({{0.1, 0.9}});
    const auto c0 = c({{0.5, 0.5}});
    Table<CredalSet> table{1, {{Situation{0}, c1}}, c0};
    const ImpreciseTree t(StateSpace({"a", "b"}), table);
    EXPECT_EQ(t.local_model(Situation{0}), c1);
    EXPECT_EQ(t.local_model(Situation{1, 0}), c0);
    EXPECT_EQ(t.local_model(Situation{}), c0);
}

TEST(ImpreciseTree, TableRejectsDeepEntries) {
    Table<CredalSet> table{1, {{Situation{0, 0}, c({{0.5, 0.5}})}}, c({{0.5, 0.5}})};
    EXPECT_THROW(ImpreciseTree(kCoin, table), InvalidInput);
}

TEST(ImpreciseTree, RejectsDimensionMismatch) {
    EXPECT_THROW(ImpreciseTree::homogeneous(kCoin, c({{0.2, 0.3, 0.5}})), InvalidInput);
}

TEST(ConvexHull, Membership) {
    const auto credal = c({{0.4, 0.6}, {0.6, 0.4}});
    EXPECT_TRUE(in_convex_hull(MassFunction({0.4, 0.6}), credal));
    EXPECT_TRUE(in_convex_hull(MassFunction({0.5, 0.5}), credal));
    EXPECT_FALSE(in_convex_hull(MassFunction({0.3, 0.7}), credal));
    const auto simplex = c({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    EXPECT_TRUE(in_convex_hull(MassFunction({0.2, 0.3, 0.5}), simplex));
    const auto edge = c({{1, 0, 0}, {0, 1, 0}});
    EXPECT_FALSE(in_convex_hull(MassFunction({0.2, 0.3, 0.5}), edge));
}

TEST(Compatibility, ExtremeMidpointAndOutside) {
    const auto q = imprecise_coin();
    EXPECT_TRUE(is_compatible(PreciseTree::homogeneous(kCoin, MassFunction({0.6, 0.4})), q, 5));
    EXPECT_TRUE(is_compatible(PreciseTree::homogeneous(kCoin, MassFunction({0.5, 0.5})), q, 5));
    EXPECT_FALSE(is_compatible(PreciseTree::homogeneous(kCoin, MassFunction({0.3, 0.7})), q, 5));
}

TEST(Compatibility, DetectsDeepViolation) {
    Table<MassFunction> t{2, {{Situation{1, 1}, MassFunction({0.9, 0.1})}}, MassFunction({0.5, 0.5})};
    const PreciseTree p(kCoin, t);
    EXPECT_TRUE(is_compatible(p, imprecise_coin(), 2));
    EXPECT_FALSE(is_compatible(p, imprecise_coin(), 3));
}

TEST(CompatibleTrees, CountsAndDistinctness) {
    const auto trees = enumerate_compatible(imprecise_coin(), 2);
    EXPECT_EQ(trees.count(), 8u);  // 2^(1 + 2) selections
    std::set<std::vector<double>> seen;
    for (const PreciseTree& p : trees) {
        EXPECT_TRUE(is_compatible(p, imprecise_coin(), 2));
        std::vector<double> signature;
        for (const Situation& s : {Situation{}, Situation{0}, Situation{1}}) signature.push_back(p.local_mass(s)[0]);
        seen.insert(signature);
    }
    EXPECT_EQ(seen.size(), 8u);
}

TEST(CompatibleTrees, PreciseSituationsAreNotChoices) {
    Table<CredalSet> t{1, {{Situation{0}, c({{0.5, 0.5}})}}, c({{0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}})};
    const CompatibleTrees trees(ImpreciseTree(kCoin, t), 2);
    EXPECT_EQ(trees.count(), 9u);  // 3 at the root, 1 at (H), 3 at (T)
    EXPECT_EQ(trees.choice_points().size(), 2u);
}

TEST(CompatibleTrees, CapNamesTheCount) {
    try {
        enumerate_compatible(imprecise_coin(), 5, 1000);
        FAIL() << "expected a resource limit";
    } catch (const ResourceLimit& e) {
        EXPECT_EQ(e.requested(), std::size_t{1} << 31);
        EXPECT_EQ(e.cap(), 1000u);
    }
}

TEST(CompatibleTrees, AnchorRestrictsChoices) {
    const CompatibleTrees trees(imprecise_coin(), 3, Situation{1, 1});
    EXPECT_EQ(trees.count(), 2u);
    EXPECT_EQ(trees.choice_points().front(), (Situation{1, 1}));
}

TEST(PreciseTree, AsImprecise) {
    const auto p = PreciseTree::homogeneous(kCoin, MassFunction({0.3, 0.7}));
    const ImpreciseTree q = p.as_imprecise();
    EXPECT_TRUE(q.local_model(Situation{0, 0}).is_precise());
    EXPECT_EQ(q.local_model(Situation{0})[0], MassFunction({0.3, 0.7}));
    const PreciseTree rule(kCoin, make_point_selection(imprecise_coin(), 2, {}));
    EXPECT_THROW(rule.as_imprecise(), InvalidInput);
}

TEST(PreciseTree, PointSelectionDefaultsToFirstPoint) {
    const PreciseTree p(kCoin, make_point_selection(imprecise_coin(), 2, {{Situation{1}, 1}}));
    EXPECT_EQ(p.local_mass(Situation{1}), MassFunction({0.6, 0.4}));
    EXPECT_EQ(p.local_mass(Situation{0}), MassFunction({0.4, 0.6}));
    EXPECT_EQ(p.local_mass(Situation{1, 1}), MassFunction({0.4, 0.6}));
    EXPECT_THROW(make_point_selection(imprecise_coin(), 2, {{Situation{1}, 2}}), InvalidInput);
}
