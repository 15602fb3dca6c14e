#include <gtest/gtest.h>

#include <set>

#include "iptree/situation.hpp"

using namespace iptree;

TEST(Situation, PrefixAndExtension) {
    const Situation s{0, 1, 1};
    EXPECT_EQ(s.prefix(2), (Situation{0, 1}));
    EXPECT_EQ(s.prefix(5), s);
    EXPECT_EQ(s.extended(0), (Situation{0, 1, 1, 0}));
    EXPECT_TRUE(Situation{}.precedes(s));
    EXPECT_TRUE((Situation{0, 1}).precedes(s));
    EXPECT_FALSE((Situation{1}).precedes(s));
    EXPECT_FALSE(s.precedes(Situation{0}));
}

TEST(Situation, Validation) {
    EXPECT_NO_THROW((Situation{0, 1}).validate(2));
    EXPECT_THROW((Situation{0, 2}).validate(2), InvalidInput);
}

TEST(Situation, FormatAndParse) {
    const StateSpace space({"H", "T"});
    EXPECT_EQ(format_situation(Situation{}, space), "");
    EXPECT_EQ(format_situation(Situation{0, 1}, space), "H,T");
    EXPECT_EQ(parse_situation("T,H,H", space), (Situation{1, 0, 0}));
    EXPECT_EQ(parse_situation("", space), Situation{});
    EXPECT_THROW(parse_situation("H,X", space), InvalidInput);
    EXPECT_THROW(parse_situation("H,", space), InvalidInput);
}

TEST(Situation, SplitLabels) {
    EXPECT_TRUE(split_labels("").empty());
    EXPECT_EQ(split_labels("a,bb,c"), (std::vector<std::string>{"a", "bb", "c"}));
    EXPECT_EQ(split_labels("a,"), (std::vector<std::string>{"a", ""}));
}

TEST(Situation, StringIndexRoundTrip) {
    for (std::size_t i = 0; i < 27; ++i) EXPECT_EQ(string_index(string_at(i, 3, 3).states(), 3), i);
    EXPECT_EQ(string_at(5, 3, 2), (Situation{1, 0, 1}));
}

TEST(Situation, CheckedPower) {
    EXPECT_EQ(checked_power(2, 10, 1u << 20), 1024u);
    EXPECT_EQ(checked_power(7, 0, 1), 1u);
    EXPECT_THROW(checked_power(2, 13, 4096), ResourceLimit);
}

TEST(PrefixCoder, NumbersEverySituation) {
    const PrefixCoder coder(2, 2);
    EXPECT_EQ(coder.count(), 8u);  // 1 + 2 + 4 + deep
    std::set<std::size_t> codes;
    for (std::size_t len = 0; len <= 2; ++len) {
        for (std::size_t i = 0; i < (1u << len); ++i) {
            const std::size_t c = coder.code_of(string_at(i, len, 2));
            EXPECT_EQ(coder.length(c), len);
            codes.insert(c);
        }
    }
    EXPECT_EQ(codes.size(), 7u);
    EXPECT_EQ(coder.code_of(Situation{0, 1, 1}), coder.deep());
    EXPECT_EQ(coder.next(coder.deep(), 0), coder.deep());
    EXPECT_EQ(coder.next(coder.code_of(Situation{1}), 0), coder.code_of(Situation{1, 0}));
}
