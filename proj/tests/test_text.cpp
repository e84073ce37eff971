#include <gtest/gtest.h>

#include "byline/text.hpp"

using namespace byline::text;

TEST(Utf8, RoundTrip) {
    const std::string s = "Jane Ж 张 रा \U0001F600";
    EXPECT_EQ(to_utf8(to_code_points(s)), s);
    EXPECT_EQ(length(s), 13u);
}

TEST(Utf8, InvalidBytesBecomeReplacement) {
    const auto cps = to_code_points(std::string("a\xff" "b"));
    ASSERT_EQ(cps.size(), 3u);
    EXPECT_EQ(cps[1], U'\ufffd');
}

TEST(Normalize, Nfc) {
    EXPECT_EQ(nfc("e\u0301"), "\u00e9");
    EXPECT_EQ(nfc("plain"), "plain");
}

TEST(Normalize, Lowercase) {
    EXPECT_EQ(lowercase("ANNA"), "anna");
    EXPECT_EQ(lowercase("ИВАН"), "иван");
    EXPECT_EQ(lowercase("ΔΗΜΗΤΡΗΣ"), "δημητρης");
}

TEST(Classes, Characters) {
    EXPECT_TRUE(is_space(U' '));
    EXPECT_TRUE(is_space(U'\u00a0'));
    EXPECT_TRUE(is_space(U'\u200b'));
    EXPECT_TRUE(is_punct(U'.'));
    EXPECT_TRUE(is_punct(U'»'));
    EXPECT_TRUE(is_punct(U'|'));
    EXPECT_FALSE(is_punct(U'a'));
    EXPECT_TRUE(is_letter(U'张'));
    EXPECT_TRUE(is_upper(U'Ж'));
    EXPECT_TRUE(is_lower(U'ж'));
    EXPECT_TRUE(is_digit(U'१'));
    EXPECT_TRUE(is_word_char(U'ा'));
}

TEST(Strings, TrimCollapseStrip) {
    EXPECT_EQ(trim("  a b \n"), "a b");
    EXPECT_EQ(collapse_whitespace("  a \t\n b  "), "a b");
    EXPECT_EQ(strip_punct("« Jane Doe. »"), "Jane Doe");
    EXPECT_EQ(strip_punct("..."), "");
}

TEST(Strings, SplitAndCompare) {
    EXPECT_EQ(split_whitespace(" a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_TRUE(iequals("Jane DOE", "jane doe"));
    EXPECT_FALSE(iequals("jane", "jane doe"));
    EXPECT_EQ(prefix("张三李", 2), "张三");
}
