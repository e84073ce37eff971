#include <gtest/gtest.h>

#include "byline/html.hpp"

using namespace byline::html;

namespace {

NodeId first(const Document& d, std::string_view tag) {
    const auto v = d.elements_by_tag(tag);
    return v.empty() ? kRoot : v.front();
}

}  // namespace

TEST(Parse, AttributesAreLowercasedAndDecoded) {
    const auto d = Document::parse(R"(<META NAME="Author" CONTENT="Jos&eacute; &amp; Ana">)");
    const auto m = first(d, "meta");
    ASSERT_NE(m, kRoot);
    EXPECT_EQ(d.attribute(m, "name"), "Author");
    EXPECT_EQ(d.attribute(m, "content"), "José & Ana");
}

TEST(Parse, UnquotedAndValuelessAttributes) {
    const auto d = Document::parse("<a rel=author href=/x hidden>Sam</a>");
    const auto a = first(d, "a");
    EXPECT_EQ(d.attribute(a, "rel"), "author");
    EXPECT_EQ(d.attribute(a, "hidden"), "");
    EXPECT_FALSE(d.attribute(a, "class").has_value());
}

TEST(Parse, ScriptIsRawText) {
    const auto d = Document::parse(R"(<script type="application/ld+json">{"a":"<b>x</b>"}</script><p>y</p>)");
    const auto s = first(d, "script");
    EXPECT_EQ(d.raw_text(s), R"({"a":"<b>x</b>"})");
    EXPECT_TRUE(d.elements_by_tag("b").empty());
}

TEST(Parse, StrayEndTagsAndUnclosedElements) {
    const auto d = Document::parse("</div><div><p>one<p>two</span></div><ul><li>a<li>b");
    EXPECT_EQ(d.elements_by_tag("p").size(), 2u);
    EXPECT_EQ(d.elements_by_tag("li").size(), 2u);
    EXPECT_EQ(d.visible_text(), "one\ntwo\na\nb");
}

TEST(Parse, TableCellsCloseImplicitly) {
    const auto d = Document::parse("<table><tr><td>a<td>b<tr><td>c</table>");
    EXPECT_EQ(d.elements_by_tag("tr").size(), 2u);
    EXPECT_EQ(d.elements_by_tag("td").size(), 3u);
    const auto rows = d.elements_by_tag("tr");
    EXPECT_EQ(d.node(rows[0]).children.size(), 2u);
}

TEST(Parse, CommentsAndDoctype) {
    const auto d = Document::parse("<!DOCTYPE html><!-- By Hidden Person --><p>shown</p><?xml x?>");
    EXPECT_EQ(d.visible_text(), "shown");
}

TEST(Parse, LessThanWithoutTagIsText) {
    const auto d = Document::parse("<p>a < b and 3<4</p>");
    EXPECT_EQ(d.visible_text(), "a < b and 3<4");
}

TEST(VisibleText, SkipsNonContent) {
    const auto d = Document::parse(
        "<html><head><title>T</title><style>p{}</style></head><body><noscript>n</noscript>"
        "<p>Hello <b>big</b>   world</p><br>next<template>t</template></body></html>");
    EXPECT_EQ(d.body_text(), "Hello big world\nnext");
}

TEST(Entities, NamedAndNumeric) {
    EXPECT_EQ(decode_entities("&lt;&gt;&quot;&#39;&#x41;&#66;"), "<>\"'AB");
    EXPECT_EQ(decode_entities("&amp &nbsp;x"), "&  x");
    EXPECT_EQ(decode_entities("&unknown; &#xZZ;"), "&unknown; &#xZZ;");
    EXPECT_EQ(decode_entities("M&uuml;ller"), "Müller");
}

TEST(Tree, Ancestry) {
    const auto d = Document::parse("<div class=a><span>x</span></div><p>y</p>");
    const auto div = first(d, "div");
    const auto span = first(d, "span");
    const auto p = first(d, "p");
    EXPECT_TRUE(d.is_ancestor(div, span));
    EXPECT_FALSE(d.is_ancestor(div, p));
    EXPECT_FALSE(d.is_ancestor(span, div));
}

TEST(Parse, NeverThrowsOnGarbage) {
    for (const std::string s : {"<", "<<>>", "<a href=\"", "<!--", "&#99999999;", "<script>", "\xff\xfe<p"}) {
        EXPECT_NO_THROW({
            const auto d = Document::parse(s);
            (void)d.visible_text();
        });
    }
}
