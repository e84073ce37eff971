#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "byline/ner.hpp"

using namespace byline;
using namespace byline::ner;
using Names = std::vector<std::string>;

namespace {

const CandidateEntity* find(const std::vector<CandidateEntity>& v, std::string_view surface) {
    const auto it = std::find_if(v.begin(), v.end(), [&](const CandidateEntity& e) { return e.surface == surface; });
    return it == v.end() ? nullptr : &*it;
}

// Brute-force selection: order by (frequency, offset, surface) over persons.
Names oracle_select(std::vector<CandidateEntity> es, std::size_t k) {
    std::erase_if(es, [](const CandidateEntity& e) { return e.kind != EntityKind::person; });
    std::sort(es.begin(), es.end(), [](const auto& a, const auto& b) {
        return std::tie(a.frequency, a.first_offset, a.surface) < std::tie(b.frequency, b.first_offset, b.surface);
    });
    Names out;
    for (const auto& e : es)
        if (out.size() < k && std::find(out.begin(), out.end(), e.surface) == out.end()) out.push_back(e.surface);
    return out;
}

}  // namespace

TEST(RuleBased, CountsRepeatedPerson) {
    RuleBasedNer ner;
    const auto es = ner.annotate("Jane Doe reported from Paris. Jane Doe is here.", "en");
    const auto* jane = find(es, "Jane Doe");
    ASSERT_NE(jane, nullptr);
    EXPECT_EQ(jane->kind, EntityKind::person);
    EXPECT_EQ(jane->frequency, 2u);
    EXPECT_EQ(jane->first_offset, 0u);
    const auto* paris = find(es, "Paris");
    ASSERT_NE(paris, nullptr);
    EXPECT_NE(paris->kind, EntityKind::person);
    EXPECT_EQ(paris->frequency, 1u);
}

TEST(RuleBased, NoCapitalizedRuns) {
    RuleBasedNer ner;
    EXPECT_TRUE(ner.annotate("nothing capitalized here at all.", "en").empty());
}

TEST(RuleBased, UncasedNeedsGazetteer) {
    RuleBasedNer empty;
    EXPECT_TRUE(empty.annotate("王小明今天在北京发表讲话。", "zh").empty());
    Gazetteer persons;
    persons.add("王小明");
    RuleBasedNer ner(persons, {});
    const auto es = ner.annotate("王小明今天在北京发表讲话。王小明说。", "zh");
    ASSERT_EQ(es.size(), 1u);
    EXPECT_EQ(es[0].surface, "王小明");
    EXPECT_EQ(es[0].frequency, 2u);
    EXPECT_EQ(es[0].kind, EntityKind::person);
}

TEST(RuleBased, OrganizationSuffixAndGazetteer) {
    Gazetteer orgs;
    orgs.add("Acme Widgets");
    RuleBasedNer ner({}, orgs);
    const auto es = ner.annotate("Staff at Global Media Group and Acme Widgets agreed, said Omar Haddad.", "en");
    ASSERT_NE(find(es, "Global Media Group"), nullptr);
    EXPECT_EQ(find(es, "Global Media Group")->kind, EntityKind::organization);
    EXPECT_EQ(find(es, "Acme Widgets")->kind, EntityKind::organization);
    EXPECT_EQ(find(es, "Omar Haddad")->kind, EntityKind::person);
}

TEST(RuleBased, HonorificsPeeled) {
    RuleBasedNer ner;
    const auto es = ner.annotate("The minister, Dr. Anna Berg, spoke.", "en");
    EXPECT_NE(find(es, "Anna Berg"), nullptr);
}

TEST(RuleBased, CyrillicAndGreek) {
    RuleBasedNer ner;
    EXPECT_NE(find(ner.annotate("Как сказал Иван Петров, план готов.", "ru"), "Иван Петров"), nullptr);
    EXPECT_NE(find(ner.annotate("Χθες ο Γιώργος Παπαδόπουλος είπε.", "el"), "Γιώργος Παπαδόπουλος"), nullptr);
}

TEST(Gazetteer, ParseSkipsComments) {
    std::istringstream in("# people\nJane  Doe\n\n  Ana Lima \n# end\n");
    const auto g = Gazetteer::parse(in);
    EXPECT_EQ(g.names().size(), 2u);
    EXPECT_TRUE(g.contains("Jane Doe"));
    EXPECT_TRUE(g.contains("Ana Lima"));
}

TEST(Select, HandRule) {
    const std::vector<CandidateEntity> es{{"John Smith", EntityKind::person, 10, 1},
                                          {"Paris", EntityKind::other, 0, 5},
                                          {"Reuters", EntityKind::organization, 3, 3},
                                          {"Mary Lee", EntityKind::person, 40, 1}};
    EXPECT_EQ(select_authors(es), (Names{"John Smith", "Mary Lee"}));
}

TEST(Select, FiveFrequencies) {
    const std::vector<CandidateEntity> es{{"C", EntityKind::person, 5, 2},
                                          {"E", EntityKind::person, 1, 3},
                                          {"A", EntityKind::person, 30, 1},
                                          {"D", EntityKind::person, 0, 3},
                                          {"B", EntityKind::person, 20, 1}};
    EXPECT_EQ(select_authors(es), (Names{"B", "A", "C"}));
    EXPECT_EQ(select_authors(es), oracle_select(es, 3));
}

TEST(Select, EmptyAndK) {
    EXPECT_TRUE(select_authors({}).empty());
    const std::vector<CandidateEntity> es{{"A", EntityKind::person, 0, 1}, {"B", EntityKind::person, 1, 1}};
    EXPECT_EQ(select_authors(es, SelectOptions{1, false}), Names{"A"});
}

TEST(Select, OrganizationsOptIn) {
    const std::vector<CandidateEntity> es{{"Reuters", EntityKind::organization, 0, 1}};
    EXPECT_TRUE(select_authors(es).empty());
    EXPECT_EQ(select_authors(es, SelectOptions{3, true}), Names{"Reuters"});
}

TEST(Select, MatchesOracleAndIgnoresInputOrder) {
    std::mt19937 rng(3);
    const Names surfaces{"A", "B", "C", "D", "E", "F", "G"};
    for (int round = 0; round < 500; ++round) {
        std::vector<CandidateEntity> es;
        for (const auto& s : surfaces) {
            if (rng() % 3 == 0) continue;
            const auto kind = rng() % 4 == 0 ? EntityKind::organization : EntityKind::person;
            es.push_back({s, kind, rng() % 50, 1 + rng() % 4});
        }
        const auto expected = oracle_select(es, 3);
        ASSERT_EQ(select_authors(es), expected);
        ASSERT_LE(expected.size(), 3u);
        std::shuffle(es.begin(), es.end(), rng);
        ASSERT_EQ(select_authors(es), expected);
    }
}

TEST(NerExtract, BylineNameRanksFirst) {
    RuleBasedNer ner;
    const std::string html =
        "<html><body><p>Reporting by Lena Fischer.</p><p>Mayor Tomas Berg opened the bridge. "
        "Officials praised Tomas Berg. Later Tomas Berg spoke. Critics said Tomas Berg was late. "
        "Residents thanked Tomas Berg. Finally Tomas Berg left.</p></body></html>";
    const auto r = ner_extract(html, "en", ner);
    ASSERT_FALSE(r.authors.empty());
    EXPECT_EQ(r.authors.front(), "Lena Fischer");
    EXPECT_EQ(r.method, Method::ner_fallback);
}

TEST(NerExtract, NoPersons) {
    RuleBasedNer ner;
    const auto r = ner_extract("<p>nothing here.</p>", "en", ner);
    EXPECT_TRUE(r.authors.empty());
    EXPECT_EQ(r.method, Method::none);
}

TEST(NerExtract, KOneBound) {
    RuleBasedNer ner;
    const auto r = ner_extract("<p>Officials said Greta Lund and Omar Haddad and Sara Noor met.</p>", "en", ner,
                               SelectOptions{1, false});
    EXPECT_EQ(r.authors.size(), 1u);
}

TEST(Serialized, DelegatesAndIsSafe) {
    auto inner = std::make_shared<RuleBasedNer>();
    SerializedProvider p(inner);
    EXPECT_TRUE(p.concurrent_safe());
    EXPECT_EQ(p.name(), "rule-based");
    EXPECT_EQ(p.annotate("Said Omar Haddad.", "en"), inner->annotate("Said Omar Haddad.", "en"));
}

TEST(Kinds, Strings) {
    EXPECT_EQ(kind_from_string("PER"), EntityKind::person);
    EXPECT_EQ(kind_from_string("organization"), EntityKind::organization);
    EXPECT_EQ(kind_from_string("LOC"), EntityKind::other);
    EXPECT_EQ(to_string(EntityKind::person), "person");
}
