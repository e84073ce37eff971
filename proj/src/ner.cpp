#include "byline/ner.hpp"

#include "byline/text.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <unordered_set>

namespace byline::ner {

namespace {

constexpr std::array<std::string_view, 44> kCasedLanguages{
    "be", "bg", "bs", "ca", "cs", "cy", "da", "de", "el", "en", "es", "et", "eu", "fi", "fr",
    "ga", "gl", "hr", "hu", "id", "is", "it", "lt", "lv", "mk", "ms", "nb", "nl", "nn", "no",
    "pl", "pt", "ro", "ru", "sk", "sl", "sq", "sr", "sv", "tr", "uk", "vi", "af", "lb"};
constexpr std::array<std::string_view, 18> kUncasedLanguages{"ar", "bn", "fa", "gu", "he", "hi", "ja", "kn", "ko",
                                                             "ml", "mr", "ne", "pa", "ta", "te", "th", "ur", "zh"};
// Scripts written without spaces between words.
constexpr std::array<std::string_view, 3> kNoWordSpacing{"zh", "ja", "th"};

// Words that get capitalized at the start of a sentence and so may open a
// capitalized run without being part of a name; byline cues are included.
const std::unordered_set<std::string>& leading_function_words() {
    static const std::unordered_set<std::string> words{
        // en
        "the", "a", "an", "in", "on", "at", "by", "but", "and", "or", "if", "when", "while", "as", "after",
        "before", "this", "that", "these", "those", "it", "he", "she", "they", "we", "his", "her", "their",
        "our", "for", "from", "with", "according", "written", "reported", "author", "photo", "via", "so",
        // fr
        "le", "la", "les", "un", "une", "des", "par", "pour", "dans", "selon", "mais", "et", "auteur",
        // de
        "der", "die", "das", "ein", "eine", "von", "am", "im", "und", "aber", "laut", "autor",
        // es
        "el", "los", "las", "una", "por", "según", "en", "pero", "y",
        // da
        "af", "den", "det", "et", "i", "og", "men", "skrevet",
        // ru
        "в", "на", "по", "и", "но", "автор", "это", "как",
        // el
        "ο", "η", "το", "οι", "τα", "του", "της", "και", "στο", "στη", "στην", "γράφει"};
    return words;
}

const std::unordered_set<std::string>& honorifics() {
    static const std::unordered_set<std::string> words{"mr", "mr.", "mrs", "mrs.", "ms", "ms.", "dr", "dr.",
                                                       "prof", "prof.", "herr", "frau", "mme", "m."};
    return words;
}

// Lowercase particles allowed inside a name when a capitalized token follows.
const std::unordered_set<std::string>& name_particles() {
    static const std::unordered_set<std::string> words{"van", "von", "de", "da", "del", "der", "den", "di",
                                                       "du", "la", "le", "bin", "ibn", "al", "dos", "das"};
    return words;
}

const std::unordered_set<std::string>& organization_suffixes() {
    static const std::unordered_set<std::string> words{
        "inc", "ltd", "llc", "corp", "gmbh", "ag", "news", "press", "agency", "times", "post", "group",
        "media", "tv", "radio", "associated", "reuters", "afp", "ministry", "university", "party"};
    return words;
}

bool sentence_terminator(char32_t c) {
    return c == U'.' || c == U'!' || c == U'?' || c == U'…' || c == U'\n' || c == U'।' || c == U'؟' ||
           c == U'。' || c == U'！' || c == U'？';
}

struct Token {
    std::size_t begin = 0;  // core span in code points
    std::size_t end = 0;
    bool lead_punct = false;
    bool trail_punct = false;
    bool sentence_initial = false;
    bool newline_before = false;
    std::string lower;
};

bool is_initial(std::u32string_view core) {
    return core.size() == 2 && text::is_letter(core[0]) && core[1] == U'.';
}

std::vector<Token> tokenize(std::u32string_view t) {
    std::vector<Token> out;
    std::size_t i = 0;
    bool boundary = true;  // next token starts a sentence
    bool newline = false;
    while (i < t.size()) {
        if (text::is_space(t[i])) {
            if (t[i] == U'\n') {
                newline = true;
                boundary = true;
            }
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < t.size() && !text::is_space(t[j])) ++j;
        std::size_t b = i;
        std::size_t e = j;
        while (b < e && !text::is_word_char(t[b]) && !text::is_digit(t[b])) ++b;
        const auto raw_end = e;
        while (e > b && !text::is_word_char(t[e - 1]) && !text::is_digit(t[e - 1])) --e;
        // Keep the period of an initial ("J.") or an abbreviated title ("Dr.").
        if (e < raw_end && t[e] == U'.' &&
            (is_initial(t.substr(b, e + 1 - b)) ||
             honorifics().contains(text::lowercase(text::to_utf8(t.substr(b, e + 1 - b))))))
            ++e;
        Token tok;
        tok.begin = b;
        tok.end = e;
        tok.lead_punct = b > i;
        tok.trail_punct = e < raw_end;
        tok.sentence_initial = boundary;
        tok.newline_before = newline;
        tok.lower = text::lowercase(text::to_utf8(t.substr(b, e - b)));
        bool ends_sentence = false;
        for (std::size_t k = e; k < raw_end; ++k) ends_sentence = ends_sentence || sentence_terminator(t[k]);
        if (b == e) {
            // Pure punctuation token such as "—" or "|".
            ends_sentence = std::any_of(t.begin() + static_cast<std::ptrdiff_t>(i),
                                        t.begin() + static_cast<std::ptrdiff_t>(j), sentence_terminator);
            boundary = boundary || ends_sentence;
            out.push_back(tok);
            i = j;
            newline = false;
            continue;
        }
        out.push_back(tok);
        boundary = ends_sentence;
        newline = false;
        i = j;
    }
    return out;
}

bool capitalized(std::u32string_view t, const Token& tok) {
    if (tok.begin == tok.end) return false;
    if (!text::is_upper(t[tok.begin])) return false;
    return true;
}

bool all_caps(std::u32string_view core) {
    std::size_t letters = 0;
    for (char32_t c : core) {
        if (!text::is_letter(c)) continue;
        if (!text::is_upper(c)) return false;
        ++letters;
    }
    return letters >= 2;
}

struct Mention {
    std::size_t begin;
    std::size_t end;
    std::size_t tokens;
    bool sentence_initial;
};

}  // namespace

std::string_view to_string(EntityKind k) {
    switch (k) {
        case EntityKind::person:
            return "person";
        case EntityKind::organization:
            return "organization";
        case EntityKind::other:
            return "other";
    }
    return "other";
}

EntityKind kind_from_string(std::string_view s) {
    if (s == "person" || s == "PER") return EntityKind::person;
    if (s == "organization" || s == "ORG") return EntityKind::organization;
    return EntityKind::other;
}

Gazetteer Gazetteer::parse(std::istream& in) {
    Gazetteer g;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        g.add(t);
    }
    return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NerError("cannot open gazetteer " + path.string());
    return parse(in);
}

void Gazetteer::add(std::string_view name) {
    auto n = text::collapse_whitespace(text::nfc(name));
    if (!n.empty()) names_.insert(std::move(n));
}

bool is_uncased_language(std::string_view language) {
    return std::find(kUncasedLanguages.begin(), kUncasedLanguages.end(), language) != kUncasedLanguages.end();
}

bool RuleBasedNer::supports(std::string_view language) const {
    return is_uncased_language(language) ||
           std::find(kCasedLanguages.begin(), kCasedLanguages.end(), language) != kCasedLanguages.end();
}

std::vector<CandidateEntity> RuleBasedNer::annotate(std::string_view text_utf8, std::string_view language) {
    if (!supports(language)) throw NerError("rule-based NER does not support language \"" + std::string(language) + "\"");
    const auto cps = text::to_code_points(text_utf8);
    if (is_uncased_language(language)) return annotate_uncased(cps, language);
    return annotate_cased(cps);
}

std::vector<CandidateEntity> RuleBasedNer::annotate_cased(std::u32string_view t) const {
    const auto tokens = tokenize(t);
    std::vector<Mention> mentions;

    std::size_t i = 0;
    while (i < tokens.size()) {
        if (!capitalized(t, tokens[i])) {
            ++i;
            continue;
        }
        std::size_t first = i;
        std::size_t last = i;  // inclusive
        while (!tokens[last].trail_punct && last + 1 < tokens.size()) {
            const Token& next = tokens[last + 1];
            if (next.newline_before || next.lead_punct) break;
            if (capitalized(t, next)) {
                ++last;
                continue;
            }
            // A particle joins only when a capitalized token follows it.
            if (name_particles().contains(next.lower) && !next.trail_punct && last + 2 < tokens.size() &&
                !tokens[last + 2].newline_before && !tokens[last + 2].lead_punct && capitalized(t, tokens[last + 2])) {
                last += 2;
                continue;
            }
            break;
        }
        const std::size_t resume = last + 1;
        const bool initial = tokens[first].sentence_initial;
        while (first <= last && (honorifics().contains(tokens[first].lower) ||
                                 (first == i && initial && leading_function_words().contains(tokens[first].lower)))) {
            ++first;
        }
        if (first <= last) {
            mentions.push_back({tokens[first].begin, tokens[last].end, last - first + 1, first == i && initial});
        }
        i = resume;
    }

    struct Agg {
        std::size_t first_offset;
        std::size_t frequency = 0;
        std::size_t tokens;
        bool seen_non_initial = false;
    };
    std::map<std::u32string, Agg> agg;
    std::vector<std::u32string> order;
    for (const auto& m : mentions) {
        auto surface = std::u32string(t.substr(m.begin, m.end - m.begin));
        auto [it, inserted] = agg.try_emplace(surface, Agg{m.begin, 0, m.tokens});
        if (inserted) order.push_back(surface);
        ++it->second.frequency;
        it->second.seen_non_initial = it->second.seen_non_initial || !m.sentence_initial;
    }

    std::vector<CandidateEntity> out;
    for (const auto& surface : order) {
        const auto& a = agg.at(surface);
        auto s = text::to_utf8(surface);
        EntityKind kind = EntityKind::other;
        if (persons_.contains(s)) {
            kind = EntityKind::person;
        } else if (organizations_.contains(s)) {
            kind = EntityKind::organization;
        } else if (a.tokens >= 2) {
            const auto words = text::split_whitespace(s);
            const auto last_word = text::lowercase(text::strip_punct(words.back()));
            const bool org = organization_suffixes().contains(last_word) || all_caps(surface);
            kind = org ? EntityKind::organization : EntityKind::person;
        } else if (!a.seen_non_initial) {
            continue;  // a capitalized sentence opener, not a name
        } else if (all_caps(surface) || organization_suffixes().contains(text::lowercase(s))) {
            kind = EntityKind::organization;
        }
        out.push_back({std::move(s), kind, a.first_offset, a.frequency});
    }
    return out;
}

std::vector<CandidateEntity> RuleBasedNer::annotate_uncased(std::u32string_view t, std::string_view language) const {
    const bool spaced = std::find(kNoWordSpacing.begin(), kNoWordSpacing.end(), language) == kNoWordSpacing.end();
    struct Entry {
        std::u32string name;
        EntityKind kind;
    };
    std::vector<Entry> entries;
    for (const auto& n : persons_.names()) entries.push_back({text::to_code_points(n), EntityKind::person});
    for (const auto& n : organizations_.names()) {
        if (!persons_.contains(n)) entries.push_back({text::to_code_points(n), EntityKind::organization});
    }
    // Longer names claim their span first ("李伟明" before "李伟").
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.name.size() > b.name.size(); });

    std::vector<bool> taken(t.size(), false);
    std::vector<CandidateEntity> out;
    for (const auto& e : entries) {
        if (e.name.empty()) continue;
        CandidateEntity ent{text::to_utf8(e.name), e.kind, 0, 0};
        std::size_t pos = 0;
        while ((pos = t.find(e.name, pos)) != std::u32string_view::npos) {
            const auto end = pos + e.name.size();
            const bool free = std::none_of(taken.begin() + static_cast<std::ptrdiff_t>(pos),
                                           taken.begin() + static_cast<std::ptrdiff_t>(end), [](bool b) { return b; });
            const bool bounded = !spaced || ((pos == 0 || !text::is_word_char(t[pos - 1])) &&
                                             (end == t.size() || !text::is_word_char(t[end])));
            if (free && bounded) {
                std::fill(taken.begin() + static_cast<std::ptrdiff_t>(pos), taken.begin() + static_cast<std::ptrdiff_t>(end),
                          true);
                if (ent.frequency == 0) ent.first_offset = pos;
                ++ent.frequency;
                pos = end;
            } else {
                ++pos;
            }
        }
        if (ent.frequency > 0) out.push_back(std::move(ent));
    }
    std::sort(out.begin(), out.end(),
              [](const CandidateEntity& a, const CandidateEntity& b) { return a.first_offset < b.first_offset; });
    return out;
}

std::vector<std::string> select_authors(std::span<const CandidateEntity> entities, const SelectOptions& options) {
    if (options.k < 1) throw std::invalid_argument("select_authors: k must be >= 1");
    std::vector<const CandidateEntity*> pool;
    for (const auto& e : entities) {
        if (e.kind == EntityKind::person || (options.include_organizations && e.kind == EntityKind::organization))
            pool.push_back(&e);
    }
    // Surface and kind complete the order so any input permutation gives
    // the same output.
    std::sort(pool.begin(), pool.end(), [](const CandidateEntity* a, const CandidateEntity* b) {
        return std::tie(a->frequency, a->first_offset, a->surface, a->kind) <
               std::tie(b->frequency, b->first_offset, b->surface, b->kind);
    });
    std::vector<std::string> out;
    for (const auto* e : pool) {
        if (out.size() == options.k) break;
        if (std::find(out.begin(), out.end(), e->surface) == out.end()) out.push_back(e->surface);
    }
    return out;
}

ExtractionResult ner_extract(const html::Document& doc, std::string_view language, NerProvider& provider,
                             const SelectOptions& options) {
    const auto body = doc.body_text();
    ExtractionResult r;
    if (text::trim(body).empty()) return r;
    const auto entities = provider.annotate(body, language);
    r.authors = select_authors(entities, options);
    if (!r.authors.empty()) {
        r.method = Method::ner_fallback;
        r.raw = r.authors;
    }
    return r;
}

ExtractionResult ner_extract(std::string_view html, std::string_view language, NerProvider& provider,
                             const SelectOptions& options) {
    return ner_extract(html::Document::parse(html), language, provider, options);
}

}  // namespace byline::ner
