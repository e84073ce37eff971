#include "byline/extract.hpp"

#include "byline/config.hpp"
#include "byline/corpus.hpp"
#include "byline/text.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <array>
#include <set>
#include <unordered_set>

namespace byline::extract {

namespace {

char32_t fold(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

std::u32string fold(std::u32string_view s) {
    std::u32string out(s);
    for (auto& c : out) c = fold(c);
    return out;
}

bool no_word_spacing(std::string_view language) { return language == "zh" || language == "ja" || language == "th"; }

// Adds `value` unless an entry equal to it ignoring case is present.
void push_unique(std::vector<std::string>& out, std::set<std::string>& seen, std::string value) {
    if (seen.insert(text::lowercase(value)).second) out.push_back(std::move(value));
}

const std::unordered_set<std::string>& month_words() {
    static const std::unordered_set<std::string> words{
        // en
        "jan", "january", "feb", "february", "mar", "march", "apr", "april", "may", "jun", "june", "jul", "july",
        "aug", "august", "sep", "sept", "september", "oct", "october", "nov", "november", "dec", "december",
        // fr
        "janvier", "février", "mars", "avril", "mai", "juin", "juillet", "août", "septembre", "octobre",
        "novembre", "décembre",
        // de / da
        "januar", "februar", "märz", "juni", "juli", "oktober", "dezember", "marts", "maj", "december",
        // es
        "enero", "febrero", "marzo", "abril", "mayo", "junio", "julio", "agosto", "septiembre", "octubre",
        "noviembre", "diciembre",
        // ru
        "января", "февраля", "марта", "апреля", "мая", "июня", "июля", "августа", "сентября", "октября",
        "ноября", "декабря",
        // el
        "ιανουαρίου", "φεβρουαρίου", "μαρτίου", "απριλίου", "μαΐου", "ιουνίου", "ιουλίου", "αυγούστου",
        "σεπτεμβρίου", "οκτωβρίου", "νοεμβρίου", "δεκεμβρίου"};
    return words;
}

// Capitalized words that end a byline run ("By Jane Doe Updated ...").
const std::unordered_set<std::string>& byline_stop_words() {
    static const std::unordered_set<std::string> words{
        "updated", "published", "posted", "last", "aktualisiert", "veröffentlicht", "publié", "mis",
        "actualizado", "publicado", "обновлено", "опубликовано", "opdateret", "publiceret", "ενημερώθηκε",
        "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
    return words;
}

const std::unordered_set<std::string>& name_particles() {
    static const std::unordered_set<std::string> words{"van", "von", "de", "da", "del", "der", "den", "di",
                                                       "du", "la", "le", "bin", "ibn", "al", "dos", "das"};
    return words;
}

bool has_digit(std::u32string_view s) { return std::any_of(s.begin(), s.end(), text::is_digit); }
bool has_letter(std::u32string_view s) { return std::any_of(s.begin(), s.end(), text::is_letter); }

std::vector<std::string> and_words_for(std::string_view language, const ExtractorConfig& config) {
    std::vector<std::string> out{"and"};
    if (const auto it = config.and_words.find(std::string(language)); it != config.and_words.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
        return out;
    }
    for (const auto& [_, words] : config.and_words) out.insert(out.end(), words.begin(), words.end());
    return out;
}

bool is_url_token(std::string_view tok) {
    const auto l = text::lowercase(tok);
    return l.starts_with("http://") || l.starts_with("https://") || l.starts_with("www.");
}

// Strips surrounding whitespace and punctuation but keeps the period of a
// trailing single-letter initial ("Priya N.").
std::u32string strip_name_punct(std::u32string_view s) {
    const auto strip = [](char32_t c) { return text::is_space(c) || text::is_punct(c); };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && strip(s[b])) ++b;
    while (e > b && strip(s[e - 1])) {
        if (s[e - 1] == U'.' && e >= b + 2 && text::is_letter(s[e - 2]) &&
            (e == b + 2 || text::is_space(s[e - 3]) || s[e - 3] == U'.'))
            break;
        --e;
    }
    return std::u32string(s.substr(b, e - b));
}

// Removes one leading cue ("By", "Par:", "Written by") if present.
bool strip_cue(std::u32string& s, const std::vector<std::u32string>& cues, bool unspaced) {
    const auto folded = fold(s);
    for (const auto& cue : cues) {
        if (cue.empty() || !folded.starts_with(cue)) continue;
        const auto after = cue.size();
        if (after < s.size() && text::is_word_char(cue.back()) && text::is_word_char(s[after]) && !unspaced) continue;
        std::size_t k = after;
        while (k < s.size() && (text::is_space(s[k]) || s[k] == U':' || s[k] == U'：')) ++k;
        s.erase(0, k);
        return true;
    }
    return false;
}

std::vector<std::u32string> folded_cues(std::string_view language, const ExtractorConfig& config) {
    std::vector<std::u32string> out;
    for (const auto& c : config.bylines.cues_for(language)) out.push_back(fold(text::to_code_points(c)));
    return out;
}

bool is_separator_char(char32_t c) {
    return c == U',' || c == U';' || c == U'/' || c == U'&' || c == U'،' || c == U'、' || c == U'，' ||
           c == U'；' || c == U'／' || c == U'＆' || c == U'؛';
}

std::string candidate_text(const html::Document& doc, html::NodeId id) {
    return text::collapse_whitespace(doc.visible_text(id));
}

bool token_list_contains(std::string_view attr_value, std::string_view token) {
    for (const auto& t : text::split_whitespace(text::lowercase(attr_value))) {
        if (t == token) return true;
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pattern table and config

BylinePatternTable BylinePatternTable::defaults() {
    BylinePatternTable t;
    t.cues_ = {
        {"en", {"by", "written by", "reported by", "author", "authors"}},
        {"fr", {"par", "auteur", "auteurs", "auteure"}},
        {"de", {"von", "autor", "autorin", "autoren"}},
        {"es", {"por", "autor", "autora", "autores"}},
        {"ru", {"автор", "авторы", "текст"}},
        {"da", {"af", "skrevet af", "forfatter"}},
        {"el", {"γράφει", "του", "της", "συντάκτης"}},
        {"hi", {"लेखक", "रिपोर्ट", "संवाददाता"}},
        {"ur", {"تحریر", "رپورٹ", "مصنف"}},
        {"zh", {"作者", "记者", "記者", "撰文", "文/", "文／"}},
    };
    t.fallback_ = {"by", "author", "autor"};
    return t;
}

void BylinePatternTable::set(const std::string& language, std::vector<std::string> cues) {
    if (!is_valid_language(language))
        throw std::invalid_argument("byline pattern table: invalid language code \"" + language + "\"");
    cues_[language] = std::move(cues);
}

std::vector<std::string> BylinePatternTable::cues_for(std::string_view language) const {
    std::vector<std::string> out;
    if (const auto it = cues_.find(std::string(language)); it != cues_.end()) out = it->second;
    for (const auto& c : fallback_) {
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const std::string& a, const std::string& b) { return text::length(a) > text::length(b); });
    return out;
}

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
    if (!j.is_array()) throw ConfigError(std::string("extractor config: \"") + key + "\" must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw ConfigError(std::string("extractor config: \"") + key + "\" must contain strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::size_t positive(const nlohmann::json& j, const char* key) {
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw ConfigError(std::string("extractor config: \"") + key + "\" must be a positive integer");
    return static_cast<std::size_t>(j.get<long long>());
}

}  // namespace

void ExtractorConfig::apply(const nlohmann::json& o) {
    if (!o.is_object()) throw ConfigError("extractor config must be a table");
    for (const auto& [key, v] : o.items()) {
        if (key == "meta_names") {
            meta_names = string_list(v, "meta_names");
        } else if (key == "class_tokens") {
            class_tokens = string_list(v, "class_tokens");
        } else if (key == "candidate_cap") {
            candidate_cap = positive(v, "candidate_cap");
        } else if (key == "byline_window") {
            byline_window = positive(v, "byline_window");
        } else if (key == "role_separators") {
            role_separators = string_list(v, "role_separators");
        } else if (key == "byline_fallback") {
            bylines.set_fallback(string_list(v, "byline_fallback"));
        } else if (key == "byline_cues" || key == "and_words") {
            if (!v.is_object()) throw ConfigError("extractor config: \"" + key + "\" must be a table of languages");
            for (const auto& [lang, list] : v.items()) {
                if (!is_valid_language(lang)) throw ConfigError("extractor config: invalid language \"" + lang + "\"");
                if (key == "byline_cues") {
                    bylines.set(lang, string_list(list, "byline_cues"));
                } else {
                    and_words[lang] = string_list(list, "and_words");
                }
            }
        } else if (key == "ner") {
            if (!v.is_object()) throw ConfigError("extractor config: \"ner\" must be a table");
            if (v.contains("k")) ner.k = positive(v["k"], "k");
            if (v.contains("include_organizations")) {
                if (!v["include_organizations"].is_boolean())
                    throw ConfigError("extractor config: \"include_organizations\" must be a boolean");
                ner.include_organizations = v["include_organizations"].get<bool>();
            }
        } else {
            throw ConfigError("extractor config: unknown key \"" + key + "\"");
        }
    }
}

ExtractorConfig load_extractor_config(const std::filesystem::path& path) {
    const auto doc = read_config_document(path);
    ExtractorConfig config;
    if (doc.contains("extractor")) {
        config.apply(doc["extractor"]);
        // The harness [ner] table also carries gazetteer paths; only the
        // selection options matter here.
        if (doc.contains("ner")) {
            nlohmann::json ner_only = nlohmann::json::object();
            if (doc["ner"].contains("k")) ner_only["k"] = doc["ner"]["k"];
            if (doc["ner"].contains("include_organizations"))
                ner_only["include_organizations"] = doc["ner"]["include_organizations"];
            config.apply(nlohmann::json{{"ner", ner_only}});
        }
    } else {
        config.apply(doc);
    }
    return config;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

constexpr std::array<std::string_view, 10> kArticleTypes{
    "article",         "newsarticle",         "blogposting",         "reportagenewsarticle", "analysisnewsarticle",
    "opinionnewsarticle", "backgroundnewsarticle", "reviewnewsarticle", "liveblogposting",   "socialmediaposting"};

bool is_article_type(const nlohmann::json& type) {
    const auto check = [](const nlohmann::json& t) {
        if (!t.is_string()) return false;
        auto s = t.get<std::string>();
        if (const auto cut = s.find_last_of("/:#"); cut != std::string::npos) s = s.substr(cut + 1);
        s = text::lowercase(s);
        return std::find(kArticleTypes.begin(), kArticleTypes.end(), s) != kArticleTypes.end();
    };
    if (type.is_array()) return std::any_of(type.begin(), type.end(), check);
    return check(type);
}

class JsonLdWalker {
public:
    explicit JsonLdWalker(const nlohmann::json& root) { index(root); }

    void walk(const nlohmann::json& node, std::vector<std::string>& out, int depth = 0) {
        if (depth > 16) return;
        if (node.is_array()) {
            for (const auto& v : node) walk(v, out, depth + 1);
            return;
        }
        if (!node.is_object()) return;
        if (const auto t = node.find("@type"); t != node.end() && is_article_type(*t)) {
            if (const auto a = node.find("author"); a != node.end()) authors(*a, out, 0);
        }
        for (const char* key : {"@graph", "mainEntity"}) {
            if (const auto g = node.find(key); g != node.end()) walk(*g, out, depth + 1);
        }
    }

private:
    void index(const nlohmann::json& node, int depth = 0) {
        if (depth > 16) return;
        if (node.is_array()) {
            for (const auto& v : node) index(v, depth + 1);
        } else if (node.is_object()) {
            if (const auto id = node.find("@id"); id != node.end() && id->is_string() && node.contains("name"))
                by_id_.emplace(id->get<std::string>(), &node);
            if (const auto g = node.find("@graph"); g != node.end()) index(*g, depth + 1);
        }
    }

    void authors(const nlohmann::json& a, std::vector<std::string>& out, int depth) {
        if (depth > 4) return;
        if (a.is_string()) {
            out.push_back(html::decode_entities(a.get<std::string>()));
        } else if (a.is_array()) {
            for (const auto& v : a) authors(v, out, depth + 1);
        } else if (a.is_object()) {
            if (const auto n = a.find("name"); n != a.end()) {
                if (n->is_string()) {
                    out.push_back(html::decode_entities(n->get<std::string>()));
                } else if (n->is_array()) {
                    for (const auto& v : *n) {
                        if (v.is_string()) out.push_back(html::decode_entities(v.get<std::string>()));
                    }
                }
            } else if (const auto id = a.find("@id"); id != a.end() && id->is_string()) {
                if (const auto it = by_id_.find(id->get<std::string>()); it != by_id_.end()) authors(*it->second, out, depth + 1);
            }
        }
    }

    std::map<std::string, const nlohmann::json*> by_id_;
};

}  // namespace

std::vector<std::string> extract_jsonld(const html::Document& doc, ExtractionDiagnostics* diag) {
    std::vector<std::string> out;
    for (const auto id : doc.elements_by_tag("script")) {
        const auto type = doc.attribute(id, "type");
        if (!type || text::lowercase(text::trim(*type)) != "application/ld+json") continue;
        const auto body = doc.raw_text(id);
        auto parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded()) {
            if (diag) ++diag->malformed_jsonld_blocks;
            continue;
        }
        JsonLdWalker walker(parsed);
        walker.walk(parsed, out);
    }
    std::vector<std::string> unique;
    std::set<std::string> seen;
    for (auto& s : out) {
        auto t = text::trim(s);
        if (!t.empty()) push_unique(unique, seen, std::move(t));
    }
    return unique;
}

std::vector<std::string> extract_meta_tags(const html::Document& doc, const ExtractorConfig& config) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto id : doc.elements_by_tag("meta")) {
        const auto content = doc.attribute(id, "content");
        if (!content) continue;
        bool wanted = false;
        std::string matched;
        for (const char* attr : {"name", "property"}) {
            const auto v = doc.attribute(id, attr);
            if (!v) continue;
            const auto key = text::lowercase(text::trim(*v));
            for (const auto& n : config.meta_names) {
                if (key == text::lowercase(n)) {
                    wanted = true;
                    matched = key;
                }
            }
        }
        if (!wanted) continue;
        auto value = text::trim(*content);
        if (value.empty()) continue;
        if (matched == "twitter:creator" && value.front() == '@') continue;
        push_unique(out, seen, std::move(value));
    }
    return out;
}

std::vector<std::string> extract_rel_author(const html::Document& doc, const ExtractorConfig& config) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    doc.for_each_element([&](html::NodeId id, const html::Node& n) {
        const auto rel = doc.attribute(id, "rel");
        if (!rel || !token_list_contains(*rel, "author")) return;
        std::string value;
        if (n.tag == "link") {
            if (const auto title = doc.attribute(id, "title")) value = text::collapse_whitespace(*title);
        } else {
            value = candidate_text(doc, id);
        }
        if (value.empty() || text::length(value) > config.candidate_cap) return;
        push_unique(out, seen, std::move(value));
    });
    return out;
}

std::vector<std::string> extract_class_heuristics(const html::Document& doc, const ExtractorConfig& config) {
    static constexpr std::array<std::string_view, 10> kSkipTags{"html", "head",   "body",     "meta", "link",
                                                                "script", "style", "noscript", "template", "img"};
    std::vector<std::string> tokens;
    for (const auto& t : config.class_tokens) tokens.push_back(text::lowercase(t));

    struct Match {
        html::NodeId id;
        std::string text;
        bool valid;
    };
    std::vector<Match> matches;
    doc.for_each_element([&](html::NodeId id, const html::Node& n) {
        if (std::find(kSkipTags.begin(), kSkipTags.end(), n.tag) != kSkipTags.end()) return;
        bool hit = false;
        for (const char* attr : {"class", "id", "itemprop", "rel"}) {
            const auto v = doc.attribute(id, attr);
            if (!v) continue;
            const auto lower = text::lowercase(*v);
            for (const auto& tok : tokens) hit = hit || lower.find(tok) != std::string::npos;
        }
        if (!hit) return;
        auto t = candidate_text(doc, id);
        const bool valid = !t.empty() && text::length(t) <= config.candidate_cap;
        matches.push_back({id, std::move(t), valid});
    });

    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& m : matches) {
        if (!m.valid) continue;
        // Nested matches: the innermost one with text wins.
        const bool has_inner = std::any_of(matches.begin(), matches.end(), [&](const Match& other) {
            return other.valid && other.id != m.id && doc.is_ancestor(m.id, other.id);
        });
        if (has_inner) continue;
        push_unique(out, seen, m.text);
    }
    return out;
}

namespace {

// Captures a run of capitalized name tokens starting at `p`.
std::size_t capture_cased(std::u32string_view w, std::size_t p, std::string_view language,
                          const ExtractorConfig& config) {
    const auto connectors = and_words_for(language, config);
    std::size_t accepted_end = p;
    std::size_t count = 0;
    std::size_t i = p;
    while (count < 12) {
        while (i < w.size() && text::is_space(w[i]) && w[i] != U'\n') ++i;
        if (i >= w.size() || w[i] == U'\n') break;
        std::size_t j = i;
        while (j < w.size() && !text::is_space(w[j])) ++j;
        const auto raw = w.substr(i, j - i);
        std::size_t b = 0;
        std::size_t e = raw.size();
        while (b < e && !text::is_word_char(raw[b]) && !text::is_digit(raw[b])) ++b;
        while (e > b && !text::is_word_char(raw[e - 1]) && !text::is_digit(raw[e - 1])) --e;
        const bool initial = e < raw.size() && raw[e] == U'.' && e - b == 1 && text::is_letter(raw[b]);
        if (initial) ++e;
        const auto core = raw.substr(b, e - b);
        const auto tail = raw.substr(e);
        ++count;

        if (core.empty()) {
            if (raw == U"&" || raw == U"," || raw == U"＆") {
                i = j;
                continue;
            }
            break;
        }
        if (b > 0 && count > 1 && raw[0] != U'"' && raw[0] != U'\'') break;
        if (has_digit(core)) break;
        const auto lower = text::lowercase(text::to_utf8(core));
        if (byline_stop_words().contains(lower)) break;
        if (month_words().contains(lower)) {
            std::size_t k = j;
            while (k < w.size() && text::is_space(w[k]) && w[k] != U'\n') ++k;
            if (k < w.size() && text::is_digit(w[k])) break;
        }
        const bool connector = std::find(connectors.begin(), connectors.end(), lower) != connectors.end() ||
                               name_particles().contains(lower);
        if (connector && tail.empty()) {
            i = j;
            continue;
        }
        if (!text::is_upper(core[0])) break;
        accepted_end = i + e;
        i = j;
        if (tail.empty()) continue;
        // A comma separates names; anything else ends the byline.
        if (std::all_of(tail.begin(), tail.end(), [](char32_t c) { return c == U','; })) continue;
        break;
    }
    return accepted_end;
}

// Uncased scripts: everything up to a line break, digit, or punctuation
// that is not a name separator, limited to a few words.
std::size_t capture_uncased(std::u32string_view w, std::size_t p, std::string_view language) {
    const bool unspaced = no_word_spacing(language);
    const std::size_t max_tokens = unspaced ? 1 : 4;
    std::size_t tokens = 0;
    std::size_t i = p;
    std::size_t end = p;
    bool in_token = false;
    for (; i < w.size(); ++i) {
        const char32_t c = w[i];
        if (c == U'\n' || text::is_digit(c)) break;
        if (text::is_space(c)) {
            if (in_token && tokens >= max_tokens) break;
            in_token = false;
            continue;
        }
        if (text::is_punct(c) && !is_separator_char(c) && c != U'-' && c != U'.') break;
        if (text::is_punct(c) && unspaced && c != U'、') break;
        if (!in_token) {
            if (tokens >= max_tokens) break;
            ++tokens;
            in_token = true;
        }
        end = i + 1;
    }
    return end;
}

}  // namespace

std::vector<std::string> extract_byline_regex(std::string_view visible_text, std::string_view language,
                                              const ExtractorConfig& config) {
    const auto window = text::to_code_points(text::prefix(visible_text, config.byline_window));
    const auto folded = fold(window);
    const auto cues = folded_cues(language, config);
    const bool unspaced = no_word_spacing(language);

    for (std::size_t pos = 0; pos < folded.size(); ++pos) {
        if (pos > 0 && text::is_word_char(window[pos - 1]) && !unspaced) continue;
        for (const auto& cue : cues) {
            if (cue.empty() || folded.compare(pos, cue.size(), cue) != 0) continue;
            std::size_t p = pos + cue.size();
            if (p < window.size() && text::is_word_char(cue.back()) && text::is_word_char(window[p]) && !unspaced)
                continue;
            while (p < window.size() && ((text::is_space(window[p]) && window[p] != U'\n') || window[p] == U':' ||
                                         window[p] == U'：'))
                ++p;
            if (p >= window.size()) continue;
            const char32_t first = window[p];
            std::size_t end = p;
            if (text::is_upper(first) || text::is_lower(first)) {
                end = capture_cased(window, p, language, config);
            } else if (text::is_word_char(first)) {
                end = capture_uncased(window, p, language);
            }
            auto captured = strip_name_punct(std::u32string_view(window).substr(p, end - p));
            if (!captured.empty()) return {text::to_utf8(captured)};
        }
    }
    return {};
}

std::vector<std::string> extract_jsonld(std::string_view html, ExtractionDiagnostics* diag) {
    return extract_jsonld(html::Document::parse(html), diag);
}

std::vector<std::string> extract_meta_tags(std::string_view html, const ExtractorConfig& config) {
    return extract_meta_tags(html::Document::parse(html), config);
}

std::vector<std::string> extract_class_heuristics(std::string_view html, const ExtractorConfig& config) {
    return extract_class_heuristics(html::Document::parse(html), config);
}

// ---------------------------------------------------------------------------
// Cleaning

std::vector<std::string> clean_author_string(std::string_view raw, std::string_view language,
                                             const ExtractorConfig& config) {
    const bool unspaced = no_word_spacing(language);
    const auto cues = folded_cues(language, config);

    // Drop URL tokens, then cut at the first role/date separator.
    std::string joined;
    for (const auto& tok : text::split_whitespace(text::nfc(raw))) {
        if (is_url_token(tok)) continue;
        if (!joined.empty()) joined += ' ';
        joined += tok;
    }
    std::u32string s = text::to_code_points(joined);
    std::vector<std::u32string> seps;
    for (const auto& r : config.role_separators) seps.push_back(text::to_code_points(r));
    {
        std::u32string head;
        std::size_t i = 0;
        while (i < s.size()) {
            std::size_t hit = 0;
            for (const auto& sep : seps) {
                if (!sep.empty() && s.compare(i, sep.size(), sep) == 0) hit = sep.size();
            }
            if (hit == 0) {
                head.push_back(s[i++]);
                continue;
            }
            if (!strip_name_punct(head).empty()) break;
            head.clear();
            i += hit;
        }
        s = head;
    }

    const auto normalize = [&](std::u32string frag) {
        while (true) {
            auto before = frag;
            frag = strip_name_punct(frag);
            strip_cue(frag, cues, unspaced);
            if (frag == before) break;
        }
        return frag;
    };
    s = normalize(std::move(s));

    // Split on separator characters and whole-word "and" equivalents.
    std::vector<std::u32string> and_words;
    for (const auto& w : and_words_for(language, config)) and_words.push_back(fold(text::to_code_points(w)));
    std::vector<std::u32string> fragments;
    std::u32string cur;
    std::u32string word;
    const auto flush_word = [&](bool at_separator) {
        if (!word.empty() && at_separator &&
            std::find(and_words.begin(), and_words.end(), fold(word)) != and_words.end()) {
            // The connector itself is dropped; what precedes it is a fragment.
            cur.resize(cur.size() - word.size());
            fragments.push_back(cur);
            cur.clear();
        }
        word.clear();
    };
    for (char32_t c : s) {
        if (is_separator_char(c)) {
            flush_word(true);
            fragments.push_back(cur);
            cur.clear();
            continue;
        }
        if (text::is_space(c)) {
            flush_word(true);
            cur.push_back(c);
            continue;
        }
        cur.push_back(c);
        word.push_back(c);
    }
    flush_word(true);
    fragments.push_back(cur);

    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& f : fragments) {
        auto frag = normalize(text::to_code_points(text::collapse_whitespace(text::to_utf8(f))));
        if (frag.size() < 2 || !has_letter(frag)) continue;
        if (has_digit(frag)) {
            // "Jan 3" left over from a date.
            bool date = false;
            for (const auto& w : text::split_whitespace(text::to_utf8(frag)))
                date = date || month_words().contains(text::lowercase(text::strip_punct(w)));
            if (date) continue;
        }
        push_unique(out, seen, text::to_utf8(frag));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cascade

ExtractionResult extract(std::string_view html, std::string_view language, ner::NerProvider* ner,
                         const ExtractorConfig& config) {
    if (html.empty()) throw ExtractionError("extract: html must be non-empty");
    const auto doc = html::Document::parse(html);
    ExtractionResult result;

    const auto finish = [&](std::vector<std::string> raw, Method method) {
        std::vector<std::string> authors;
        std::set<std::string> seen;
        for (const auto& r : raw) {
            for (auto& a : clean_author_string(r, language, config)) push_unique(authors, seen, std::move(a));
        }
        if (authors.empty()) return false;
        result.authors = std::move(authors);
        result.raw = std::move(raw);
        result.method = method;
        return true;
    };

    if (finish(extract_jsonld(doc, &result.diagnostics), Method::jsonld)) return result;
    if (finish(extract_meta_tags(doc, config), Method::meta_tag)) return result;
    if (finish(extract_rel_author(doc, config), Method::rel_author)) return result;
    if (finish(extract_class_heuristics(doc, config), Method::class_heuristic)) return result;
    if (finish(extract_byline_regex(doc.body_text(), language, config), Method::byline_regex)) return result;
    if (ner) {
        try {
            auto r = ner::ner_extract(doc, language, *ner, config.ner);
            if (finish(std::move(r.raw), Method::ner_fallback)) return result;
        } catch (const std::exception& e) {
            result.diagnostics.ner_error = e.what();
        }
    }
    return result;
}

}  // namespace byline::extract
