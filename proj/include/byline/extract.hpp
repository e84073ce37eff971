#pragma once

// Heuristic author extraction over raw news HTML. Stages run in a fixed
// order (JSON-LD, meta tags, rel="author", class/attribute heuristics,
// byline cue patterns, NER fallback) and the first stage that yields a
// non-empty cleaned author list wins.

#include "byline/extraction_result.hpp"
#include "byline/html.hpp"
#include "byline/ner.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace byline::extract {

class ExtractionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Byline cue words per language plus a language-independent fallback set.
// Cues match case-insensitively at a word boundary and may be followed by
// a colon.
class BylinePatternTable {
public:
    static BylinePatternTable defaults();

    // Throws std::invalid_argument for an invalid ISO 639-1 code.
    void set(const std::string& language, std::vector<std::string> cues);
    void set_fallback(std::vector<std::string> cues) { fallback_ = std::move(cues); }

    // Cues for `language` followed by the fallback cues, longest first.
    std::vector<std::string> cues_for(std::string_view language) const;

    const std::map<std::string, std::vector<std::string>>& per_language() const { return cues_; }
    const std::vector<std::string>& fallback() const { return fallback_; }

private:
    std::map<std::string, std::vector<std::string>> cues_;
    std::vector<std::string> fallback_;
};

struct ExtractorConfig {
    std::vector<std::string> meta_names{"author",         "article:author", "parsely-author", "sailthru.author",
                                        "dc.creator",     "dcterms.creator", "twitter:creator"};
    std::vector<std::string> class_tokens{"author", "byline", "writer", "creator"};
    std::size_t candidate_cap = 120;  // code points
    std::size_t byline_window = 2000;  // code points of visible text
    BylinePatternTable bylines = BylinePatternTable::defaults();
    // Whole-word author separators ("and" and its equivalents).
    std::map<std::string, std::vector<std::string>> and_words{
        {"en", {"and"}}, {"fr", {"et"}},  {"de", {"und"}},  {"es", {"y", "e"}}, {"ru", {"и"}},
        {"da", {"og"}},  {"el", {"και"}}, {"hi", {"और"}},   {"ur", {"اور"}},    {"zh", {"和"}}};
    // Characters that end the name part of a byline ("Jane Doe | Politics").
    std::vector<std::string> role_separators{"—", "–", "|", "·", "•"};
    ner::SelectOptions ner;

    // Applies overrides from a parsed config object (the [extractor] table).
    void apply(const nlohmann::json& overrides);
};

// Reads a TOML (.toml) or JSON file and applies its [extractor] table, or
// the whole document when there is no such table.
ExtractorConfig load_extractor_config(const std::filesystem::path& path);

// Individual stages. Each returns raw (uncleaned) strings in document order.
std::vector<std::string> extract_jsonld(const html::Document& doc, ExtractionDiagnostics* diag = nullptr);
std::vector<std::string> extract_meta_tags(const html::Document& doc, const ExtractorConfig& config = {});
std::vector<std::string> extract_rel_author(const html::Document& doc, const ExtractorConfig& config = {});
std::vector<std::string> extract_class_heuristics(const html::Document& doc, const ExtractorConfig& config = {});
std::vector<std::string> extract_byline_regex(std::string_view visible_text, std::string_view language,
                                              const ExtractorConfig& config = {});

// String-input conveniences.
std::vector<std::string> extract_jsonld(std::string_view html, ExtractionDiagnostics* diag = nullptr);
std::vector<std::string> extract_meta_tags(std::string_view html, const ExtractorConfig& config = {});
std::vector<std::string> extract_class_heuristics(std::string_view html, const ExtractorConfig& config = {});

// Turns one raw byline string into zero or more author names: strips cue
// words and trailing role/date fragments, splits on author separators,
// trims, drops fragments shorter than two characters, de-duplicates.
std::vector<std::string> clean_author_string(std::string_view raw, std::string_view language,
                                             const ExtractorConfig& config = {});

// Throws ExtractionError when html is empty. A failing NER provider is
// recorded in diagnostics and yields Method::none.
ExtractionResult extract(std::string_view html, std::string_view language, ner::NerProvider* ner = nullptr,
                         const ExtractorConfig& config = {});

}  // namespace byline::extract
