#pragma once

// Gold-annotated evaluation corpus: documents, their author labels, the
// line-delimited JSON format they are stored in, a converter from
// LabelStudio task exports, and per-language statistics.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace byline {

class CorpusError : public std::runtime_error {
public:
    CorpusError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    // 1-based input line, 0 when not tied to a line.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct Document {
    std::string id;
    std::string language;  // ISO 639-1
    std::optional<std::string> url;
    std::string html;

    bool operator==(const Document&) const = default;
};

struct GoldLabel {
    std::string doc_id;
    std::vector<std::string> authors;  // as annotated; may be empty

    bool operator==(const GoldLabel&) const = default;
};

// True for lowercase ISO 639-1 codes.
bool is_valid_language(std::string_view code);

// Immutable once constructed; the constructor enforces every invariant.
class Corpus {
public:
    Corpus() = default;
    // Labels may come in any order; each must match exactly one document.
    Corpus(std::vector<Document> documents, std::vector<GoldLabel> labels);

    const std::vector<Document>& documents() const { return documents_; }
    const GoldLabel& label(std::string_view doc_id) const;
    const Document* find(std::string_view doc_id) const;
    std::size_t size() const { return documents_.size(); }
    bool empty() const { return documents_.empty(); }

    bool operator==(const Corpus&) const = default;

private:
    std::vector<Document> documents_;
    std::map<std::string, GoldLabel, std::less<>> labels_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

struct LoadOptions {
    // Ignore unknown fields instead of rejecting the line.
    bool lax = false;
};

Corpus parse_corpus(std::istream& in, const LoadOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct LanguageCounts {
    std::size_t document_count = 0;
    std::size_t author_count = 0;           // summed over documents
    std::size_t distinct_author_count = 0;  // unique names within the language

    bool operator==(const LanguageCounts&) const = default;
};

struct CorpusStats {
    std::map<std::string, LanguageCounts> per_language;

    std::size_t total_documents() const;
    std::size_t total_authors() const;
};

CorpusStats stats(const Corpus& corpus);

// LabelStudio conversion.

struct LabelStudioOptions {
    // Result label names that mark an author span (case-insensitive).
    std::vector<std::string> author_labels{"author", "authors", "byline"};
    // Choice values that flag a task as unannotatable (case-insensitive).
    std::vector<std::string> drop_choices{"skip",      "skipped",        "unannotatable", "wrong language",
                                          "wrong_language", "mangled", "mangled formatting", "author in image"};
    // Used when a task carries no language field.
    std::optional<std::string> default_language;
};

struct ConversionReport {
    std::size_t tasks = 0;
    std::size_t converted = 0;
    std::size_t skipped_by_annotator = 0;  // cancelled annotations
    std::size_t flagged_unannotatable = 0;
    std::size_t unannotated = 0;  // no annotation at all

    std::size_t dropped() const { return skipped_by_annotator + flagged_unannotatable + unannotated; }
};

struct ConversionResult {
    Corpus corpus;
    ConversionReport report;
};

ConversionResult convert_labelstudio(const nlohmann::json& export_tasks, const LabelStudioOptions& options = {});
ConversionResult convert_labelstudio(const std::filesystem::path& export_path,
                                     const LabelStudioOptions& options = {});

}  // namespace byline
