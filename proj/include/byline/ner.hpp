#pragma once

// Custom-NER baseline: find named entities in the visible article text,
// count how often each occurs, and take the least frequently mentioned
// people as the authors.

#include "byline/extraction_result.hpp"
#include "byline/html.hpp"

#include <cstddef>
#include <filesystem>
#include <istream>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace byline::ner {

class NerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EntityKind { person, organization, other };

std::string_view to_string(EntityKind k);
EntityKind kind_from_string(std::string_view s);

struct CandidateEntity {
    std::string surface;
    EntityKind kind = EntityKind::other;
    std::size_t first_offset = 0;  // code points into the annotated text
    std::size_t frequency = 1;

    bool operator==(const CandidateEntity&) const = default;
};

class NerProvider {
public:
    virtual ~NerProvider() = default;

    virtual std::string name() const = 0;
    virtual bool supports(std::string_view language) const = 0;
    // When false, callers must not invoke annotate concurrently.
    virtual bool concurrent_safe() const { return true; }
    // Throws NerError for unsupported languages or provider failures.
    virtual std::vector<CandidateEntity> annotate(std::string_view text, std::string_view language) = 0;
};

// Wraps a provider that is not safe for concurrent calls behind a mutex.
class SerializedProvider final : public NerProvider {
public:
    explicit SerializedProvider(std::shared_ptr<NerProvider> inner) : inner_(std::move(inner)) {}

    std::string name() const override { return inner_->name(); }
    bool supports(std::string_view language) const override { return inner_->supports(language); }
    bool concurrent_safe() const override { return true; }
    std::vector<CandidateEntity> annotate(std::string_view text, std::string_view language) override {
        std::lock_guard lock(mu_);
        return inner_->annotate(text, language);
    }

private:
    std::shared_ptr<NerProvider> inner_;
    std::mutex mu_;
};

// A list of known names: UTF-8, one per line, '#' starts a comment line.
class Gazetteer {
public:
    static Gazetteer parse(std::istream& in);
    static Gazetteer load(const std::filesystem::path& path);

    void add(std::string_view name);
    bool contains(std::string_view name) const { return names_.contains(std::string(name)); }
    bool empty() const { return names_.empty(); }
    const std::set<std::string>& names() const { return names_; }

private:
    std::set<std::string> names_;
};

// Scripts without letter case are matched against the gazetteers only.
bool is_uncased_language(std::string_view language);

// Capitalization-driven entity finder for cased scripts, gazetteer lookup
// for uncased ones. Stateless after construction and safe to share.
class RuleBasedNer final : public NerProvider {
public:
    RuleBasedNer() = default;
    RuleBasedNer(Gazetteer persons, Gazetteer organizations)
        : persons_(std::move(persons)), organizations_(std::move(organizations)) {}

    std::string name() const override { return "rule-based"; }
    bool supports(std::string_view language) const override;
    std::vector<CandidateEntity> annotate(std::string_view text, std::string_view language) override;

private:
    std::vector<CandidateEntity> annotate_cased(std::u32string_view text) const;
    std::vector<CandidateEntity> annotate_uncased(std::u32string_view text, std::string_view language) const;

    Gazetteer persons_;
    Gazetteer organizations_;
};

struct SelectOptions {
    std::size_t k = 3;
    // Newswire bylines ("Reuters") are organizations.
    bool include_organizations = false;
};

// Least-mentioned entities first, earlier first offset breaking ties.
std::vector<std::string> select_authors(std::span<const CandidateEntity> entities, const SelectOptions& options = {});

// Runs the provider over the visible body text. Provider errors propagate.
ExtractionResult ner_extract(const html::Document& doc, std::string_view language, NerProvider& provider,
                             const SelectOptions& options = {});
ExtractionResult ner_extract(std::string_view html, std::string_view language, NerProvider& provider,
                             const SelectOptions& options = {});

}  // namespace byline::ner
