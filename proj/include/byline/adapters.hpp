#pragma once

// Extractor adapters: in-process builtins and external processes speaking
// the byline-adapter/1 line-delimited JSON protocol over stdio.
//
//   handshake  -> {"protocol":"byline-adapter/1"}
//              <- {"protocol":"byline-adapter/1","name":"..."}
//   request    -> {"id":"...","html":"...","url":null,"language":"en"}
//   response   <- {"id":"...","authors":["..."],"error":null}
//
// NER providers use the same handshake; requests carry "text" instead of
// "html" and responses carry "entities" instead of "authors".

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "byline/corpus.hpp"
#include "byline/extract.hpp"
#include "byline/ner.hpp"
#include "byline/subprocess.hpp"

namespace byline {

inline constexpr std::string_view kProtocol = "byline-adapter/1";

enum class AdapterMode { builtin, external_process };

struct AdapterResult {
    std::vector<std::string> authors;
    std::optional<std::string> error;  // set when the document scored as empty by failure

    bool operator==(const AdapterResult&) const = default;
};

// Thread-safe collector of diagnostic lines.
class RunLog {
public:
    void add(std::string line);
    std::vector<std::string> lines() const;

private:
    mutable std::mutex mu_;
    std::vector<std::string> lines_;
};

struct AdapterContext {
    std::chrono::milliseconds timeout{30000};  // per document
    std::size_t threads = 0;                   // 0: hardware concurrency
    std::size_t max_in_flight = 8;
    RunLog* log = nullptr;
};

class ExtractorAdapter {
public:
    virtual ~ExtractorAdapter() = default;
    virtual const std::string& name() const = 0;
    virtual AdapterMode mode() const = 0;
    // One result per document, in input order. Never throws for
    // per-document failures.
    virtual std::vector<AdapterResult> run(std::span<const Document> documents, const AdapterContext& context) = 0;
};

class BuiltinAdapter final : public ExtractorAdapter {
public:
    using Fn = std::function<std::vector<std::string>(const Document&)>;

    // `concurrent` false runs the documents one at a time.
    BuiltinAdapter(std::string name, Fn fn, bool concurrent = true)
        : name_(std::move(name)), fn_(std::move(fn)), concurrent_(concurrent) {}

    const std::string& name() const override { return name_; }
    AdapterMode mode() const override { return AdapterMode::builtin; }
    std::vector<AdapterResult> run(std::span<const Document> documents, const AdapterContext& context) override;

private:
    std::string name_;
    Fn fn_;
    bool concurrent_;
};

// Full extraction cascade. `ner` may be null to disable the last stage.
std::unique_ptr<ExtractorAdapter> make_cascade_adapter(std::string name, extract::ExtractorConfig config,
                                                       std::shared_ptr<ner::NerProvider> ner);
// NER-only baseline: entities over the visible body text, least frequent first.
std::unique_ptr<ExtractorAdapter> make_ner_adapter(std::string name, std::shared_ptr<ner::NerProvider> ner,
                                                   ner::SelectOptions options = {});
// Returns the gold labels; a ceiling reference for sanity checks.
std::unique_ptr<ExtractorAdapter> make_gold_adapter(std::string name, const Corpus& corpus);

class ExternalAdapter final : public ExtractorAdapter {
public:
    ExternalAdapter(std::string name, std::vector<std::string> command)
        : name_(std::move(name)), command_(std::move(command)) {}

    const std::string& name() const override { return name_; }
    AdapterMode mode() const override { return AdapterMode::external_process; }
    const std::vector<std::string>& command() const { return command_; }
    std::vector<AdapterResult> run(std::span<const Document> documents, const AdapterContext& context) override;

private:
    std::string name_;
    std::vector<std::string> command_;
};

// Launches `command`, performs the handshake and runs every document
// through one request pipeline. Document ids must be unique. A crash or
// protocol violation disables the process; its unanswered documents get
// an error result. The handshake name is stored in `reported_name`.
std::vector<AdapterResult> call_external(const std::vector<std::string>& command, std::span<const Document> documents,
                                         const AdapterContext& context, std::string* reported_name = nullptr);

// NER provider behind the stdio protocol. Calls are serialized.
class ExternalNerProvider final : public ner::NerProvider {
public:
    // Starts the process and performs the handshake; throws ner::NerError.
    explicit ExternalNerProvider(std::vector<std::string> command,
                                 std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

    std::string name() const override { return name_; }
    bool supports(std::string_view language) const override;
    bool concurrent_safe() const override { return false; }
    std::vector<ner::CandidateEntity> annotate(std::string_view text, std::string_view language) override;

private:
    std::vector<std::string> command_;
    std::chrono::milliseconds timeout_;
    std::optional<Subprocess> process_;
    std::string name_;
    std::optional<std::vector<std::string>> languages_;
    std::uint64_t next_id_ = 0;
    std::mutex mu_;
};

struct ConformanceReport {
    struct Check {
        std::string name;
        bool passed = false;
        std::string detail;
    };
    std::string adapter_name;
    std::vector<Check> checks;

    bool passed() const;
};

// Drives an adapter through handshake, id echo, one response per request
// and the fault path (a document it should fail or answer with no authors).
ConformanceReport check_conformance(const std::vector<std::string>& command,
                                    std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

}  // namespace byline
