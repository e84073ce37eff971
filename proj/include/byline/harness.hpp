#pragma once

// Benchmark runner: scores every adapter on every corpus document,
// aggregates per-language means and renders the result tables.

#include <chrono>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "byline/adapters.hpp"
#include "byline/corpus.hpp"
#include "byline/extract.hpp"
#include "byline/metrics.hpp"

namespace byline {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScoreRecord {
    std::string doc_id;
    std::string tool;
    std::string language;
    double rouge_n = 0.0;
    double rouge_l = 0.0;
    double ned = 0.0;
    double ned_raw = 0.0;
    bool char_overlap = false;
    std::vector<std::string> predicted;
    std::optional<std::string> error;

    bool operator==(const ScoreRecord&) const = default;
};

struct RunOptions {
    metrics::MetricConfig metrics;
    std::chrono::milliseconds timeout{30000};
    std::size_t threads = 0;
    std::size_t max_in_flight = 8;
};

struct ReportCell {
    double mean = 0.0;
    std::size_t n_docs = 0;
    std::size_t n_empty = 0;  // documents with an empty prediction
    bool no_overlap = false;  // no document shares a character with gold

    bool operator==(const ReportCell&) const = default;
};

class ReportTable {
public:
    ReportTable(std::string metric, bool higher_is_better) : metric_(std::move(metric)), higher_(higher_is_better) {}

    const std::string& metric() const { return metric_; }
    bool higher_is_better() const { return higher_; }
    // Languages sorted; tools in insertion order.
    const std::vector<std::string>& languages() const { return languages_; }
    const std::vector<std::string>& tools() const { return tools_; }

    void set(const std::string& language, const std::string& tool, ReportCell cell);
    const ReportCell* cell(std::string_view language, std::string_view tool) const;
    // Tools holding the best mean for a language; every tied tool is included.
    std::set<std::string> best(std::string_view language) const;

    bool operator==(const ReportTable&) const = default;

private:
    std::string metric_;
    bool higher_;
    std::vector<std::string> languages_;
    std::vector<std::string> tools_;
    std::map<std::pair<std::string, std::string>, ReportCell, std::less<>> cells_;
};

// Metric column names used in tables and CSV output.
std::string rouge_n_name(int n);  // "rouge1", "rouge2", ...
inline constexpr std::string_view kRougeL = "rougeL";
inline constexpr std::string_view kNed = "ned";

struct EvaluationResult {
    std::vector<ScoreRecord> records;  // adapter order, then corpus order
    std::vector<ReportTable> tables;   // rougeN, rougeL, ned
    std::vector<std::string> log;
};

// Throws HarnessError on an empty corpus, no adapters or duplicate names.
EvaluationResult run_evaluation(const Corpus& corpus, std::span<const std::unique_ptr<ExtractorAdapter>> adapters,
                                const RunOptions& options = {});

// Aggregates records into one table per metric. Tools appear in first-seen order.
std::vector<ReportTable> aggregate(std::span<const ScoreRecord> records, int rouge_n = 1);

enum class ReportFormat { csv, json, markdown, radar_json };

ReportFormat parse_report_format(std::string_view name);  // throws HarnessError
std::string_view to_string(ReportFormat format);
std::string file_name(ReportFormat format);  // "report.csv", ...
std::string emit_report(std::span<const ReportTable> tables, ReportFormat format);

// Shortest text that parses back to the same double.
std::string format_double(double v);

// Per-document outputs.
std::string write_scores_csv(std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_scores_csv(std::istream& in);
std::string write_predictions_jsonl(std::span<const ScoreRecord> records);

// Harness configuration file (TOML or JSON):
//
//   [run]      timeout_secs, threads, max_in_flight
//   [metrics]  rouge_n, insert_cost, delete_cost, substitute_cost, clamp_ned, empty_pair_matches
//   [extractor] pattern-table overrides
//   [ner]      k, include_organizations, person_gazetteer, organization_gazetteer, command
//   [[adapter]] name, kind = "builtin" | "external",
//               builtin = "cascade" | "custom-ner" | "gold", use_ner, command
struct AdapterSpec {
    std::string name;
    AdapterMode mode = AdapterMode::builtin;
    std::string builtin;               // builtin adapters
    bool use_ner = true;               // cascade only
    std::vector<std::string> command;  // external adapters
};

struct NerSettings {
    std::optional<std::filesystem::path> person_gazetteer;
    std::optional<std::filesystem::path> organization_gazetteer;
    std::vector<std::string> command;  // external provider instead of the rule-based one
};

struct HarnessConfig {
    RunOptions run;
    extract::ExtractorConfig extractor;
    NerSettings ner;
    std::vector<AdapterSpec> adapters;
};

// Relative paths resolve against `base_dir`. Throws ConfigError.
HarnessConfig parse_harness_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
HarnessConfig load_harness_config(const std::filesystem::path& path);

std::shared_ptr<ner::NerProvider> make_ner_provider(const HarnessConfig& config);
std::vector<std::unique_ptr<ExtractorAdapter>> make_adapters(const HarnessConfig& config, const Corpus& corpus);

}  // namespace byline
