// byline-bench: author extraction and benchmark command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "byline/adapters.hpp"
#include "byline/config.hpp"
#include "byline/corpus.hpp"
#include "byline/extract.hpp"
#include "byline/harness.hpp"
#include "byline/ner.hpp"

namespace fs = std::filesystem;
using namespace byline;

namespace {

std::string slurp(const std::string& path) {
    std::stringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << data;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct EvaluateArgs {
    std::string corpus;
    std::string adapters;
    std::string out;
    std::string format;
    double timeout_secs = 0;
    std::size_t threads = 0;
    bool lax = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const Corpus corpus = load_corpus(a.corpus, LoadOptions{a.lax});
    HarnessConfig config = load_harness_config(a.adapters);
    if (a.timeout_secs > 0)
        config.run.timeout = std::chrono::milliseconds(static_cast<long long>(a.timeout_secs * 1000));
    if (a.threads) config.run.threads = a.threads;

    const auto adapters = make_adapters(config, corpus);
    const auto result = run_evaluation(corpus, adapters, config.run);

    fs::create_directories(a.out);
    const fs::path out(a.out);
    std::vector<ReportFormat> formats;
    if (a.format.empty())
        formats = {ReportFormat::csv, ReportFormat::json, ReportFormat::markdown, ReportFormat::radar_json};
    else
        formats = {parse_report_format(a.format)};
    for (const auto f : formats) write_file(out / file_name(f), emit_report(result.tables, f));
    write_file(out / "scores.csv", write_scores_csv(result.records));
    write_file(out / "predictions.jsonl", write_predictions_jsonl(result.records));
    std::string log;
    for (const auto& line : result.log) log += line + '\n';
    write_file(out / "run.log", log);

    for (const auto& line : result.log) std::cerr << line << '\n';
    std::cout << emit_report(result.tables, ReportFormat::markdown);
    std::cerr << result.records.size() << " records written to " << out.string() << '\n';
    return 0;
}

struct ExtractArgs {
    std::string html;
    std::string language;
    std::string config;
    std::vector<std::string> gazetteers;
    bool json = false;
    bool no_ner = false;
};

int cmd_extract(const ExtractArgs& a) {
    if (!is_valid_language(a.language)) throw std::runtime_error("invalid language code \"" + a.language + "\"");
    extract::ExtractorConfig config;
    if (!a.config.empty()) config = extract::load_extractor_config(a.config);
    std::unique_ptr<ner::NerProvider> provider;
    if (!a.no_ner) {
        ner::Gazetteer persons;
        for (const auto& g : a.gazetteers)
            for (const auto& n : ner::Gazetteer::load(g).names()) persons.add(n);
        provider = std::make_unique<ner::RuleBasedNer>(std::move(persons), ner::Gazetteer{});
    }
    const auto result = extract::extract(slurp(a.html), a.language, provider.get(), config);
    if (a.json) {
        std::cout << to_json(result).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    } else {
        for (const auto& author : result.authors) std::cout << author << '\n';
        std::cerr << "method: " << to_string(result.method) << '\n';
    }
    return 0;
}

struct ConvertArgs {
    std::string labelstudio;
    std::string out;
    std::string language;
};

int cmd_convert(const ConvertArgs& a) {
    LabelStudioOptions opts;
    if (!a.language.empty()) opts.default_language = a.language;
    const auto result = convert_labelstudio(fs::path(a.labelstudio), opts);
    save_corpus(result.corpus, a.out);
    const auto& r = result.report;
    std::cerr << "tasks " << r.tasks << ", converted " << r.converted << ", skipped " << r.skipped_by_annotator
              << ", unannotatable " << r.flagged_unannotatable << ", unannotated " << r.unannotated << '\n';
    return 0;
}

int cmd_stats(const std::string& path, bool lax, bool as_json) {
    const auto s = stats(load_corpus(path, LoadOptions{lax}));
    if (as_json) {
        nlohmann::ordered_json j;
        for (const auto& [lang, c] : s.per_language)
            j["languages"][lang] = {{"documents", c.document_count},
                                    {"authors", c.author_count},
                                    {"distinct_authors", c.distinct_author_count}};
        j["total"] = {{"documents", s.total_documents()}, {"authors", s.total_authors()}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::printf("%-8s %9s %9s %9s\n", "language", "documents", "authors", "distinct");
    for (const auto& [lang, c] : s.per_language)
        std::printf("%-8s %9zu %9zu %9zu\n", lang.c_str(), c.document_count, c.author_count, c.distinct_author_count);
    std::printf("%-8s %9zu %9zu\n", "total", s.total_documents(), s.total_authors());
    return 0;
}

int cmd_conform(const std::vector<std::string>& command, double timeout_secs) {
    const auto report = check_conformance(command, std::chrono::milliseconds(static_cast<long long>(timeout_secs * 1000)));
    if (!report.adapter_name.empty()) std::cout << "adapter: " << report.adapter_name << '\n';
    for (const auto& c : report.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ')';
        std::cout << '\n';
    }
    return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Author extraction and benchmark tool"};
    app.require_subcommand(1);

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score adapters against a gold corpus");
    evaluate->add_option("--corpus", ev.corpus, "Gold corpus (JSONL)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--adapters", ev.adapters, "Harness config (TOML or JSON)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--out", ev.out, "Output directory")->required();
    evaluate->add_option("--format", ev.format, "Only write this report format")
        ->check(CLI::IsMember({"csv", "json", "markdown", "radar-json"}));
    evaluate->add_option("--timeout-secs", ev.timeout_secs, "Per-document timeout for external adapters")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--threads", ev.threads, "Worker threads for builtin adapters");
    evaluate->add_flag("--lax", ev.lax, "Ignore unknown corpus fields");

    ExtractArgs ex;
    auto* extract_cmd = app.add_subcommand("extract", "Extract authors from one HTML file");
    extract_cmd->add_option("--html", ex.html, "HTML file, or - for stdin")->required();
    extract_cmd->add_option("--language", ex.language, "ISO 639-1 code")->required();
    extract_cmd->add_option("--config", ex.config, "Extractor config (TOML or JSON)")->check(CLI::ExistingFile);
    extract_cmd->add_option("--gazetteer", ex.gazetteers, "Person-name gazetteer")->check(CLI::ExistingFile);
    extract_cmd->add_flag("--json", ex.json, "Print the full result as JSON");
    extract_cmd->add_flag("--no-ner", ex.no_ner, "Disable the NER fallback");

    ConvertArgs cv;
    auto* convert = app.add_subcommand("convert", "Convert a LabelStudio export to a gold corpus");
    convert->add_option("--labelstudio", cv.labelstudio, "LabelStudio JSON export")->required()->check(CLI::ExistingFile);
    convert->add_option("--out", cv.out, "Output JSONL")->required();
    convert->add_option("--language", cv.language, "Language for tasks without one");

    std::string stats_corpus;
    bool stats_lax = false;
    bool stats_json = false;
    auto* stats_cmd = app.add_subcommand("stats", "Per-language document and author counts");
    stats_cmd->add_option("--corpus", stats_corpus, "Gold corpus (JSONL)")->required()->check(CLI::ExistingFile);
    stats_cmd->add_flag("--lax", stats_lax, "Ignore unknown corpus fields");
    stats_cmd->add_flag("--json", stats_json, "Print JSON");

    std::vector<std::string> conform_command;
    double conform_timeout = 30;
    auto* conform = app.add_subcommand("conform", "Check an adapter against the stdio protocol");
    conform->add_option("--timeout-secs", conform_timeout, "Per-request timeout")->check(CLI::PositiveNumber);
    conform->add_option("command", conform_command, "Adapter command line (after --)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*evaluate) return cmd_evaluate(ev);
        if (*extract_cmd) return cmd_extract(ex);
        if (*convert) return cmd_convert(cv);
        if (*stats_cmd) return cmd_stats(stats_corpus, stats_lax, stats_json);
        if (*conform) return cmd_conform(conform_command, conform_timeout);
    } catch (const std::exception& e) {
        std::cerr << "byline-bench: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
