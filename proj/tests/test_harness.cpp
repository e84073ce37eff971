#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "byline/config.hpp"
#include "byline/harness.hpp"

using namespace byline;
using namespace std::chrono_literals;
using Names = std::vector<std::string>;
using json = nlohmann::json;

namespace {

Corpus three_docs() {
    return Corpus({{"a", "en", std::nullopt, "<p>a</p>"},
                   {"b", "en", std::nullopt, "<p>b</p>"},
                   {"c", "de", std::nullopt, "<p>c</p>"}},
                  {GoldLabel{"a", {"Jane Doe"}}, GoldLabel{"b", {"John Roe"}}, GoldLabel{"c", {"Max Muster"}}});
}

std::unique_ptr<ExtractorAdapter> fixed(std::string name, Names authors) {
    return std::make_unique<BuiltinAdapter>(std::move(name), [authors](const Document&) { return authors; });
}

ScoreRecord rec(std::string id, std::string tool, std::string lang, double rn, double rl, double ned, Names pred,
                bool overlap = true) {
    return ScoreRecord{std::move(id), std::move(tool), std::move(lang), rn, rl, ned, ned, overlap, std::move(pred),
                       std::nullopt};
}

const ReportTable& table(const std::vector<ReportTable>& ts, std::string_view metric) {
    for (const auto& t : ts)
        if (t.metric() == metric) return t;
    throw std::runtime_error("no table");
}

}  // namespace

TEST(Evaluate, GoldIsPerfect) {
    const auto corpus = three_docs();
    std::vector<std::unique_ptr<ExtractorAdapter>> adapters;
    adapters.push_back(make_gold_adapter("gold", corpus));
    const auto r = run_evaluation(corpus, adapters);
    ASSERT_EQ(r.records.size(), 3u);
    for (const auto& s : r.records) {
        EXPECT_EQ(s.rouge_n, 1.0);
        EXPECT_EQ(s.rouge_l, 1.0);
        EXPECT_EQ(s.ned, 0.0);
    }
    ASSERT_EQ(r.tables.size(), 3u);
    EXPECT_EQ(r.tables[0].metric(), "rouge1");
    EXPECT_EQ(r.tables[0].languages(), (Names{"de", "en"}));
    EXPECT_EQ(r.tables[0].cell("en", "gold")->n_docs, 2u);
    EXPECT_EQ(table(r.tables, kNed).cell("en", "gold")->mean, 0.0);
}

TEST(Evaluate, AlwaysEmptyIsWorst) {
    const auto corpus = three_docs();
    std::vector<std::unique_ptr<ExtractorAdapter>> adapters;
    adapters.push_back(fixed("none", {}));
    const auto r = run_evaluation(corpus, adapters);
    for (const auto& s : r.records) {
        EXPECT_EQ(s.rouge_n, 0.0);
        EXPECT_EQ(s.ned, 1.0);
        EXPECT_FALSE(s.char_overlap);
    }
    const auto* c = r.tables[0].cell("en", "none");
    EXPECT_EQ(c->n_empty, 2u);
    EXPECT_TRUE(c->no_overlap);
}

TEST(Evaluate, RecordOrderAndFailures) {
    const auto corpus = three_docs();
    std::vector<std::unique_ptr<ExtractorAdapter>> adapters;
    adapters.push_back(fixed("x", {"Jane Doe"}));
    adapters.push_back(std::make_unique<BuiltinAdapter>("boom", [](const Document& d) -> Names {
        if (d.id == "b") throw std::runtime_error("bad doc");
        return {"Jane Doe"};
    }));
    const auto r = run_evaluation(corpus, adapters);
    ASSERT_EQ(r.records.size(), 6u);
    EXPECT_EQ(r.records[0].tool, "x");
    EXPECT_EQ(r.records[3].tool, "boom");
    EXPECT_EQ(r.records[4].doc_id, "b");
    EXPECT_EQ(r.records[4].error, "bad doc");
    EXPECT_TRUE(r.records[4].predicted.empty());
    EXPECT_FALSE(r.log.empty());
}

TEST(Evaluate, InputValidation) {
    std::vector<std::unique_ptr<ExtractorAdapter>> adapters;
    EXPECT_THROW(run_evaluation(three_docs(), adapters), HarnessError);
    adapters.push_back(fixed("x", {}));
    EXPECT_THROW(run_evaluation(Corpus{}, adapters), HarnessError);
    adapters.push_back(fixed("x", {}));
    EXPECT_THROW(run_evaluation(three_docs(), adapters), HarnessError);
}

TEST(Aggregate, MeanOfTwoDocuments) {
    const std::vector<ScoreRecord> rs{rec("a", "t", "en", 0.2, 0.2, 0.8, {"x"}), rec("b", "t", "en", 0.8, 0.8, 0.2, {"y"})};
    const auto ts = aggregate(rs);
    EXPECT_DOUBLE_EQ(ts[0].cell("en", "t")->mean, 0.5);
    EXPECT_DOUBLE_EQ(ts[2].cell("en", "t")->mean, 0.5);
    EXPECT_FALSE(ts[2].higher_is_better());
}

TEST(Aggregate, EmptyInput) {
    const auto ts = aggregate({});
    ASSERT_EQ(ts.size(), 3u);
    EXPECT_TRUE(ts[0].languages().empty());
}

TEST(ReportTable, BestIncludesTies) {
    ReportTable t("rouge1", true);
    t.set("en", "a", {0.5, 1, 0, false});
    t.set("en", "b", {0.5, 1, 0, false});
    t.set("en", "c", {0.1, 1, 0, false});
    EXPECT_EQ(t.best("en"), (std::set<std::string>{"a", "b"}));
    ReportTable n("ned", false);
    n.set("en", "a", {0.5, 1, 0, false});
    n.set("en", "c", {0.1, 1, 0, false});
    EXPECT_EQ(n.best("en"), std::set<std::string>{"c"});
    EXPECT_EQ(t.tools(), (Names{"a", "b", "c"}));
    EXPECT_EQ(t.cell("fr", "a"), nullptr);
}

TEST(Emit, CsvOneCell) {
    ReportTable t("rouge1", true);
    t.set("en", "tool", {0.25, 4, 1, false});
    const std::vector<ReportTable> ts{t};
    EXPECT_EQ(emit_report(ts, ReportFormat::csv), "metric,language,tool,mean,n_docs,n_empty\nrouge1,en,tool,0.25,4,1\n");
}

TEST(Emit, MarkdownBoldsTiesAndDashesNoOverlap) {
    ReportTable t("rouge1", true);
    t.set("en", "a", {0.5, 1, 0, false});
    t.set("en", "b", {0.5, 1, 0, false});
    t.set("en", "c", {0.0, 1, 1, true});
    const std::vector<ReportTable> ts{t};
    EXPECT_EQ(emit_report(ts, ReportFormat::markdown),
              "### rouge1 (higher is better)\n\n| language | a | b | c |\n|---|---:|---:|---:|\n"
              "| en | **0.5000** | **0.5000** | - |\n");
}

TEST(Emit, JsonAndRadarShape) {
    ReportTable t("ned", false);
    t.set("en", "a", {0.5, 2, 0, false});
    t.set("zh", "a", {0.25, 1, 0, false});
    const std::vector<ReportTable> ts{t};
    const auto j = json::parse(emit_report(ts, ReportFormat::json));
    EXPECT_EQ(j["tables"][0]["metric"], "ned");
    EXPECT_EQ(j["tables"][0]["higher_is_better"], false);
    EXPECT_EQ(j["tables"][0]["languages"], json::array({"en", "zh"}));
    EXPECT_EQ(j["tables"][0]["cells"].size(), 2u);
    const auto radar = json::parse(emit_report(ts, ReportFormat::radar_json));
    EXPECT_EQ(radar["charts"][0]["axes"], json::array({"en", "zh"}));
    EXPECT_EQ(radar["charts"][0]["series"][0]["tool"], "a");
    EXPECT_EQ(radar["charts"][0]["series"][0]["values"], json::array({0.5, 0.25}));
}

TEST(Emit, FormatNames) {
    EXPECT_EQ(parse_report_format("md"), ReportFormat::markdown);
    EXPECT_EQ(parse_report_format("radar-json"), ReportFormat::radar_json);
    EXPECT_THROW(parse_report_format("xlsx"), HarnessError);
    EXPECT_EQ(file_name(ReportFormat::csv), "report.csv");
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.0), "1");
}

TEST(Scores, CsvRoundTripReaggregates) {
    const auto corpus = three_docs();
    std::vector<std::unique_ptr<ExtractorAdapter>> adapters;
    adapters.push_back(fixed("quirky, \"tool\"", {"Jane, Doe", "line\nbreak"}));
    adapters.push_back(std::make_unique<BuiltinAdapter>("err", [](const Document&) -> Names {
        throw std::runtime_error("x,\"y\"");
    }));
    const auto r = run_evaluation(corpus, adapters);
    std::istringstream in(write_scores_csv(r.records));
    const auto back = read_scores_csv(in);
    EXPECT_EQ(back, r.records);
    EXPECT_EQ(aggregate(back), r.tables);
    std::istringstream bad("doc,tool\n");
    EXPECT_THROW(read_scores_csv(bad), HarnessError);
}

TEST(Scores, PredictionsJsonl) {
    const std::vector<ScoreRecord> rs{rec("a", "t", "en", 1, 1, 0, {"Jane Doe"})};
    EXPECT_EQ(write_predictions_jsonl(rs),
              "{\"id\":\"a\",\"tool\":\"t\",\"language\":\"en\",\"authors\":[\"Jane Doe\"],\"error\":null}\n");
}

TEST(Config, ParsesAllSections) {
    const auto doc = parse_toml(R"(
[run]
timeout_secs = 1.5
threads = 2
max_in_flight = 4

[metrics]
rouge_n = 2
clamp_ned = false

[ner]
k = 2
person_gazetteer = "people.txt"

[[adapter]]
name = "cascade"

[[adapter]]
name = "baseline"
builtin = "custom-ner"

[[adapter]]
name = "ext"
command = ["python3", "adapter.py"]

[[adapter]]
name = "shell"
command = "python3 adapter.py --flag"
)");
    const auto cfg = parse_harness_config(doc, "/base");
    EXPECT_EQ(cfg.run.timeout, 1500ms);
    EXPECT_EQ(cfg.run.threads, 2u);
    EXPECT_EQ(cfg.run.max_in_flight, 4u);
    EXPECT_EQ(cfg.run.metrics.rouge_n, 2);
    EXPECT_FALSE(cfg.run.metrics.clamp_ned);
    EXPECT_EQ(cfg.extractor.ner.k, 2u);
    EXPECT_EQ(cfg.ner.person_gazetteer, std::filesystem::path("/base/people.txt"));
    ASSERT_EQ(cfg.adapters.size(), 4u);
    EXPECT_EQ(cfg.adapters[0].builtin, "cascade");
    EXPECT_EQ(cfg.adapters[1].builtin, "custom-ner");
    EXPECT_EQ(cfg.adapters[2].mode, AdapterMode::external_process);
    EXPECT_EQ(cfg.adapters[2].command, (Names{"python3", "adapter.py"}));
    EXPECT_EQ(cfg.adapters[3].command, (Names{"/bin/sh", "-c", "python3 adapter.py --flag"}));
}

TEST(Config, Rejections) {
    EXPECT_THROW(parse_harness_config(json::object()), ConfigError);
    EXPECT_THROW(parse_harness_config(json::parse(R"({"adapter":[{"name":"a"}],"bogus":{}})")), ConfigError);
    EXPECT_THROW(parse_harness_config(json::parse(R"({"adapter":[{"name":"a"},{"name":"a"}]})")), ConfigError);
    EXPECT_THROW(parse_harness_config(json::parse(R"({"adapter":[{"name":"a","builtin":"magic"}]})")), ConfigError);
    EXPECT_THROW(parse_harness_config(json::parse(R"({"adapter":[{"name":"a","kind":"external"}]})")), ConfigError);
    EXPECT_THROW(parse_harness_config(json::parse(R"({"adapter":[{"name":"a"}],"run":{"timeout_secs":0}})")),
                 ConfigError);
    EXPECT_THROW(parse_harness_config(json::parse(R"({"adapter":[{"name":"a"}],"metrics":{"rouge_n":0}})")),
                 ConfigError);
}

TEST(Config, MakeAdaptersRuns) {
    const auto path = std::filesystem::temp_directory_path() / "byline_harness_test.toml";
    std::ofstream(path) << "[[adapter]]\nname = \"gold\"\nbuiltin = \"gold\"\n\n[[adapter]]\nname = \"ext\"\ncommand = [\""
                        << BYLINE_FAKE_ADAPTER << "\", \"fixed\", \"Jane Doe\"]\n";
    const auto cfg = load_harness_config(path);
    std::filesystem::remove(path);
    const auto corpus = three_docs();
    const auto adapters = make_adapters(cfg, corpus);
    ASSERT_EQ(adapters.size(), 2u);
    EXPECT_EQ(adapters[1]->mode(), AdapterMode::external_process);
    const auto r = run_evaluation(corpus, adapters, cfg.run);
    EXPECT_EQ(r.records.size(), 6u);
    EXPECT_EQ(r.records[3].rouge_n, 1.0);
    EXPECT_EQ(r.records[3].predicted, Names{"Jane Doe"});
}
