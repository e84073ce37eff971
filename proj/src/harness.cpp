#include "byline/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "byline/config.hpp"

namespace byline {

using json = nlohmann::json;

std::string rouge_n_name(int n) { return "rouge" + std::to_string(n); }

void ReportTable::set(const std::string& language, const std::string& tool, ReportCell cell) {
    if (std::find(languages_.begin(), languages_.end(), language) == languages_.end()) {
        languages_.insert(std::upper_bound(languages_.begin(), languages_.end(), language), language);
    }
    if (std::find(tools_.begin(), tools_.end(), tool) == tools_.end()) tools_.push_back(tool);
    cells_[{language, tool}] = cell;
}

const ReportCell* ReportTable::cell(std::string_view language, std::string_view tool) const {
    const auto it = cells_.find(std::make_pair(std::string(language), std::string(tool)));
    return it == cells_.end() ? nullptr : &it->second;
}

std::set<std::string> ReportTable::best(std::string_view language) const {
    std::set<std::string> out;
    std::optional<double> top;
    for (const auto& tool : tools_) {
        const auto* c = cell(language, tool);
        if (!c) continue;
        if (!top || (higher_ ? c->mean > *top : c->mean < *top)) {
            top = c->mean;
            out = {tool};
        } else if (c->mean == *top) {
            out.insert(tool);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Running

EvaluationResult run_evaluation(const Corpus& corpus, std::span<const std::unique_ptr<ExtractorAdapter>> adapters,
                                const RunOptions& options) {
    if (corpus.empty()) throw HarnessError("corpus is empty");
    if (adapters.empty()) throw HarnessError("no adapters configured");
    options.metrics.validate();
    std::set<std::string> names;
    for (const auto& a : adapters) {
        if (!a) throw HarnessError("null adapter");
        if (!names.insert(a->name()).second) throw HarnessError("duplicate adapter name " + a->name());
    }

    RunLog log;
    AdapterContext ctx{options.timeout, options.threads, options.max_in_flight, &log};
    const auto& docs = corpus.documents();
    std::vector<std::vector<AdapterResult>> results(adapters.size());
    {
        std::vector<std::jthread> workers;
        for (std::size_t a = 0; a < adapters.size(); ++a) {
            workers.emplace_back([&, a] {
                try {
                    results[a] = adapters[a]->run(docs, ctx);
                    if (results[a].size() != docs.size())
                        throw std::runtime_error("returned " + std::to_string(results[a].size()) + " results for " +
                                                 std::to_string(docs.size()) + " documents");
                } catch (const std::exception& e) {
                    log.add("[" + adapters[a]->name() + "] failed: " + e.what());
                    results[a].assign(docs.size(), AdapterResult{{}, std::string("adapter failed: ") + e.what()});
                }
            });
        }
    }

    EvaluationResult out;
    out.records.reserve(docs.size() * adapters.size());
    for (std::size_t a = 0; a < adapters.size(); ++a) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const auto& d = docs[i];
            auto& r = results[a][i];
            const auto& gold = corpus.label(d.id).authors;
            const auto s = metrics::score_document(r.authors, gold, options.metrics);
            out.records.push_back(ScoreRecord{d.id, adapters[a]->name(), d.language, s.rouge_n, s.rouge_l, s.ned,
                                              s.ned_raw, s.char_overlap, std::move(r.authors), std::move(r.error)});
        }
    }
    out.tables = aggregate(out.records, options.metrics.rouge_n);
    out.log = log.lines();
    return out;
}

std::vector<ReportTable> aggregate(std::span<const ScoreRecord> records, int rouge_n) {
    struct Acc {
        double rn = 0, rl = 0, ned = 0;
        std::size_t n = 0, empty = 0;
        bool any_overlap = false;
    };
    std::vector<std::string> tools;
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto& r : records) {
        if (std::find(tools.begin(), tools.end(), r.tool) == tools.end()) tools.push_back(r.tool);
        auto& a = acc[{r.language, r.tool}];
        a.rn += r.rouge_n;
        a.rl += r.rouge_l;
        a.ned += r.ned;
        ++a.n;
        if (r.predicted.empty()) ++a.empty;
        a.any_overlap = a.any_overlap || r.char_overlap;
    }
    std::vector<ReportTable> tables{ReportTable(rouge_n_name(rouge_n), true), ReportTable(std::string(kRougeL), true),
                                    ReportTable(std::string(kNed), false)};
    for (const auto& tool : tools) {
        for (const auto& [key, a] : acc) {
            if (key.second != tool) continue;
            const double n = static_cast<double>(a.n);
            tables[0].set(key.first, tool, {a.rn / n, a.n, a.empty, !a.any_overlap});
            tables[1].set(key.first, tool, {a.rl / n, a.n, a.empty, !a.any_overlap});
            tables[2].set(key.first, tool, {a.ned / n, a.n, a.empty, !a.any_overlap});
        }
    }
    return tables;
}

// ---------------------------------------------------------------------------
// Reports

ReportFormat parse_report_format(std::string_view name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "radar-json") return ReportFormat::radar_json;
    throw HarnessError("unknown report format \"" + std::string(name) + "\"");
}

std::string_view to_string(ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: return "csv";
        case ReportFormat::json: return "json";
        case ReportFormat::markdown: return "markdown";
        case ReportFormat::radar_json: return "radar-json";
    }
    return "csv";
}

std::string file_name(ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: return "report.csv";
        case ReportFormat::json: return "report.json";
        case ReportFormat::markdown: return "report.md";
        case ReportFormat::radar_json: return "radar.json";
    }
    return "report";
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// RFC 4180 records; quoted fields may span lines.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw HarnessError("unterminated quoted CSV field");
    fields.push_back(std::move(field));
    return true;
}

double parse_double(const std::string& s) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw HarnessError("bad number in CSV: " + s);
    return v;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string emit_csv(std::span<const ReportTable> tables) {
    std::string out = "metric,language,tool,mean,n_docs,n_empty\n";
    for (const auto& t : tables)
        for (const auto& lang : t.languages())
            for (const auto& tool : t.tools())
                if (const auto* c = t.cell(lang, tool))
                    out += csv_field(t.metric()) + ',' + csv_field(lang) + ',' + csv_field(tool) + ',' +
                           format_double(c->mean) + ',' + std::to_string(c->n_docs) + ',' +
                           std::to_string(c->n_empty) + '\n';
    return out;
}

std::string emit_json(std::span<const ReportTable> tables) {
    nlohmann::ordered_json doc;
    auto list = nlohmann::ordered_json::array();
    for (const auto& t : tables) {
        nlohmann::ordered_json tj;
        tj["metric"] = t.metric();
        tj["higher_is_better"] = t.higher_is_better();
        tj["languages"] = t.languages();
        tj["tools"] = t.tools();
        auto cells = nlohmann::ordered_json::array();
        for (const auto& lang : t.languages()) {
            const auto best = t.best(lang);
            for (const auto& tool : t.tools()) {
                const auto* c = t.cell(lang, tool);
                if (!c) continue;
                cells.push_back({{"language", lang},
                                 {"tool", tool},
                                 {"mean", c->mean},
                                 {"n_docs", c->n_docs},
                                 {"n_empty", c->n_empty},
                                 {"no_overlap", c->no_overlap},
                                 {"best", best.contains(tool)}});
            }
        }
        tj["cells"] = std::move(cells);
        list.push_back(std::move(tj));
    }
    doc["tables"] = std::move(list);
    return doc.dump(2) + "\n";
}

std::string md_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c;
    }
    return out;
}

std::string emit_markdown(std::span<const ReportTable> tables) {
    std::string out;
    for (const auto& t : tables) {
        if (!out.empty()) out += '\n';
        out += "### " + t.metric() + (t.higher_is_better() ? " (higher is better)" : " (lower is better)") + "\n\n";
        out += "| language |";
        for (const auto& tool : t.tools()) out += ' ' + md_escape(tool) + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < t.tools().size(); ++i) out += "---:|";
        out += '\n';
        for (const auto& lang : t.languages()) {
            const auto best = t.best(lang);
            out += "| " + md_escape(lang) + " |";
            for (const auto& tool : t.tools()) {
                const auto* c = t.cell(lang, tool);
                std::string v;
                if (!c) v = "";
                else if (c->no_overlap) v = "-";
                else if (best.contains(tool)) v = "**" + fixed4(c->mean) + "**";
                else v = fixed4(c->mean);
                out += ' ' + v + " |";
            }
            out += '\n';
        }
    }
    return out;
}

std::string emit_radar(std::span<const ReportTable> tables) {
    nlohmann::ordered_json doc;
    auto charts = nlohmann::ordered_json::array();
    for (const auto& t : tables) {
        nlohmann::ordered_json chart;
        chart["metric"] = t.metric();
        chart["axes"] = t.languages();
        auto series = nlohmann::ordered_json::array();
        for (const auto& tool : t.tools()) {
            auto values = nlohmann::ordered_json::array();
            for (const auto& lang : t.languages()) {
                const auto* c = t.cell(lang, tool);
                values.push_back(c ? nlohmann::ordered_json(c->mean) : nlohmann::ordered_json(nullptr));
            }
            series.push_back({{"tool", tool}, {"values", std::move(values)}});
        }
        chart["series"] = std::move(series);
        charts.push_back(std::move(chart));
    }
    doc["charts"] = std::move(charts);
    return doc.dump(2) + "\n";
}

}  // namespace

std::string emit_report(std::span<const ReportTable> tables, ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: return emit_csv(tables);
        case ReportFormat::json: return emit_json(tables);
        case ReportFormat::markdown: return emit_markdown(tables);
        case ReportFormat::radar_json: return emit_radar(tables);
    }
    throw HarnessError("unknown report format");
}

// ---------------------------------------------------------------------------
// Per-document outputs

namespace {
constexpr std::string_view kScoreColumns[] = {"doc_id", "tool",    "language",     "rouge_n",   "rougeL",
                                              "ned",    "ned_raw", "char_overlap", "predicted", "error"};
}

std::string write_scores_csv(std::span<const ScoreRecord> records) {
    std::string out;
    for (const auto col : kScoreColumns) out += std::string(out.empty() ? "" : ",") + std::string(col);
    out += '\n';
    for (const auto& r : records) {
        const json predicted = r.predicted;
        out += csv_field(r.doc_id) + ',' + csv_field(r.tool) + ',' + csv_field(r.language) + ',' +
               format_double(r.rouge_n) + ',' + format_double(r.rouge_l) + ',' + format_double(r.ned) + ',' +
               format_double(r.ned_raw) + ',' + (r.char_overlap ? "1" : "0") + ',' +
               csv_field(predicted.dump(-1, ' ', false, json::error_handler_t::replace)) + ',' +
               csv_field(r.error.value_or("")) + '\n';
    }
    return out;
}

std::vector<ScoreRecord> read_scores_csv(std::istream& in) {
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields)) throw HarnessError("scores CSV is empty");
    constexpr std::size_t kColumns = std::size(kScoreColumns);
    if (!std::equal(fields.begin(), fields.end(), std::begin(kScoreColumns), std::end(kScoreColumns)))
        throw HarnessError("unexpected scores CSV header");
    std::vector<ScoreRecord> out;
    std::size_t line = 1;
    while (read_csv_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != kColumns)
            throw HarnessError("scores CSV line " + std::to_string(line) + ": expected " + std::to_string(kColumns) +
                               " fields");
        ScoreRecord r;
        r.doc_id = fields[0];
        r.tool = fields[1];
        r.language = fields[2];
        r.rouge_n = parse_double(fields[3]);
        r.rouge_l = parse_double(fields[4]);
        r.ned = parse_double(fields[5]);
        r.ned_raw = parse_double(fields[6]);
        r.char_overlap = fields[7] == "1";
        try {
            r.predicted = json::parse(fields[8]).get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw HarnessError("scores CSV line " + std::to_string(line) + ": bad predicted list");
        }
        if (!fields[9].empty()) r.error = fields[9];
        out.push_back(std::move(r));
    }
    return out;
}

std::string write_predictions_jsonl(std::span<const ScoreRecord> records) {
    std::string out;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["id"] = r.doc_id;
        j["tool"] = r.tool;
        j["language"] = r.language;
        j["authors"] = r.predicted;
        j["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
        out += j.dump(-1, ' ', false, json::error_handler_t::replace) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

template <typename T>
T get_as(const json& table, const char* key, const std::string& where) {
    try {
        return table.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

void check_keys(const json& table, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!table.is_object()) throw ConfigError(where + " must be a table");
    for (const auto& [k, v] : table.items()) {
        (void)v;
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("unknown key " + where + "." + k);
    }
}

std::vector<std::string> command_of(const json& v, const std::string& where) {
    if (v.is_string()) return {"/bin/sh", "-c", v.get<std::string>()};
    if (v.is_array() && !v.empty()) {
        std::vector<std::string> out;
        for (const auto& a : v) {
            if (!a.is_string()) throw ConfigError(where + ".command must contain strings");
            out.push_back(a.get<std::string>());
        }
        return out;
    }
    throw ConfigError(where + ".command must be a non-empty array or a string");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

HarnessConfig parse_harness_config(const json& doc, const std::filesystem::path& base_dir) {
    HarnessConfig cfg;
    check_keys(doc, {"run", "metrics", "extractor", "ner", "adapter"}, "config");

    if (doc.contains("run")) {
        const auto& t = doc["run"];
        check_keys(t, {"timeout_secs", "threads", "max_in_flight"}, "run");
        if (t.contains("timeout_secs")) {
            const double secs = get_as<double>(t, "timeout_secs", "run");
            if (!(secs > 0)) throw ConfigError("run.timeout_secs must be positive");
            cfg.run.timeout = std::chrono::milliseconds(static_cast<long long>(secs * 1000));
        }
        if (t.contains("threads")) cfg.run.threads = get_as<std::size_t>(t, "threads", "run");
        if (t.contains("max_in_flight")) {
            cfg.run.max_in_flight = get_as<std::size_t>(t, "max_in_flight", "run");
            if (cfg.run.max_in_flight == 0) throw ConfigError("run.max_in_flight must be at least 1");
        }
    }
    if (doc.contains("metrics")) {
        const auto& t = doc["metrics"];
        check_keys(t,
                   {"rouge_n", "insert_cost", "delete_cost", "substitute_cost", "clamp_ned", "empty_pair_matches"},
                   "metrics");
        auto& m = cfg.run.metrics;
        if (t.contains("rouge_n")) m.rouge_n = get_as<int>(t, "rouge_n", "metrics");
        if (t.contains("insert_cost")) m.costs.insert = get_as<std::uint32_t>(t, "insert_cost", "metrics");
        if (t.contains("delete_cost")) m.costs.remove = get_as<std::uint32_t>(t, "delete_cost", "metrics");
        if (t.contains("substitute_cost")) m.costs.substitute = get_as<std::uint32_t>(t, "substitute_cost", "metrics");
        if (t.contains("clamp_ned")) m.clamp_ned = get_as<bool>(t, "clamp_ned", "metrics");
        if (t.contains("empty_pair_matches")) m.empty_pair_matches = get_as<bool>(t, "empty_pair_matches", "metrics");
        try {
            m.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("metrics: ") + e.what());
        }
    }
    if (doc.contains("extractor")) cfg.extractor.apply(doc["extractor"]);
    if (doc.contains("ner")) {
        const auto& t = doc["ner"];
        check_keys(t, {"k", "include_organizations", "person_gazetteer", "organization_gazetteer", "command"}, "ner");
        json sel = json::object();
        if (t.contains("k")) sel["k"] = t["k"];
        if (t.contains("include_organizations")) sel["include_organizations"] = t["include_organizations"];
        cfg.extractor.apply(json{{"ner", sel}});
        if (t.contains("person_gazetteer"))
            cfg.ner.person_gazetteer = resolve(base_dir, get_as<std::string>(t, "person_gazetteer", "ner"));
        if (t.contains("organization_gazetteer"))
            cfg.ner.organization_gazetteer = resolve(base_dir, get_as<std::string>(t, "organization_gazetteer", "ner"));
        if (t.contains("command")) cfg.ner.command = command_of(t["command"], "ner");
    }
    if (doc.contains("adapter")) {
        const auto& list = doc["adapter"];
        if (!list.is_array()) throw ConfigError("adapter must be an array of tables ([[adapter]])");
        std::set<std::string> names;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "adapter[" + std::to_string(i) + "]";
            const auto& t = list[i];
            check_keys(t, {"name", "kind", "builtin", "use_ner", "command"}, where);
            AdapterSpec spec;
            if (!t.contains("name")) throw ConfigError(where + ": missing name");
            spec.name = get_as<std::string>(t, "name", where);
            if (spec.name.empty()) throw ConfigError(where + ": empty name");
            if (!names.insert(spec.name).second) throw ConfigError("duplicate adapter name " + spec.name);
            const std::string kind =
                t.contains("kind") ? get_as<std::string>(t, "kind", where) : (t.contains("command") ? "external" : "builtin");
            if (kind == "builtin") {
                spec.mode = AdapterMode::builtin;
                spec.builtin = t.contains("builtin") ? get_as<std::string>(t, "builtin", where) : "cascade";
                if (spec.builtin != "cascade" && spec.builtin != "custom-ner" && spec.builtin != "gold")
                    throw ConfigError(where + ": unknown builtin \"" + spec.builtin + "\"");
                if (t.contains("use_ner")) spec.use_ner = get_as<bool>(t, "use_ner", where);
            } else if (kind == "external") {
                spec.mode = AdapterMode::external_process;
                if (!t.contains("command")) throw ConfigError(where + ": external adapter needs a command");
                spec.command = command_of(t["command"], where);
            } else {
                throw ConfigError(where + ": kind must be \"builtin\" or \"external\"");
            }
            cfg.adapters.push_back(std::move(spec));
        }
    }
    if (cfg.adapters.empty()) throw ConfigError("no [[adapter]] entries");
    return cfg;
}

HarnessConfig load_harness_config(const std::filesystem::path& path) {
    return parse_harness_config(read_config_document(path), path.parent_path());
}

std::shared_ptr<ner::NerProvider> make_ner_provider(const HarnessConfig& config) {
    if (!config.ner.command.empty())
        return std::make_shared<ExternalNerProvider>(config.ner.command, config.run.timeout);
    ner::Gazetteer persons;
    ner::Gazetteer orgs;
    if (config.ner.person_gazetteer) persons = ner::Gazetteer::load(*config.ner.person_gazetteer);
    if (config.ner.organization_gazetteer) orgs = ner::Gazetteer::load(*config.ner.organization_gazetteer);
    return std::make_shared<ner::RuleBasedNer>(std::move(persons), std::move(orgs));
}

std::vector<std::unique_ptr<ExtractorAdapter>> make_adapters(const HarnessConfig& config, const Corpus& corpus) {
    std::shared_ptr<ner::NerProvider> provider;
    auto ner = [&] {
        if (!provider) provider = make_ner_provider(config);
        return provider;
    };
    std::vector<std::unique_ptr<ExtractorAdapter>> out;
    for (const auto& spec : config.adapters) {
        if (spec.mode == AdapterMode::external_process) {
            out.push_back(std::make_unique<ExternalAdapter>(spec.name, spec.command));
        } else if (spec.builtin == "cascade") {
            out.push_back(make_cascade_adapter(spec.name, config.extractor, spec.use_ner ? ner() : nullptr));
        } else if (spec.builtin == "custom-ner") {
            out.push_back(make_ner_adapter(spec.name, ner(), config.extractor.ner));
        } else {
            out.push_back(make_gold_adapter(spec.name, corpus));
        }
    }
    return out;
}

}  // namespace byline
