#include "byline/corpus.hpp"

#include "byline/text.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace byline {

namespace {

constexpr std::array<std::string_view, 184> kIso6391{
    "aa", "ab", "ae", "af", "ak", "am", "an", "ar", "as", "av", "ay", "az", "ba", "be", "bg", "bh", "bi",
    "bm", "bn", "bo", "br", "bs", "ca", "ce", "ch", "co", "cr", "cs", "cu", "cv", "cy", "da", "de", "dv",
    "dz", "ee", "el", "en", "eo", "es", "et", "eu", "fa", "ff", "fi", "fj", "fo", "fr", "fy", "ga", "gd",
    "gl", "gn", "gu", "gv", "ha", "he", "hi", "ho", "hr", "ht", "hu", "hy", "hz", "ia", "id", "ie", "ig",
    "ii", "ik", "io", "is", "it", "iu", "ja", "jv", "ka", "kg", "ki", "kj", "kk", "kl", "km", "kn", "ko",
    "kr", "ks", "ku", "kv", "kw", "ky", "la", "lb", "lg", "li", "ln", "lo", "lt", "lu", "lv", "mg", "mh",
    "mi", "mk", "ml", "mn", "mr", "ms", "mt", "my", "na", "nb", "nd", "ne", "ng", "nl", "nn", "no", "nr",
    "nv", "ny", "oc", "oj", "om", "or", "os", "pa", "pi", "pl", "ps", "pt", "qu", "rm", "rn", "ro", "ru",
    "rw", "sa", "sc", "sd", "se", "sg", "si", "sk", "sl", "sm", "sn", "so", "sq", "sr", "ss", "st", "su",
    "sv", "sw", "ta", "te", "tg", "th", "ti", "tk", "tl", "tn", "to", "tr", "ts", "tt", "tw", "ty", "ug",
    "uk", "ur", "uz", "ve", "vi", "vo", "wa", "wo", "xh", "yi", "yo", "za", "zh", "zu"};

const std::set<std::string_view> kFields{"id", "language", "url", "html", "authors"};

void validate_label(const GoldLabel& label) {
    std::set<std::string_view> seen;
    for (const auto& a : label.authors) {
        if (text::trim(a).empty())
            throw CorpusError("document \"" + label.doc_id + "\": empty author string");
        if (!seen.insert(a).second)
            throw CorpusError("document \"" + label.doc_id + "\": duplicate author \"" + a + "\"");
    }
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw CorpusError(std::string("missing required field \"") + key + "\"");
    return *it;
}

std::string require_string(const nlohmann::json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) throw CorpusError(std::string("field \"") + key + "\" must be a string");
    return text::nfc(v.get<std::string>());
}

std::pair<Document, GoldLabel> parse_line(std::string_view line, const LoadOptions& options) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw CorpusError(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw CorpusError("expected a JSON object");
    if (!options.lax) {
        for (const auto& [key, _] : obj.items()) {
            if (!kFields.contains(key)) throw CorpusError("unknown field \"" + key + "\"");
        }
    }
    Document doc;
    doc.id = require_string(obj, "id");
    doc.language = require_string(obj, "language");
    doc.html = require_string(obj, "html");
    const auto& url = require(obj, "url");
    if (url.is_string()) {
        doc.url = text::nfc(url.get<std::string>());
    } else if (!url.is_null()) {
        throw CorpusError("field \"url\" must be a string or null");
    }
    const auto& authors = require(obj, "authors");
    if (!authors.is_array()) throw CorpusError("field \"authors\" must be an array");
    GoldLabel label{doc.id, {}};
    for (const auto& a : authors) {
        if (!a.is_string()) throw CorpusError("field \"authors\" must contain only strings");
        label.authors.push_back(text::nfc(a.get<std::string>()));
    }
    return {std::move(doc), std::move(label)};
}

}  // namespace

bool is_valid_language(std::string_view code) {
    return std::binary_search(kIso6391.begin(), kIso6391.end(), code);
}

Corpus::Corpus(std::vector<Document> documents, std::vector<GoldLabel> labels)
    : documents_(std::move(documents)) {
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& d = documents_[i];
        if (d.id.empty()) throw CorpusError("document id must be non-empty");
        if (!is_valid_language(d.language))
            throw CorpusError("document \"" + d.id + "\": invalid language code \"" + d.language + "\"");
        if (d.html.empty()) throw CorpusError("document \"" + d.id + "\": empty html");
        if (!index_.emplace(d.id, i).second) throw CorpusError("duplicate id \"" + d.id + "\"");
    }
    for (auto& l : labels) {
        if (!index_.contains(l.doc_id)) throw CorpusError("label for unknown document \"" + l.doc_id + "\"");
        validate_label(l);
        auto key = l.doc_id;
        if (!labels_.emplace(std::move(key), std::move(l)).second)
            throw CorpusError("more than one label for document \"" + key + "\"");
    }
    for (const auto& d : documents_) {
        if (!labels_.contains(d.id)) throw CorpusError("document \"" + d.id + "\" has no label");
    }
}

const GoldLabel& Corpus::label(std::string_view doc_id) const {
    const auto it = labels_.find(doc_id);
    if (it == labels_.end()) throw CorpusError("no document \"" + std::string(doc_id) + "\"");
    return it->second;
}

const Document* Corpus::find(std::string_view doc_id) const {
    const auto it = index_.find(doc_id);
    return it == index_.end() ? nullptr : &documents_[it->second];
}

Corpus parse_corpus(std::istream& in, const LoadOptions& options) {
    std::vector<Document> docs;
    std::vector<GoldLabel> labels;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            auto [doc, label] = parse_line(line, options);
            if (!is_valid_language(doc.language))
                throw CorpusError("invalid language code \"" + doc.language + "\"");
            if (doc.html.empty()) throw CorpusError("empty html");
            if (!ids.insert(doc.id).second) throw CorpusError("duplicate id \"" + doc.id + "\"");
            validate_label(label);
            docs.push_back(std::move(doc));
            labels.push_back(std::move(label));
        } catch (const CorpusError& e) {
            throw CorpusError(e.what(), lineno);
        }
    }
    return Corpus(std::move(docs), std::move(labels));
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot open " + path.string());
    return parse_corpus(in, options);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& d : corpus.documents()) {
        nlohmann::ordered_json obj;
        obj["id"] = d.id;
        obj["language"] = d.language;
        obj["url"] = d.url ? nlohmann::ordered_json(*d.url) : nlohmann::ordered_json(nullptr);
        obj["html"] = d.html;
        obj["authors"] = corpus.label(d.id).authors;
        out << obj.dump() << '\n';
    }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusError("cannot write " + path.string());
    write_corpus(corpus, out);
}

std::size_t CorpusStats::total_documents() const {
    std::size_t n = 0;
    for (const auto& [_, c] : per_language) n += c.document_count;
    return n;
}

std::size_t CorpusStats::total_authors() const {
    std::size_t n = 0;
    for (const auto& [_, c] : per_language) n += c.author_count;
    return n;
}

CorpusStats stats(const Corpus& corpus) {
    CorpusStats s;
    std::map<std::string, std::set<std::string>> names;
    for (const auto& d : corpus.documents()) {
        auto& c = s.per_language[d.language];
        ++c.document_count;
        const auto& authors = corpus.label(d.id).authors;
        c.author_count += authors.size();
        names[d.language].insert(authors.begin(), authors.end());
    }
    for (auto& [lang, c] : s.per_language) c.distinct_author_count = names[lang].size();
    return s;
}

namespace {

bool matches_any(std::string_view value, const std::vector<std::string>& names) {
    const auto v = text::lowercase(text::trim(value));
    return std::any_of(names.begin(), names.end(), [&](const std::string& n) { return text::lowercase(n) == v; });
}

std::optional<std::string> string_field(const nlohmann::json& obj, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        const auto it = obj.find(k);
        if (it == obj.end() || it->is_null()) continue;
        if (it->is_string()) return it->get<std::string>();
        if (it->is_number_integer()) return std::to_string(it->get<long long>());
    }
    return std::nullopt;
}

// The first annotation that was not cancelled, or null.
const nlohmann::json* pick_annotation(const nlohmann::json& task, bool& any_cancelled) {
    any_cancelled = false;
    for (const char* key : {"annotations", "completions"}) {
        const auto it = task.find(key);
        if (it == task.end() || !it->is_array()) continue;
        for (const auto& a : *it) {
            if (!a.is_object()) continue;
            if (a.value("was_cancelled", false) || a.value("skipped", false)) {
                any_cancelled = true;
                continue;
            }
            return &a;
        }
    }
    return nullptr;
}

}  // namespace

ConversionResult convert_labelstudio(const nlohmann::json& export_tasks, const LabelStudioOptions& options) {
    if (!export_tasks.is_array()) throw CorpusError("LabelStudio export must be a JSON array of tasks");
    ConversionReport report;
    std::vector<Document> docs;
    std::vector<GoldLabel> labels;

    for (std::size_t i = 0; i < export_tasks.size(); ++i) {
        const auto& task = export_tasks[i];
        ++report.tasks;
        const std::string where = "task #" + std::to_string(i + 1);
        if (!task.is_object()) throw CorpusError(where + ": not an object");
        const auto data_it = task.find("data");
        if (data_it == task.end() || !data_it->is_object()) throw CorpusError(where + ": missing \"data\"");
        const auto& data = *data_it;
        const auto html = string_field(data, {"html", "text"});
        if (!html || html->empty()) throw CorpusError(where + ": missing HTML payload");

        bool cancelled = false;
        const nlohmann::json* annotation = pick_annotation(task, cancelled);
        if (!annotation) {
            ++(cancelled ? report.skipped_by_annotator : report.unannotated);
            continue;
        }

        std::vector<std::string> authors;
        bool flagged = false;
        const auto results = annotation->find("result");
        if (results != annotation->end() && results->is_array()) {
            for (const auto& r : *results) {
                const auto value = r.find("value");
                if (value == r.end() || !value->is_object()) continue;
                if (const auto choices = value->find("choices"); choices != value->end() && choices->is_array()) {
                    for (const auto& c : *choices) {
                        if (c.is_string() && matches_any(c.get<std::string>(), options.drop_choices)) flagged = true;
                    }
                }
                bool is_author = false;
                for (const char* key : {"labels", "htmllabels", "hypertextlabels"}) {
                    const auto l = value->find(key);
                    if (l == value->end() || !l->is_array()) continue;
                    for (const auto& name : *l) {
                        if (name.is_string() && matches_any(name.get<std::string>(), options.author_labels))
                            is_author = true;
                    }
                }
                if (!is_author) continue;
                const auto span = value->find("text");
                if (span == value->end() || !span->is_string()) continue;
                auto cleaned = text::collapse_whitespace(text::nfc(span->get<std::string>()));
                if (cleaned.empty()) continue;
                if (std::find(authors.begin(), authors.end(), cleaned) == authors.end())
                    authors.push_back(std::move(cleaned));
            }
        }
        if (flagged) {
            ++report.flagged_unannotatable;
            continue;
        }

        Document doc;
        if (auto id = string_field(data, {"id", "doc_id"})) {
            doc.id = *id;
        } else if (auto tid = string_field(task, {"id"})) {
            doc.id = "task-" + *tid;
        } else {
            doc.id = "task-" + std::to_string(i + 1);
        }
        auto lang = string_field(data, {"language", "lang"});
        if (!lang) lang = options.default_language;
        if (!lang) throw CorpusError(where + ": no language and no default language given");
        doc.language = *lang;
        doc.url = string_field(data, {"url"});
        doc.html = text::nfc(*html);
        labels.push_back(GoldLabel{doc.id, std::move(authors)});
        docs.push_back(std::move(doc));
        ++report.converted;
    }
    return {Corpus(std::move(docs), std::move(labels)), report};
}

ConversionResult convert_labelstudio(const std::filesystem::path& export_path, const LabelStudioOptions& options) {
    std::ifstream in(export_path, std::ios::binary);
    if (!in) throw CorpusError("cannot open " + export_path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw CorpusError(std::string("LabelStudio export is not valid JSON: ") + e.what());
    }
    return convert_labelstudio(j, options);
}

}  // namespace byline
