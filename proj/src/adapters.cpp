#include "byline/adapters.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "byline/text.hpp"

namespace byline {

using json = nlohmann::json;
using Clock = Subprocess::Clock;

void RunLog::add(std::string line) {
    std::lock_guard lock(mu_);
    lines_.push_back(std::move(line));
}

std::vector<std::string> RunLog::lines() const {
    std::lock_guard lock(mu_);
    return lines_;
}

namespace {

void log_to(const AdapterContext& ctx, std::string line) {
    if (ctx.log) ctx.log->add(std::move(line));
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
    std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(n, jobs));
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    const std::size_t workers = worker_count(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json request_json(const Document& d) {
    json r = json::object();
    r["id"] = d.id;
    r["html"] = d.html;
    r["url"] = d.url ? json(*d.url) : json(nullptr);
    r["language"] = d.language;
    return r;
}

std::string handshake_line() {
    json h = json::object();
    h["protocol"] = kProtocol;
    return dump(h) + "\n";
}

// Reads the handshake reply. Returns the adapter's name, throws
// std::runtime_error with a diagnostic otherwise.
json perform_handshake(Subprocess& proc, std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    if (!proc.write(handshake_line(), deadline)) throw std::runtime_error("handshake: adapter is not reading stdin");
    std::string line;
    while (true) {
        const auto status = proc.read_line(line, deadline);
        if (status == Subprocess::ReadStatus::timeout) throw std::runtime_error("handshake: timed out");
        if (status == Subprocess::ReadStatus::eof) throw std::runtime_error("handshake: adapter exited");
        if (!text::trim(line).empty()) break;
    }
    json reply;
    try {
        reply = json::parse(line);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("handshake: bad JSON: ") + e.what());
    }
    if (!reply.is_object() || !reply.contains("protocol") || reply["protocol"] != kProtocol)
        throw std::runtime_error("handshake: expected protocol " + std::string(kProtocol));
    if (!reply.contains("name") || !reply["name"].is_string())
        throw std::runtime_error("handshake: missing adapter name");
    return reply;
}

struct ParsedResponse {
    std::string id;
    AdapterResult result;
};

// Throws std::runtime_error describing the violation.
ParsedResponse parse_response(const std::string& line, std::string_view payload_key) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("response is not an object");
    if (!j.contains("id") || !j["id"].is_string()) throw std::runtime_error("response without string id");
    ParsedResponse r;
    r.id = j["id"].get<std::string>();
    if (j.contains("error") && !j["error"].is_null()) {
        if (!j["error"].is_string()) throw std::runtime_error("error must be a string or null (id " + r.id + ")");
        r.result.error = j["error"].get<std::string>();
        return r;
    }
    const auto key = std::string(payload_key);
    if (!j.contains(key) || !j[key].is_array()) throw std::runtime_error(key + " must be an array (id " + r.id + ")");
    if (payload_key == "authors") {
        for (const auto& a : j[key]) {
            if (!a.is_string()) throw std::runtime_error("authors must be strings (id " + r.id + ")");
            r.result.authors.push_back(text::nfc(a.get<std::string>()));
        }
    }
    return r;
}

}  // namespace

std::vector<AdapterResult> BuiltinAdapter::run(std::span<const Document> documents, const AdapterContext& context) {
    std::vector<AdapterResult> out(documents.size());
    parallel_for(documents.size(), concurrent_ ? context.threads : 1, [&](std::size_t i) {
        try {
            out[i].authors = fn_(documents[i]);
        } catch (const std::exception& e) {
            out[i].error = e.what();
            log_to(context, "[" + name_ + "] " + documents[i].id + ": " + e.what());
        }
    });
    return out;
}

std::unique_ptr<ExtractorAdapter> make_cascade_adapter(std::string name, extract::ExtractorConfig config,
                                                       std::shared_ptr<ner::NerProvider> ner) {
    if (ner && !ner->concurrent_safe()) ner = std::make_shared<ner::SerializedProvider>(std::move(ner));
    auto fn = [config = std::move(config), ner](const Document& d) {
        return extract::extract(d.html, d.language, ner.get(), config).authors;
    };
    return std::make_unique<BuiltinAdapter>(std::move(name), std::move(fn));
}

std::unique_ptr<ExtractorAdapter> make_ner_adapter(std::string name, std::shared_ptr<ner::NerProvider> ner,
                                                   ner::SelectOptions options) {
    if (!ner) throw std::invalid_argument("make_ner_adapter: provider required");
    if (!ner->concurrent_safe()) ner = std::make_shared<ner::SerializedProvider>(std::move(ner));
    auto fn = [ner, options](const Document& d) {
        if (!ner->supports(d.language)) return std::vector<std::string>{};
        return ner::ner_extract(std::string_view(d.html), d.language, *ner, options).authors;
    };
    return std::make_unique<BuiltinAdapter>(std::move(name), std::move(fn));
}

std::unique_ptr<ExtractorAdapter> make_gold_adapter(std::string name, const Corpus& corpus) {
    std::map<std::string, std::vector<std::string>, std::less<>> gold;
    for (const auto& d : corpus.documents()) gold[d.id] = corpus.label(d.id).authors;
    auto fn = [gold = std::move(gold)](const Document& d) {
        const auto it = gold.find(d.id);
        if (it == gold.end()) throw std::runtime_error("no gold label for " + d.id);
        return it->second;
    };
    return std::make_unique<BuiltinAdapter>(std::move(name), std::move(fn));
}

namespace {

std::vector<AdapterResult> run_external(const std::string& label, const std::vector<std::string>& command,
                                        std::span<const Document> documents, const AdapterContext& ctx,
                                        std::string* reported_name) {
    const std::size_t n = documents.size();
    std::vector<AdapterResult> results(n);
    if (n == 0) return results;

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i)
        if (!index.emplace(documents[i].id, i).second)
            throw std::invalid_argument("call_external: duplicate document id " + documents[i].id);

    auto fail_all = [&](std::size_t from, const std::string& why) {
        for (std::size_t i = from; i < n; ++i) results[i] = AdapterResult{{}, why};
    };

    std::optional<Subprocess> proc;
    try {
        proc = Subprocess::spawn(command);
        const json reply = perform_handshake(*proc, ctx.timeout);
        if (reported_name) *reported_name = reply["name"].get<std::string>();
    } catch (const std::exception& e) {
        log_to(ctx, "[" + label + "] disabled: " + e.what());
        fail_all(0, std::string("adapter disabled: ") + e.what());
        return results;
    }

    struct InFlight {
        std::size_t index;
        Clock::time_point sent;
    };
    std::deque<InFlight> in_flight;
    std::vector<bool> done(n, false);
    std::vector<bool> sent(n, false);
    std::size_t next = 0;
    std::size_t remaining = n;
    Clock::time_point last_progress = Clock::now();
    const std::size_t window = std::max<std::size_t>(1, ctx.max_in_flight);

    auto disable = [&](const std::string& why) {
        log_to(ctx, "[" + label + "] disabled: " + why);
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i]) results[i] = AdapterResult{{}, "adapter disabled: " + why};
        remaining = 0;
    };
    auto resolve = [&](std::size_t i, AdapterResult r) {
        done[i] = true;
        results[i] = std::move(r);
        --remaining;
        in_flight.erase(std::find_if(in_flight.begin(), in_flight.end(), [i](const InFlight& f) { return f.index == i; }));
        last_progress = Clock::now();
    };

    std::string line;
    bool writes_failed = false;
    while (remaining > 0) {
        while (!writes_failed && in_flight.size() < window && next < n) {
            const auto deadline = Clock::now() + ctx.timeout;
            if (!proc->write(dump(request_json(documents[next])) + "\n", deadline)) {
                writes_failed = true;
                break;
            }
            sent[next] = true;
            in_flight.push_back({next, Clock::now()});
            ++next;
        }
        if (remaining == 0) break;
        if (in_flight.empty()) {
            std::string why = "adapter stopped reading requests";
            if (auto st = proc->finish(std::chrono::milliseconds(500))) why = "adapter exited (" + describe_exit(*st) + ")";
            disable(why);
            break;
        }

        const auto& oldest = in_flight.front();
        const auto deadline = std::max(oldest.sent, last_progress) + ctx.timeout;
        const auto status = proc->read_line(line, deadline);
        if (status == Subprocess::ReadStatus::timeout) {
            const std::size_t i = oldest.index;
            log_to(ctx, "[" + label + "] " + documents[i].id + ": timed out");
            resolve(i, AdapterResult{{}, "timeout"});
            continue;
        }
        if (status == Subprocess::ReadStatus::eof) {
            std::string why = "adapter exited";
            if (auto st = proc->finish(std::chrono::milliseconds(500))) why += " (" + describe_exit(*st) + ")";
            disable(why);
            break;
        }
        if (text::trim(line).empty()) continue;
        ParsedResponse r;
        try {
            r = parse_response(line, "authors");
        } catch (const std::exception& e) {
            disable(std::string("protocol violation: ") + e.what());
            break;
        }
        const auto it = index.find(r.id);
        if (it == index.end() || !sent[it->second]) {
            disable("protocol violation: unknown id " + r.id);
            break;
        }
        const std::size_t i = it->second;
        if (done[i]) {
            if (results[i].error == "timeout") {
                log_to(ctx, "[" + label + "] " + r.id + ": late response ignored");
                continue;
            }
            disable("protocol violation: duplicate response for id " + r.id);
            break;
        }
        if (r.result.error) {
            log_to(ctx, "[" + label + "] " + r.id + ": adapter error: " + *r.result.error);
            r.result.authors.clear();
        }
        resolve(i, std::move(r.result));
    }
    proc->finish();
    return results;
}

}  // namespace

std::vector<AdapterResult> ExternalAdapter::run(std::span<const Document> documents, const AdapterContext& context) {
    return run_external(name_, command_, documents, context, nullptr);
}

std::vector<AdapterResult> call_external(const std::vector<std::string>& command, std::span<const Document> documents,
                                         const AdapterContext& context, std::string* reported_name) {
    if (command.empty()) throw std::invalid_argument("call_external: empty command");
    return run_external(command.front(), command, documents, context, reported_name);
}

ExternalNerProvider::ExternalNerProvider(std::vector<std::string> command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
    if (command_.empty()) throw ner::NerError("external NER: empty command");
    try {
        process_ = Subprocess::spawn(command_);
        const json reply = perform_handshake(*process_, timeout_);
        name_ = reply["name"].get<std::string>();
        if (reply.contains("languages") && reply["languages"].is_array()) {
            languages_.emplace();
            for (const auto& l : reply["languages"])
                if (l.is_string()) languages_->push_back(l.get<std::string>());
        }
    } catch (const std::exception& e) {
        process_.reset();
        throw ner::NerError(std::string("external NER: ") + e.what());
    }
}

bool ExternalNerProvider::supports(std::string_view language) const {
    if (!languages_) return true;
    return std::find(languages_->begin(), languages_->end(), language) != languages_->end();
}

std::vector<ner::CandidateEntity> ExternalNerProvider::annotate(std::string_view text, std::string_view language) {
    std::lock_guard lock(mu_);
    if (!process_) throw ner::NerError("external NER " + name_ + " is not running");
    auto fail = [&](const std::string& why) -> ner::NerError {
        process_.reset();
        return ner::NerError("external NER " + name_ + ": " + why);
    };

    const std::string id = "n" + std::to_string(next_id_++);
    json req = json::object();
    req["id"] = id;
    req["text"] = std::string(text);
    req["language"] = std::string(language);
    const auto deadline = Clock::now() + timeout_;
    if (!process_->write(dump(req) + "\n", deadline)) throw fail("stopped reading requests");

    std::string line;
    json j;
    while (true) {
        const auto status = process_->read_line(line, deadline);
        if (status == Subprocess::ReadStatus::timeout) throw fail("timed out");
        if (status == Subprocess::ReadStatus::eof) throw fail("exited");
        if (text::trim(line).empty()) continue;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw fail(std::string("bad JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("id") || j["id"] != id) throw fail("unexpected response id");
        break;
    }
    if (j.contains("error") && !j["error"].is_null())
        throw ner::NerError("external NER " + name_ + ": " + j["error"].get<std::string>());
    if (!j.contains("entities") || !j["entities"].is_array()) throw fail("entities must be an array");

    // Mentions without a frequency are aggregated by (surface, kind).
    std::map<std::pair<std::string, ner::EntityKind>, ner::CandidateEntity> merged;
    std::vector<std::pair<std::string, ner::EntityKind>> order;
    for (const auto& e : j["entities"]) {
        if (!e.is_object()) throw fail("entity must be an object");
        const json* surface = e.contains("surface") ? &e["surface"] : e.contains("text") ? &e["text"] : nullptr;
        if (!surface || !surface->is_string()) throw fail("entity without surface");
        const auto kind_field = e.contains("kind") ? e["kind"] : e.contains("label") ? e["label"] : json("other");
        const auto kind = ner::kind_from_string(kind_field.is_string() ? kind_field.get<std::string>() : "other");
        const std::size_t offset = e.contains("first_offset") ? e["first_offset"].get<std::size_t>()
                                   : e.contains("start")      ? e["start"].get<std::size_t>()
                                                              : 0;
        const std::size_t freq = e.contains("frequency") ? e["frequency"].get<std::size_t>() : 1;
        const std::string s = text::collapse_whitespace(text::nfc(surface->get<std::string>()));
        if (s.empty()) continue;
        const auto key = std::make_pair(s, kind);
        auto [it, inserted] = merged.try_emplace(key, ner::CandidateEntity{s, kind, offset, 0});
        if (inserted) order.push_back(key);
        it->second.frequency += freq;
        it->second.first_offset = std::min(it->second.first_offset, offset);
    }
    std::vector<ner::CandidateEntity> out;
    for (const auto& k : order) out.push_back(merged.at(k));
    return out;
}

bool ConformanceReport::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

ConformanceReport check_conformance(const std::vector<std::string>& command, std::chrono::milliseconds timeout) {
    ConformanceReport report;
    auto add = [&](std::string name, bool ok, std::string detail = {}) {
        report.checks.push_back({std::move(name), ok, std::move(detail)});
        return ok;
    };

    std::optional<Subprocess> proc;
    try {
        proc = Subprocess::spawn(command, true);
        report.adapter_name = perform_handshake(*proc, timeout)["name"].get<std::string>();
        add("handshake", true, report.adapter_name);
    } catch (const std::exception& e) {
        add("handshake", false, e.what());
        return report;
    }

    const std::vector<Document> probes{
        {"conf-meta", "en", std::nullopt,
         "<html><head><meta name=\"author\" content=\"Jane Doe\"></head><body><p>Text.</p></body></html>"},
        {"conf-empty", "en", std::string("https://example.org/empty"), "<html><body></body></html>"},
        {"conf-garbage", "en", std::nullopt, std::string("\x01\x02<<<>>>&&&#;") + "\xef\xbf\xbd"},
        {"conf-after", "de", std::nullopt, "<p>Von Max Mustermann</p>"},
    };
    std::map<std::string, int> seen;
    std::map<std::string, ParsedResponse> responses;
    bool valid = true;
    std::string violation;
    const auto deadline = Clock::now() + timeout * static_cast<int>(probes.size());
    for (const auto& d : probes) {
        if (!proc->write(dump(request_json(d)) + "\n", deadline)) {
            valid = false;
            violation = "adapter stopped reading requests";
            break;
        }
        std::string line;
        bool got = false;
        while (!got) {
            const auto st = proc->read_line(line, deadline);
            if (st != Subprocess::ReadStatus::line) {
                violation = st == Subprocess::ReadStatus::eof ? "adapter exited" : "timed out";
                break;
            }
            if (text::trim(line).empty()) continue;
            try {
                auto r = parse_response(line, "authors");
                ++seen[r.id];
                responses[r.id] = std::move(r);
            } catch (const std::exception& e) {
                valid = false;
                violation = e.what();
            }
            got = true;
        }
        if (!got) break;
    }
    proc->finish(std::chrono::milliseconds(500));

    add("valid JSON responses", valid, violation);
    bool echo = true;
    bool once = true;
    for (const auto& d : probes) {
        if (!seen.contains(d.id)) echo = false;
        else if (seen[d.id] != 1) once = false;
    }
    for (const auto& [id, count] : seen) {
        (void)count;
        if (std::none_of(probes.begin(), probes.end(), [&](const Document& d) { return d.id == id; })) echo = false;
    }
    add("id echo", echo, echo ? "" : violation);
    add("one response per request", echo && once);
    const auto empty = responses.find("conf-empty");
    add("empty body yields no authors", empty != responses.end() && empty->second.result.authors.empty() &&
                                            !empty->second.result.error);
    const auto garbage = responses.find("conf-garbage");
    const auto after = responses.find("conf-after");
    add("fault path answered", garbage != responses.end() && after != responses.end());
    return report;
}

}  // namespace byline
