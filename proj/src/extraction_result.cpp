#include "byline/extraction_result.hpp"

#include <array>
#include <stdexcept>

namespace byline {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kMethodNames{{
    {Method::jsonld, "jsonld"},
    {Method::meta_tag, "meta_tag"},
    {Method::rel_author, "rel_author"},
    {Method::class_heuristic, "class_heuristic"},
    {Method::byline_regex, "byline_regex"},
    {Method::ner_fallback, "ner_fallback"},
    {Method::none, "none"},
}};

}  // namespace

std::string_view to_string(Method m) {
    for (const auto& [method, name] : kMethodNames) {
        if (method == m) return name;
    }
    return "none";
}

Method method_from_string(std::string_view s) {
    for (const auto& [method, name] : kMethodNames) {
        if (name == s) return method;
    }
    throw std::invalid_argument("unknown extraction method \"" + std::string(s) + "\"");
}

nlohmann::ordered_json to_json(const ExtractionResult& r) {
    nlohmann::ordered_json j;
    j["authors"] = r.authors;
    j["method"] = std::string(to_string(r.method));
    j["raw"] = r.raw;
    nlohmann::ordered_json diag;
    diag["malformed_jsonld_blocks"] = r.diagnostics.malformed_jsonld_blocks;
    diag["ner_error"] = r.diagnostics.ner_error ? nlohmann::ordered_json(*r.diagnostics.ner_error)
                                                : nlohmann::ordered_json(nullptr);
    j["diagnostics"] = std::move(diag);
    return j;
}

}  // namespace byline
