#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace byline {

// Which stage of the cascade produced the authors.
enum class Method { jsonld, meta_tag, rel_author, class_heuristic, byline_regex, ner_fallback, none };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct ExtractionDiagnostics {
    std::size_t malformed_jsonld_blocks = 0;
    std::optional<std::string> ner_error;

    bool operator==(const ExtractionDiagnostics&) const = default;
};

struct ExtractionResult {
    std::vector<std::string> authors;
    Method method = Method::none;
    // Uncleaned source strings the authors were derived from.
    std::vector<std::string> raw;
    ExtractionDiagnostics diagnostics;

    bool operator==(const ExtractionResult&) const = default;
};

nlohmann::ordered_json to_json(const ExtractionResult& r);

}  // namespace byline
