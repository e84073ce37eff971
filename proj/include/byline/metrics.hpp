#pragma once

// Author-list similarity measures: cost-weighted normalized edit distance
// and character-level ROUGE-n / ROUGE-L over a canonical string built from
// each author list.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace byline::metrics {

struct EditCosts {
    std::uint32_t insert = 1;
    std::uint32_t remove = 1;
    std::uint32_t substitute = 2;

    bool operator==(const EditCosts&) const = default;
};

struct MetricConfig {
    int rouge_n = 1;
    EditCosts costs;
    // Both lists empty counts as a perfect match (ROUGE 1, NED 0); otherwise
    // as a total miss (ROUGE 0, NED 1).
    bool empty_pair_matches = true;
    // Cost-2 substitutions can push the normalized distance up to 2.0.
    bool clamp_ned = true;

    // Throws std::invalid_argument on rouge_n < 1 or a zero insert/remove cost.
    void validate() const;
};

// Separator placed between sorted author names in the canonical string.
inline constexpr char32_t kJoinSeparator = U' ';

// Canonical form of one author list: each name NFC-normalized, whitespace
// collapsed, surrounding whitespace/punctuation stripped, lowercased; names
// sorted by code point and joined with kJoinSeparator. Names that clean to
// nothing are dropped.
std::u32string canonicalize(std::span<const std::string> authors);
std::string preprocess(std::span<const std::string> authors);

std::uint64_t edit_distance(std::u32string_view a, std::u32string_view b,
                            const EditCosts& costs = {});
std::uint64_t edit_distance(std::string_view a, std::string_view b, const EditCosts& costs = {});

std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

struct NedValue {
    double value = 0.0;  // clamped per config
    double raw = 0.0;
};

// Canonical-string level measures.
NedValue normalized_edit_distance(std::u32string_view pred, std::u32string_view gold,
                                  const MetricConfig& config = {});
double rouge_n(std::u32string_view pred, std::u32string_view gold, int n,
               const MetricConfig& config = {});
double rouge_l(std::u32string_view pred, std::u32string_view gold, const MetricConfig& config = {});

// Author-list level measures; preprocess is applied to both sides.
NedValue normalized_edit_distance(std::span<const std::string> pred, std::span<const std::string> gold,
                                  const MetricConfig& config = {});
double rouge_n(std::span<const std::string> pred, std::span<const std::string> gold, int n,
               const MetricConfig& config = {});
double rouge_l(std::span<const std::string> pred, std::span<const std::string> gold,
               const MetricConfig& config = {});

struct DocumentScores {
    double rouge_n = 0.0;  // n = config.rouge_n
    double rouge_l = 0.0;
    double ned = 0.0;
    double ned_raw = 0.0;
    // True when prediction and gold share at least one character, or both
    // are empty.
    bool char_overlap = false;
};

DocumentScores score_document(std::span<const std::string> pred, std::span<const std::string> gold,
                              const MetricConfig& config = {});

}  // namespace byline::metrics
