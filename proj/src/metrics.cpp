#include "byline/metrics.hpp"

#include "byline/text.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace byline::metrics {

void MetricConfig::validate() const {
    if (rouge_n < 1) throw std::invalid_argument("rouge_n must be >= 1");
    if (costs.insert == 0 || costs.remove == 0)
        throw std::invalid_argument("insert and delete costs must be positive");
}

std::u32string canonicalize(std::span<const std::string> authors) {
    std::vector<std::string> names;
    names.reserve(authors.size());
    for (const auto& a : authors) {
        auto s = text::lowercase(text::strip_punct(text::collapse_whitespace(text::nfc(a))));
        if (!s.empty()) names.push_back(std::move(s));
    }
    // UTF-8 byte order is code point order.
    std::sort(names.begin(), names.end());
    std::u32string out;
    for (const auto& n : names) {
        if (!out.empty()) out.push_back(kJoinSeparator);
        out += text::to_code_points(n);
    }
    return out;
}

std::string preprocess(std::span<const std::string> authors) {
    return text::to_utf8(canonicalize(authors));
}

std::uint64_t edit_distance(std::u32string_view a, std::u32string_view b, const EditCosts& costs) {
    // Two-row DP; row i holds the cost of turning a[0..i) into b[0..j).
    std::vector<std::uint64_t> prev(b.size() + 1);
    std::vector<std::uint64_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j * costs.insert;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i * costs.remove;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::uint64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : costs.substitute);
            cur[j] = std::min({sub, prev[j] + costs.remove, cur[j - 1] + costs.insert});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::uint64_t edit_distance(std::string_view a, std::string_view b, const EditCosts& costs) {
    return edit_distance(text::to_code_points(a), text::to_code_points(b), costs);
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

double f1(double overlap, double pred_count, double gold_count) {
    if (overlap <= 0.0) return 0.0;
    const double p = overlap / pred_count;
    const double r = overlap / gold_count;
    return 2.0 * p * r / (p + r);
}

// Returns true and sets `out` when one side has nothing to compare.
bool empty_convention(bool pred_empty, bool gold_empty, const MetricConfig& config, double& out) {
    if (pred_empty && gold_empty) {
        out = config.empty_pair_matches ? 1.0 : 0.0;
        return true;
    }
    if (pred_empty || gold_empty) {
        out = 0.0;
        return true;
    }
    return false;
}

}  // namespace

NedValue normalized_edit_distance(std::u32string_view pred, std::u32string_view gold,
                                  const MetricConfig& config) {
    if (pred.empty() && gold.empty()) {
        const double v = config.empty_pair_matches ? 0.0 : 1.0;
        return {v, v};
    }
    const auto d = edit_distance(pred, gold, config.costs);
    const double raw = static_cast<double>(d) / static_cast<double>(std::max(pred.size(), gold.size()));
    if (pred.empty() || gold.empty()) return {1.0, raw};
    return {config.clamp_ned ? std::min(raw, 1.0) : raw, raw};
}

double rouge_n(std::u32string_view pred, std::u32string_view gold, int n, const MetricConfig& config) {
    if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
    const auto grams = [n](std::u32string_view s) {
        std::map<std::u32string_view, std::size_t> counts;
        const auto un = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i + un <= s.size(); ++i) ++counts[s.substr(i, un)];
        return counts;
    };
    const auto pg = grams(pred);
    const auto gg = grams(gold);
    std::size_t pred_total = 0;
    std::size_t gold_total = 0;
    for (const auto& [_, c] : pg) pred_total += c;
    for (const auto& [_, c] : gg) gold_total += c;

    double conv = 0.0;
    if (empty_convention(pred.empty(), gold.empty(), config, conv)) return conv;
    // Both strings shorter than n.
    if (pred_total == 0 && gold_total == 0) return pred == gold ? 1.0 : 0.0;
    if (pred_total == 0 || gold_total == 0) return 0.0;

    std::size_t overlap = 0;
    for (const auto& [g, c] : pg) {
        if (auto it = gg.find(g); it != gg.end()) overlap += std::min(c, it->second);
    }
    return f1(static_cast<double>(overlap), static_cast<double>(pred_total),
              static_cast<double>(gold_total));
}

double rouge_l(std::u32string_view pred, std::u32string_view gold, const MetricConfig& config) {
    double conv = 0.0;
    if (empty_convention(pred.empty(), gold.empty(), config, conv)) return conv;
    return f1(static_cast<double>(lcs_length(pred, gold)), static_cast<double>(pred.size()),
              static_cast<double>(gold.size()));
}

NedValue normalized_edit_distance(std::span<const std::string> pred, std::span<const std::string> gold,
                                  const MetricConfig& config) {
    return normalized_edit_distance(canonicalize(pred), canonicalize(gold), config);
}

double rouge_n(std::span<const std::string> pred, std::span<const std::string> gold, int n,
               const MetricConfig& config) {
    return rouge_n(canonicalize(pred), canonicalize(gold), n, config);
}

double rouge_l(std::span<const std::string> pred, std::span<const std::string> gold,
               const MetricConfig& config) {
    return rouge_l(canonicalize(pred), canonicalize(gold), config);
}

DocumentScores score_document(std::span<const std::string> pred, std::span<const std::string> gold,
                              const MetricConfig& config) {
    config.validate();
    const auto p = canonicalize(pred);
    const auto g = canonicalize(gold);
    DocumentScores s;
    s.rouge_n = rouge_n(p, g, config.rouge_n, config);
    s.rouge_l = rouge_l(p, g, config);
    const auto ned = normalized_edit_distance(p, g, config);
    s.ned = ned.value;
    s.ned_raw = ned.raw;
    if (p.empty() && g.empty()) {
        s.char_overlap = true;
    } else {
        s.char_overlap = rouge_n(p, g, 1, config) > 0.0;
    }
    return s;
}

}  // namespace byline::metrics
