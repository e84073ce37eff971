#pragma once

// UTF-8 text helpers shared by the corpus loader, the extractor, the NER
// baseline, and the metrics. Everything here is backed by ICU.

#include <string>
#include <string_view>
#include <vector>

namespace byline::text {

// Decodes UTF-8 into code points. Ill-formed sequences become U+FFFD.
std::u32string to_code_points(std::string_view utf8);
std::string to_utf8(std::u32string_view cps);

// Length in code points.
std::size_t length(std::string_view utf8);

std::string nfc(std::string_view utf8);

// Full Unicode lowercase mapping (root locale). No-op for uncased scripts.
std::string lowercase(std::string_view utf8);

bool is_space(char32_t c);
bool is_punct(char32_t c);
bool is_letter(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_digit(char32_t c);
// Letters and combining marks (Devanagari and Arabic names carry marks).
bool is_word_char(char32_t c);

// Strips Unicode whitespace on both ends.
std::string trim(std::string_view utf8);

// Replaces every run of whitespace with one U+0020 and trims.
std::string collapse_whitespace(std::string_view utf8);

// Strips whitespace and punctuation on both ends.
std::string strip_punct(std::string_view utf8);

// Splits on whitespace runs; never yields empty tokens.
std::vector<std::string> split_whitespace(std::string_view utf8);

bool iequals(std::string_view a, std::string_view b);

// First `n` code points of `utf8`.
std::string prefix(std::string_view utf8, std::size_t n);

}  // namespace byline::text
