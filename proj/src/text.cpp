#include "byline/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace byline::text {

std::u32string to_code_points(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto len = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < len) {
        UChar32 c;
        U8_NEXT(s, i, len, c);
        out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
    }
    return out;
}

std::string to_utf8(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t c : cps) {
        uint8_t buf[U8_MAX_LENGTH];
        int32_t n = 0;
        UBool err = false;
        U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), err);
        if (err) {
            out += "\xEF\xBF\xBD";
            continue;
        }
        out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
    }
    return out;
}

std::size_t length(std::string_view utf8) {
    std::size_t n = 0;
    for (unsigned char c : utf8) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string nfc(std::string_view utf8) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    if (norm->isNormalized(src, status) && U_SUCCESS(status)) return std::string(utf8);
    status = U_ZERO_ERROR;
    icu::UnicodeString dst = norm->normalize(src, status);
    if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
    std::string out;
    dst.toUTF8String(out);
    return out;
}

std::string lowercase(std::string_view utf8) {
    auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    s.toLower(icu::Locale::getRoot());
    std::string out;
    s.toUTF8String(out);
    return out;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) || c == U'\u200B'; }
bool is_punct(char32_t c) {
    const auto cp = static_cast<UChar32>(c);
    if (u_ispunct(cp)) return true;
    // Symbols that show up around bylines: | · • © etc.
    const auto cat = u_charType(cp);
    return cat == U_MATH_SYMBOL || cat == U_OTHER_SYMBOL || cat == U_CURRENCY_SYMBOL ||
           cat == U_MODIFIER_SYMBOL;
}
bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }
bool is_upper(char32_t c) {
    return u_isupper(static_cast<UChar32>(c)) || u_istitle(static_cast<UChar32>(c));
}
bool is_lower(char32_t c) { return u_islower(static_cast<UChar32>(c)); }
bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }
bool is_word_char(char32_t c) {
    const auto cat = u_charType(static_cast<UChar32>(c));
    return is_letter(c) || cat == U_NON_SPACING_MARK || cat == U_COMBINING_SPACING_MARK ||
           cat == U_ENCLOSING_MARK;
}

namespace {

template <typename Pred>
std::string strip_if(std::string_view utf8, Pred pred) {
    auto cps = to_code_points(utf8);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && pred(cps[b])) ++b;
    while (e > b && pred(cps[e - 1])) --e;
    return to_utf8(std::u32string_view(cps).substr(b, e - b));
}

}  // namespace

std::string trim(std::string_view utf8) {
    return strip_if(utf8, [](char32_t c) { return is_space(c); });
}

std::string collapse_whitespace(std::string_view utf8) {
    std::u32string out;
    bool pending = false;
    for (char32_t c : to_code_points(utf8)) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(U' ');
        pending = false;
        out.push_back(c);
    }
    return to_utf8(out);
}

std::string strip_punct(std::string_view utf8) {
    return strip_if(utf8, [](char32_t c) { return is_space(c) || is_punct(c); });
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
    std::vector<std::string> out;
    std::u32string cur;
    for (char32_t c : to_code_points(utf8)) {
        if (is_space(c)) {
            if (!cur.empty()) out.push_back(to_utf8(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(to_utf8(cur));
    return out;
}

bool iequals(std::string_view a, std::string_view b) { return lowercase(a) == lowercase(b); }

std::string prefix(std::string_view utf8, std::size_t n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < utf8.size(); ++i) {
        if ((static_cast<unsigned char>(utf8[i]) & 0xC0) != 0x80) {
            if (count == n) return std::string(utf8.substr(0, i));
            ++count;
        }
    }
    return std::string(utf8);
}

}  // namespace byline::text
