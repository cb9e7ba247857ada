#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace chexfix {

/// Half-open byte range [start, end) into a report.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    std::string_view of(std::string_view text) const { return text.substr(start, end - start); }

    friend bool operator==(const Span&, const Span&) = default;
};

struct Sentence {
    std::size_t index = 0;
    // Covers the sentence plus the whitespace that follows it; consecutive
    // spans tile the whole report.
    Span span;
    // The sentence without surrounding whitespace.
    Span content;
};

/// Splits on '.', '!', '?' and line breaks. A period between two digits
/// separated only by blanks ("2. 0 cm") and periods after common
/// abbreviations do not end a sentence.
std::vector<Sentence> split_sentences(std::string_view text);

struct Word {
    std::string lower;
    Span span;
};

/// Maximal runs of ASCII letters, lower-cased.
std::vector<Word> words(std::string_view text);

/// True when the report contains one of the measurement keywords
/// (cm, mm, centimeter(s), millimeter(s), measure(s)) as a whole token.
bool has_measurement_keywords(std::string_view report);
/// Same test against a configured keyword list.
bool has_measurement_keywords(std::string_view report, const std::vector<std::string>& keywords);
std::vector<std::string> default_measurement_keywords();

std::string to_lower(std::string_view s);

inline bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
inline bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

/// Case-insensitive search for `needle` delimited by non-letters on both
/// sides. Returns std::string_view::npos when absent.
std::size_t find_phrase(std::string_view haystack, std::string_view needle, std::size_t from = 0);

}  // namespace chexfix
