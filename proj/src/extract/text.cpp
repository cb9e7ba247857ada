#include "chexfix/text.hpp"

#include <algorithm>
#include <array>

namespace chexfix {

namespace {

constexpr std::array<std::string_view, 8> kMeasurementKeywords = {
    "cm", "mm", "centimeter", "centimeters", "millimeter", "millimeters", "measure", "measures"};

constexpr std::array<std::string_view, 9> kAbbreviations = {"dr", "approx", "vs", "e.g", "i.e",
                                                            "mr", "mrs", "no", "st"};

char lower_char(char c) noexcept { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Word immediately before position `pos` (which holds a '.').
std::string word_before(std::string_view text, std::size_t pos) {
    std::size_t start = pos;
    while (start > 0 && (is_alpha(text[start - 1]) || text[start - 1] == '.')) --start;
    return to_lower(text.substr(start, pos - start));
}

bool is_abbreviation(std::string_view text, std::size_t period) {
    const std::string w = word_before(text, period);
    if (w.empty()) return false;
    // "No." only abbreviates when a number follows ("No. 3").
    if (w == "no") {
        std::size_t j = period + 1;
        while (j < text.size() && text[j] == ' ') ++j;
        return j < text.size() && is_digit(text[j]);
    }
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end();
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = lower_char(c);
    return out;
}

std::vector<Sentence> split_sentences(std::string_view text) {
    std::vector<Sentence> out;
    const std::size_t n = text.size();
    std::size_t start = 0;

    auto emit = [&](std::size_t content_end, std::size_t span_end) {
        std::size_t cs = start;
        while (cs < content_end && is_space(text[cs])) ++cs;
        if (cs == content_end && !out.empty()) {
            // Whitespace-only tail: fold into the previous sentence.
            out.back().span.end = span_end;
        } else {
            out.push_back(Sentence{out.size(), {start, span_end}, {cs, content_end}});
        }
        start = span_end;
    };

    std::size_t i = 0;
    while (i < n) {
        const char c = text[i];
        bool boundary = false;
        std::size_t content_end = i;
        if (c == '.' || c == '!' || c == '?') {
            // Absorb runs like "?!" or "...".
            std::size_t j = i;
            while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
            content_end = j;
            const bool at_end = j == n;
            const bool ws_follows = !at_end && is_space(text[j]);
            if (at_end) {
                boundary = true;
            } else if (ws_follows) {
                boundary = true;
                if (c == '.' && j == i + 1) {
                    std::size_t k = j;
                    while (k < n && (text[k] == ' ' || text[k] == '\t')) ++k;
                    const bool spaced_decimal = i > 0 && is_digit(text[i - 1]) && k < n && is_digit(text[k]);
                    if (spaced_decimal || is_abbreviation(text, i)) boundary = false;
                }
            }
            if (!boundary) {
                i = j;
                continue;
            }
        } else if (c == '\n') {
            // A line break ends a sentence only when the line has content.
            std::size_t k = start;
            while (k < i && is_space(text[k])) ++k;
            boundary = k < i;
            content_end = i;
            if (!boundary) {
                ++i;
                continue;
            }
        } else {
            ++i;
            continue;
        }
        std::size_t span_end = content_end;
        while (span_end < n && is_space(text[span_end])) ++span_end;
        // Trim trailing blanks of the content (newline case).
        std::size_t ce = content_end;
        while (ce > start && is_space(text[ce - 1])) --ce;
        emit(ce, span_end);
        i = span_end;
    }
    if (start < n) {
        std::size_t ce = n;
        while (ce > start && is_space(text[ce - 1])) --ce;
        emit(ce, n);
    }
    return out;
}

std::vector<Word> words(std::string_view text) {
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alpha(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_alpha(text[j])) ++j;
        out.push_back(Word{to_lower(text.substr(i, j - i)), {i, j}});
        i = j;
    }
    return out;
}

bool has_measurement_keywords(std::string_view report) {
    for (const Word& w : words(report)) {
        if (std::find(kMeasurementKeywords.begin(), kMeasurementKeywords.end(), w.lower) !=
            kMeasurementKeywords.end()) {
            return true;
        }
    }
    return false;
}

bool has_measurement_keywords(std::string_view report, const std::vector<std::string>& keywords) {
    for (const Word& w : words(report)) {
        for (const std::string& k : keywords) {
            if (w.lower == to_lower(k)) return true;
        }
    }
    return false;
}

std::vector<std::string> default_measurement_keywords() {
    return {kMeasurementKeywords.begin(), kMeasurementKeywords.end()};
}

std::size_t find_phrase(std::string_view haystack, std::string_view needle, std::size_t from) {
    if (needle.empty() || needle.size() > haystack.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
        if (i > 0 && is_alpha(haystack[i - 1])) continue;
        bool match = true;
        for (std::size_t k = 0; k < needle.size(); ++k) {
            if (lower_char(haystack[i + k]) != lower_char(needle[k])) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        const std::size_t after = i + needle.size();
        if (after < haystack.size() && is_alpha(haystack[after])) continue;
        return i;
    }
    return std::string_view::npos;
}

}  // namespace chexfix
