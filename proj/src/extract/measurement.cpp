#include <algorithm>
#include <array>
#include <cstdlib>
#include <optional>
#include <string>

#include "chexfix/errors.hpp"
#include "chexfix/extractor.hpp"

namespace chexfix {

namespace {

struct Number {
    std::size_t start;
    std::size_t end;
    double value;
};

struct Unit {
    std::size_t end;
    double per_cm;  // unit count per centimetre
};

constexpr std::string_view kEnDash = "\xE2\x80\x93";
constexpr std::string_view kTimes = "\xC3\x97";

std::size_t skip_blanks(std::string_view t, std::size_t i) {
    while (i < t.size() && (t[i] == ' ' || t[i] == '\t')) ++i;
    return i;
}

bool starts_number(std::string_view t, std::size_t i) {
    if (i >= t.size()) return false;
    if (is_digit(t[i])) return true;
    return t[i] == '.' && i + 1 < t.size() && is_digit(t[i + 1]);
}

// Digits with an optional decimal part; "2. 0" reads as 2.0.
std::optional<Number> parse_number(std::string_view t, std::size_t i) {
    if (!starts_number(t, i)) return std::nullopt;
    std::string digits;
    std::size_t j = i;
    while (j < t.size() && is_digit(t[j])) digits += t[j++];
    if (j < t.size() && t[j] == '.') {
        std::size_t k = j + 1;
        if (k < t.size() && t[k] == ' ' && k + 1 < t.size() && is_digit(t[k + 1]) && !digits.empty()) ++k;
        if (k < t.size() && is_digit(t[k])) {
            digits += '.';
            while (k < t.size() && is_digit(t[k])) digits += t[k++];
            j = k;
        }
    }
    if (digits.empty()) return std::nullopt;
    if (digits.front() == '.') digits.insert(digits.begin(), '0');
    return Number{i, j, std::strtod(digits.c_str(), nullptr)};
}

std::optional<Unit> parse_unit(std::string_view t, std::size_t i) {
    static constexpr std::array<std::pair<std::string_view, double>, 10> kUnits = {{
        {"centimeters", 1.0}, {"centimetres", 1.0}, {"centimeter", 1.0}, {"centimetre", 1.0}, {"cm", 1.0},
        {"millimeters", 10.0}, {"millimetres", 10.0}, {"millimeter", 10.0}, {"millimetre", 10.0}, {"mm", 10.0},
    }};
    i = skip_blanks(t, i);
    for (const auto& [name, factor] : kUnits) {
        if (i + name.size() > t.size()) continue;
        if (to_lower(t.substr(i, name.size())) != name) continue;
        const std::size_t end = i + name.size();
        if (end < t.size() && is_alpha(t[end])) continue;
        return Unit{end, factor};
    }
    return std::nullopt;
}

bool word_at(std::string_view t, std::size_t i, std::string_view w) {
    if (i + w.size() > t.size()) return false;
    if (to_lower(t.substr(i, w.size())) != w) return false;
    return i + w.size() == t.size() || !is_alpha(t[i + w.size()]);
}

// Position after a range connector ("-", en dash, "to"), if any.
std::optional<std::size_t> range_connector(std::string_view t, std::size_t i) {
    i = skip_blanks(t, i);
    if (i < t.size() && t[i] == '-') return i + 1;
    if (t.substr(i, kEnDash.size()) == kEnDash) return i + kEnDash.size();
    if (word_at(t, i, "to")) return i + 2;
    return std::nullopt;
}

// Position after a dimension connector ("x", multiplication sign, "by").
std::optional<std::size_t> dims_connector(std::string_view t, std::size_t i) {
    i = skip_blanks(t, i);
    if (i < t.size() && (t[i] == 'x' || t[i] == 'X') && (i + 1 == t.size() || !is_alpha(t[i + 1]))) {
        return i + 1;
    }
    if (t.substr(i, kTimes.size()) == kTimes) return i + kTimes.size();
    if (word_at(t, i, "by")) return i + 2;
    return std::nullopt;
}

// Number, optionally followed by a range upper bound. Returns the value the
// phrase stands for (the upper bound of a range) and the end position.
std::optional<Number> parse_ranged(std::string_view t, std::size_t i) {
    auto first = parse_number(t, i);
    if (!first) return std::nullopt;
    if (auto after = range_connector(t, first->end)) {
        if (auto second = parse_number(t, skip_blanks(t, *after))) {
            return Number{first->start, second->end, second->value};
        }
    }
    return first;
}

// Start of a "less than" style qualifier that ends right before `i`.
std::size_t qualifier_start(std::string_view t, std::size_t i) {
    std::size_t j = i;
    while (j > 0 && (t[j - 1] == ' ' || t[j - 1] == '\t')) --j;
    if (j > 0 && t[j - 1] == '<') return j - 1;
    for (std::string_view q : {std::string_view("less than"), std::string_view("under")}) {
        if (j >= q.size() && to_lower(t.substr(j - q.size(), q.size())) == q &&
            (j == q.size() || !is_alpha(t[j - q.size() - 1]))) {
            return j - q.size();
        }
    }
    return i;
}

}  // namespace

std::vector<MeasurementMention> find_measurements(std::string_view t) {
    std::vector<MeasurementMention> out;
    std::size_t i = 0;
    while (i < t.size()) {
        if (!starts_number(t, i)) {
            ++i;
            continue;
        }
        // Digits glued to letters ("T2", "C7") are labels, not quantities.
        if (i > 0 && (is_alpha(t[i - 1]) || is_digit(t[i - 1]))) {
            while (i < t.size() && (is_digit(t[i]) || t[i] == '.')) ++i;
            continue;
        }
        const auto a = parse_ranged(t, i);
        if (!a) {
            ++i;
            continue;
        }
        std::size_t pos = a->end;
        const auto unit_a = parse_unit(t, pos);
        if (unit_a) pos = unit_a->end;

        std::optional<Number> b;
        std::optional<Unit> unit_b;
        if (auto after = dims_connector(t, pos)) {
            b = parse_ranged(t, skip_blanks(t, *after));
            if (b) {
                unit_b = parse_unit(t, b->end);
                if (!unit_b && !unit_a) b.reset();
            }
        }
        if (!unit_a && !unit_b) {
            i = a->end;
            continue;
        }

        MeasurementMention m;
        m.span.start = qualifier_start(t, a->start);
        if (b) {
            const double da = unit_a ? unit_a->per_cm : unit_b->per_cm;
            const double db = unit_b ? unit_b->per_cm : unit_a->per_cm;
            const double va = a->value / da;
            const double vb = b->value / db;
            m.values_cm = {std::max(va, vb), std::min(va, vb)};
            m.span.end = unit_b ? unit_b->end : b->end;
        } else {
            m.values_cm = {a->value / unit_a->per_cm};
            m.span.end = unit_a->end;
        }
        out.push_back(std::move(m));
        i = out.back().span.end;
    }

    // Direction: the first "above"/"below" between a phrase and the next one.
    for (std::size_t k = 0; k < out.size(); ++k) {
        const std::size_t from = out[k].span.end;
        const std::size_t to = k + 1 < out.size() ? out[k + 1].span.start : t.size();
        const std::string_view window = t.substr(from, to - from);
        const std::size_t above = find_phrase(window, "above");
        const std::size_t below = find_phrase(window, "below");
        out[k].below = below != std::string_view::npos && (above == std::string_view::npos || below < above);
    }
    return out;
}

double normalize_value(std::string_view phrase) {
    const auto found = find_measurements(phrase);
    if (found.empty()) {
        throw ExtractionError("no measurement in '" + std::string(phrase) + "'");
    }
    return found.front().values_cm.front();
}

}  // namespace chexfix
