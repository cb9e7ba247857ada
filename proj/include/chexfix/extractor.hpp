#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chexfix/lexicon.hpp"
#include "chexfix/text.hpp"
#include "chexfix/types.hpp"

namespace chexfix {

/// A concrete measurement phrase such as "less than 2 cm", "3-4 cm" or
/// "1.3 x 1.4 cm", with its values normalised to centimetres.
struct MeasurementMention {
    Span span;                     // from any qualifier through the last unit
    std::vector<double> values_cm; // one value, or (major, minor) for dimensions
    bool below = false;            // the phrase is followed by "below"
};

/// Finds measurement phrases in `text`. Spans are relative to `text`.
std::vector<MeasurementMention> find_measurements(std::string_view text);

/// Normalises one measurement phrase to cm: spaced decimals are repaired,
/// ranges take the upper bound, "less than x" is x, and mm is divided by 10.
/// Dimension phrases yield the major axis. Throws ExtractionError.
double normalize_value(std::string_view phrase);

enum class Polarity { Present, Absent };

struct MeasuredFinding {
    std::string object_name;
    Category category = Category::Other;
    std::vector<double> values_cm;  // empty for a mention without a measurement
    std::size_t sentence_index = 0;
    Span char_span;                 // measurement phrase, or the object phrase when unmeasured
    Span object_span;
    Polarity polarity = Polarity::Present;
    std::optional<std::string> region;     // e.g. "right central"
    std::optional<std::string> reference;  // landmark the value is measured from
    bool below = false;
    // Sentence names more than one lexicon object; attachment was by proximity.
    bool multi_object = false;
};

struct EttObservation {
    bool present = false;
    std::optional<double> measurement_cm;  // positive above the carina
    std::optional<Placement> placement;

    friend bool operator==(const EttObservation&, const EttObservation&) = default;
};

/// Per-sentence view used by the extractor and the report updater.
struct SentenceAnalysis {
    Sentence sentence;
    std::vector<LexiconMatch> objects;          // absolute spans
    std::vector<MeasurementMention> measurements;  // absolute spans
    std::vector<bool> object_negated;           // parallel to objects
    std::optional<Placement> stated_placement;
    bool mentions_extubation = false;

    bool mentions(Category c) const;
    bool mentions_positive(Category c) const;
    bool mentions_negated(Category c) const;
};

struct ReportAnalysis {
    std::string_view text;
    std::vector<SentenceAnalysis> sentences;
};

ReportAnalysis analyze_report(std::string_view report, const CategoryLexicon& lexicon);

/// Placement vocabulary in one piece of text; the most specific verdict wins.
std::optional<Placement> stated_placement(std::string_view text);

/// One finding per object carrying a concrete cm/mm value in its sentence.
std::vector<MeasuredFinding> extract_measured_findings(std::string_view report,
                                                       const CategoryLexicon& lexicon);

/// Measured findings plus an unmeasured ETT finding when the report mentions
/// a present ETT without a value, so the tube still gets measured.
std::vector<MeasuredFinding> extract_query_findings(std::string_view report,
                                                    const CategoryLexicon& lexicon);

EttObservation extract_ett(std::string_view report, const CategoryLexicon& lexicon);
EttObservation extract_ett(std::string_view report);

}  // namespace chexfix
