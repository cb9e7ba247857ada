#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chexfix/fixture_backend.hpp"
#include "chexfix/lexicon.hpp"
#include "chexfix/plan.hpp"
#include "chexfix/text.hpp"

namespace chexfix {

struct Guidelines {
    // Tip-to-carina distances inside this closed interval are correct.
    double ett_correct_min_cm = 3.0;
    double ett_correct_max_cm = 7.0;
    // Documentation: the ideal position is 5 +/- 2 cm above the carina.
    double ett_ideal_cm = 5.0;
    double ett_ideal_tolerance_cm = 2.0;

    /// Throws ConfigError unless 0 < min < max.
    void validate() const;
};

/// Closed interval [min, max] is Correct, below is TooLow, above TooHigh.
/// The value is signed: tips below the carina are negative. Throws
/// InvalidGeometry on a non-finite distance.
Placement classify_placement(double distance_cm, const Guidelines& g = {});

enum class EditKind { Replace, RemoveSentence, AppendClause, NoOp };

std::string_view to_string(EditKind k) noexcept;

struct Edit {
    EditKind kind = EditKind::NoOp;
    std::size_t sentence_index = 0;
    Span span;           // range of the original text that `before` occupies
    std::string before;
    std::string after;
    std::string reason;
    std::vector<std::size_t> results;  // indices into UpdatedReport::results_used
};

struct UpdatedReport {
    std::string text;
    std::vector<Edit> edits;
    std::vector<MeasurementResult> results_used;
};

struct UpdateOptions {
    // Accept measurements for objects the report never mentions by adding a
    // sentence for them (ETT only) instead of raising ConsistencyError.
    bool allow_unmentioned = false;
};

/// Fixed sentence used when a tube measurement has to be written out.
std::string ett_template(double distance_cm, bool below, Placement verdict);
inline constexpr std::string_view kRepositionSentence = "Repositioning is recommended.";

/// Applies measurement results to a report: values are replaced in place,
/// hallucinated objects are removed, and the tube placement statement is
/// brought in line with the measured distance. Sentences that mention no
/// queried object are left byte-identical. Every result is referenced by at
/// least one edit, possibly a NoOp record.
UpdatedReport update_report(std::string_view report, const std::vector<MeasurementResult>& results,
                            const Guidelines& g, const CategoryLexicon& lexicon, const UpdateOptions& options = {});
UpdatedReport update_report(std::string_view report, const std::vector<MeasurementResult>& results,
                            const Guidelines& g = {});

/// Replays non-NoOp edits on the original text. Throws ConsistencyError when
/// edits overlap or do not match the text.
std::string apply_edits(std::string_view original, const std::vector<Edit>& edits);

/// Writes the annotated tube-to-carina distance into a ground-truth report
/// that mentions the tube without a value. Reports without a tube mention, or
/// already carrying a value, come back unchanged. Throws AnnotationError when
/// the annotation lacks the tube or the carina.
UpdatedReport inject_ground_truth(std::string_view gt_report, const FixtureAnnotation& annotation,
                                  const StudyRecord& study, const Guidelines& g = {});

}  // namespace chexfix
