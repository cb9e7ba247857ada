#include <random>

#include <gtest/gtest.h>

#include "chexfix/errors.hpp"
#include "chexfix/extractor.hpp"
#include "chexfix/updater.hpp"
#include "synthetic.hpp"

using namespace chexfix;
using chexfix::testing::ett_result;

namespace {

MeasurementResult measured(double cm) { return ett_result(outcome::Scalar{cm}); }
MeasurementResult tube_missing() { return ett_result(outcome::NotPresent{std::string(kEndotrachealTube)}); }

bool every_result_referenced(const UpdatedReport& u) {
    std::vector<bool> seen(u.results_used.size(), false);
    for (const Edit& e : u.edits) {
        for (std::size_t r : e.results) seen.at(r) = true;
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace

TEST(ClassifyPlacement, Boundaries) {
    EXPECT_EQ(classify_placement(2.999), Placement::TooLow);
    EXPECT_EQ(classify_placement(3.0), Placement::Correct);
    EXPECT_EQ(classify_placement(5.0), Placement::Correct);
    EXPECT_EQ(classify_placement(7.0), Placement::Correct);
    EXPECT_EQ(classify_placement(7.001), Placement::TooHigh);
    EXPECT_EQ(classify_placement(1.5), Placement::TooLow);
    EXPECT_EQ(classify_placement(-1.0), Placement::TooLow);
    EXPECT_THROW(classify_placement(std::nan("")), InvalidGeometry);
}

TEST(Guidelines, Validation) {
    Guidelines g;
    EXPECT_NO_THROW(g.validate());
    g.ett_correct_max_cm = 2.0;
    EXPECT_THROW(g.validate(), ConfigError);
    EXPECT_EQ(classify_placement(2.5, Guidelines{2.0, 4.0}), Placement::Correct);
}

TEST(UpdateReport, ReplacesWrongValueAndStatesPlacement) {
    const UpdatedReport u = update_report("Lungs are clear. ETT terminates 2.0 cm above the carina.", {measured(4.3)});
    EXPECT_EQ(u.text, "Lungs are clear. ETT terminates 4.3 cm above the carina; position is correct.");
    EXPECT_TRUE(every_result_referenced(u));
    EXPECT_EQ(apply_edits("Lungs are clear. ETT terminates 2.0 cm above the carina.", u.edits), u.text);
}

TEST(UpdateReport, RemovesHallucinatedTube) {
    const UpdatedReport u = update_report("Lungs are clear. ETT terminates 4.5 cm above the carina.", {tube_missing()});
    EXPECT_EQ(u.text, "Lungs are clear.");
    ASSERT_FALSE(u.edits.empty());
    EXPECT_EQ(u.edits.front().kind, EditKind::RemoveSentence);
}

TEST(UpdateReport, RemovesFollowUpOfHallucinatedTube) {
    const UpdatedReport u = update_report(
        "ETT terminates 1.0 cm above the carina. Repositioning is recommended. No pneumothorax.", {tube_missing()});
    EXPECT_EQ(u.text, "No pneumothorax.");
}

TEST(UpdateReport, FailedMeasurementKeepsOriginal) {
    const std::string report = "ETT terminates 2.0 cm above the carina.";
    const UpdatedReport u = update_report(report, {ett_result(outcome::Failed{"tool offline"})});
    EXPECT_EQ(u.text, report);
    ASSERT_EQ(u.edits.size(), 1u);
    EXPECT_EQ(u.edits[0].kind, EditKind::NoOp);
    EXPECT_TRUE(every_result_referenced(u));
}

TEST(UpdateReport, MissingReferenceIsNoOp) {
    const std::string report = "ETT terminates 2.0 cm above the carina.";
    const UpdatedReport u = update_report(report, {ett_result(outcome::NotPresent{"carina"})});
    EXPECT_EQ(u.text, report);
}

TEST(UpdateReport, AddsMissingValueNextToUnmeasuredMention) {
    const UpdatedReport u = update_report("ET tube in place. Heart size is normal.", {measured(4.04)});
    EXPECT_EQ(u.text,
              "ET tube in place. The endotracheal tube tip is 4.0 cm above the carina; position is correct. "
              "Heart size is normal.");
}

TEST(UpdateReport, ContradictedPlacementIsRestated) {
    const UpdatedReport u = update_report("ET tube in place. Heart size is normal.", {measured(1.5)});
    EXPECT_EQ(u.text,
              "The endotracheal tube tip is 1.5 cm above the carina; position is too low. "
              "Repositioning is recommended. Heart size is normal.");

    const UpdatedReport v =
        update_report("The ETT is 5.0 cm above the carina, in standard position.", {measured(8.2)});
    EXPECT_EQ(v.text,
              "The endotracheal tube tip is 8.2 cm above the carina; position is too high. "
              "Repositioning is recommended.");
}

TEST(UpdateReport, DropsFollowUpWhenPlacementBecomesCorrect) {
    const UpdatedReport u = update_report(
        "ETT 1.0 cm above the carina. Repositioning is recommended. No pneumothorax.", {measured(5.0)});
    EXPECT_EQ(u.text, "ETT 5.0 cm above the carina; position is correct. No pneumothorax.");
}

TEST(UpdateReport, BelowCarinaStaysBelow) {
    const UpdatedReport u = update_report("ETT terminates 1.0 cm below the carina.", {measured(2.0)});
    EXPECT_EQ(u.text, "ETT terminates 2.0 cm below the carina; position is too low. Repositioning is recommended.");
}

TEST(UpdateReport, UnmentionedTube) {
    EXPECT_THROW(update_report("Lungs are clear.", {measured(5.0)}), ConsistencyError);
    UpdateOptions options;
    options.allow_unmentioned = true;
    const UpdatedReport u =
        update_report("Lungs are clear.", {measured(5.0)}, Guidelines{}, CategoryLexicon::defaults(), options);
    EXPECT_EQ(u.text, "Lungs are clear. The endotracheal tube tip is 5.0 cm above the carina; position is correct.");
    const UpdatedReport gone = update_report("Lungs are clear.", {tube_missing()});
    EXPECT_EQ(gone.text, "Lungs are clear.");
    EXPECT_TRUE(every_result_referenced(gone));
}

TEST(UpdateReport, CorrectReportIsUntouched) {
    const std::string report = "The endotracheal tube tip is 4.0 cm above the carina; position is correct.";
    const UpdatedReport u = update_report(report, {measured(4.0)});
    EXPECT_EQ(u.text, report);
    for (const Edit& e : u.edits) EXPECT_EQ(e.kind, EditKind::NoOp);
}

TEST(ApplyEdits, RejectsOverlapAndMismatch) {
    Edit a{EditKind::Replace, 0, {0, 5}, "Lungs", "Heart", "", {}};
    Edit b{EditKind::Replace, 0, {3, 8}, "gs ar", "x", "", {}};
    EXPECT_THROW(apply_edits("Lungs are clear.", {a, b}), ConsistencyError);
    Edit wrong{EditKind::Replace, 0, {0, 5}, "Heart", "x", "", {}};
    EXPECT_THROW(apply_edits("Lungs are clear.", {wrong}), ConsistencyError);
    EXPECT_EQ(apply_edits("Lungs are clear.", {a}), "Heart are clear.");
}

TEST(InjectGroundTruth, WritesAnnotatedDistance) {
    FixtureAnnotation ann;
    ann.study_id = "s1";
    ann.entries["endotracheal tube"].objects = {{"endotracheal tube", BBox::point(100, 200), 1.0}};
    ann.entries["carina"].objects = {{"carina", BBox::point(100, 260), 1.0}};
    StudyRecord s;
    s.study_id = "s1";
    s.original_size = {400, 400};
    s.pixel_spacing = {0.5, 0.5};
    s.ground_truth_report = "ET tube in place.";

    const UpdatedReport u = inject_ground_truth(s.ground_truth_report, ann, s);
    EXPECT_EQ(u.text, "ET tube in place. The endotracheal tube tip is 3.0 cm above the carina; position is correct.");
    EXPECT_EQ(extract_ett(u.text).measurement_cm, std::optional<double>(3.0));

    EXPECT_EQ(inject_ground_truth("ETT 4.0 cm above the carina.", ann, s).text, "ETT 4.0 cm above the carina.");
    EXPECT_EQ(inject_ground_truth("Lungs are clear.", ann, s).text, "Lungs are clear.");

    ann.entries.erase("carina");
    EXPECT_THROW(inject_ground_truth("ET tube in place.", ann, s), AnnotationError);
}

TEST(UpdaterProperties, RandomTemplatedReports) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 500; ++i) {
        const auto report = chexfix::testing::templated_report(rng);
        const auto result = chexfix::testing::random_ett_result(rng, report);
        const auto violation = chexfix::testing::updater_property_violation(report, result);
        ASSERT_FALSE(violation.has_value()) << *violation;
    }
}
