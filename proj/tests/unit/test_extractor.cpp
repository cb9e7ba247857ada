#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "chexfix/errors.hpp"
#include "chexfix/extractor.hpp"
#include "chexfix/geometry.hpp"

using namespace chexfix;

namespace {

const CategoryLexicon& lexicon() {
    static const CategoryLexicon lex = CategoryLexicon::defaults();
    return lex;
}

std::vector<MeasuredFinding> findings(std::string_view report) { return extract_measured_findings(report, lexicon()); }

}  // namespace

TEST(NormalizeValue, PromptRules) {
    EXPECT_DOUBLE_EQ(normalize_value("less than 2 cm"), 2.0);
    EXPECT_DOUBLE_EQ(normalize_value("3-4 cm"), 4.0);
    EXPECT_DOUBLE_EQ(normalize_value("3 to 4 cm"), 4.0);
    EXPECT_DOUBLE_EQ(normalize_value("3\xE2\x80\x93" "4 cm"), 4.0);
    EXPECT_DOUBLE_EQ(normalize_value("11 mm"), 1.1);
    EXPECT_DOUBLE_EQ(normalize_value("2. 0 cm"), 2.0);
    EXPECT_DOUBLE_EQ(normalize_value("under 5 centimeters"), 5.0);
    EXPECT_DOUBLE_EQ(normalize_value("<3 cm"), 3.0);
    EXPECT_DOUBLE_EQ(normalize_value("1.3 x 1.4 cm"), 1.4);
    EXPECT_DOUBLE_EQ(normalize_value(".5 cm"), 0.5);
}

TEST(NormalizeValue, UnparseableThrows) {
    EXPECT_THROW(normalize_value("several cm"), ExtractionError);
    EXPECT_THROW(normalize_value("4"), ExtractionError);
    EXPECT_THROW(normalize_value(""), ExtractionError);
}

TEST(NormalizeValue, IdempotentOnNormalisedInput) {
    for (const char* phrase : {"less than 2 cm", "3-4 cm", "11 mm", "2. 0 cm", "7.25 cm", "1.3 x 1.4 cm"}) {
        const double once = normalize_value(phrase);
        EXPECT_DOUBLE_EQ(normalize_value(format_cm(once) + " cm"), round_to_tenth(once)) << phrase;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g cm", once);
        EXPECT_DOUBLE_EQ(normalize_value(buf), once) << phrase;
    }
}

TEST(FindMeasurements, DimensionsAndDirection) {
    const auto ms = find_measurements("nodule 1.3 x 1.4 cm; tube 2 cm below the carina, mass 3 by 2 mm");
    ASSERT_EQ(ms.size(), 3u);
    EXPECT_EQ(ms[0].values_cm, (std::vector<double>{1.4, 1.3}));
    EXPECT_FALSE(ms[0].below);
    EXPECT_EQ(ms[1].values_cm, (std::vector<double>{2.0}));
    EXPECT_TRUE(ms[1].below);
    EXPECT_EQ(ms[2].values_cm, (std::vector<double>{0.3, 0.2}));
}

TEST(FindMeasurements, SkipsLevelsAndBareNumbers) {
    EXPECT_TRUE(find_measurements("projects into the T2 region at 5 o'clock").empty());
    EXPECT_TRUE(find_measurements("compared with 2 prior studies").empty());
}

TEST(ExtractMeasuredFindings, TracheostomyWorkedExample) {
    const auto fs = findings(
        "The tracheostomy tube ends 3.5 cm from the carina. There is a small apical right "
        "pneumothorax. Heart size is normal-the endotracheal tube projects into the T2 region.");
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].object_name, "tracheostomy tube");
    EXPECT_EQ(fs[0].category, Category::OtherTubeCatheter);
    EXPECT_EQ(fs[0].values_cm, (std::vector<double>{3.5}));
    EXPECT_EQ(fs[0].reference, std::optional<std::string>("carina"));
}

TEST(ExtractMeasuredFindings, NoduleAndTubeWorkedExample) {
    const std::string report =
        "Ill-defined nodule in the right upper lung measuring 1.3 x 1.4 cm. The endotracheal tube "
        "tip now measures approximately 4.6 cm above the carina-the tip of the right internal "
        "jugular vein catheter projects over the cavoatrial junction.";
    const auto fs = findings(report);
    ASSERT_EQ(fs.size(), 2u);
    EXPECT_EQ(fs[0].object_name, "nodule");
    EXPECT_EQ(fs[0].category, Category::Lesion);
    EXPECT_EQ(fs[0].values_cm, (std::vector<double>{1.4, 1.3}));
    EXPECT_EQ(fs[0].region, std::optional<std::string>("right upper lung"));
    EXPECT_EQ(fs[1].object_name, "endotracheal tube");
    EXPECT_EQ(fs[1].values_cm, (std::vector<double>{4.6}));
    EXPECT_EQ(fs[1].sentence_index, 1u);
    EXPECT_TRUE(fs[1].multi_object);
    EXPECT_EQ(fs[1].char_span.of(report), "4.6 cm");
}

TEST(ExtractMeasuredFindings, TableOneSentences) {
    {
        const auto fs = findings("Endotracheal tube tip measures approximately 4.3 cm above the carina.");
        ASSERT_EQ(fs.size(), 1u);
        EXPECT_EQ(fs[0].object_name, "endotracheal tube");
        EXPECT_DOUBLE_EQ(fs[0].values_cm.at(0), 4.3);
    }
    {
        const auto fs = findings("The lesion is larger since the prior examination where it measured 11 mm.");
        ASSERT_EQ(fs.size(), 1u);
        EXPECT_EQ(fs[0].object_name, "lesion");
        EXPECT_DOUBLE_EQ(fs[0].values_cm.at(0), 1.1);
    }
    {
        const auto fs = findings(
            "A right PICC has its tip terminating in the proximal right atrium, which should be retracted 2 cm.");
        ASSERT_EQ(fs.size(), 1u);
        EXPECT_EQ(fs[0].object_name, "picc");
        EXPECT_DOUBLE_EQ(fs[0].values_cm.at(0), 2.0);
    }
    {
        const auto fs = findings("Moderate right apical pneumothorax measuring 2.3 cm at the apex.");
        ASSERT_EQ(fs.size(), 1u);
        EXPECT_EQ(fs[0].category, Category::Pneumothorax);
        EXPECT_EQ(fs[0].region, std::optional<std::string>("right apical"));
        EXPECT_DOUBLE_EQ(fs[0].values_cm.at(0), 2.3);
    }
    {
        const auto fs = findings("The balloon pump lies 2.3 cm from the apex of the aortic arch.");
        ASSERT_EQ(fs.size(), 1u);
        EXPECT_EQ(fs[0].category, Category::Other);
        EXPECT_DOUBLE_EQ(fs[0].values_cm.at(0), 2.3);
    }
}

TEST(ExtractMeasuredFindings, NegationAndQualitative) {
    EXPECT_TRUE(findings("No pneumothorax.").empty());
    EXPECT_TRUE(findings("Endotracheal tube in incorrect position, projects into the stomach.").empty());
    const auto fs = findings("No residual pneumothorax, previously 2 cm.");
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].polarity, Polarity::Absent);
}

TEST(ExtractMeasuredFindings, FirstMeasurementPerObjectWins) {
    const auto fs = findings("The ETT tip is 4 cm above the carina, previously 6 cm.");
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_DOUBLE_EQ(fs[0].values_cm.at(0), 4.0);
}

TEST(ExtractMeasuredFindings, NumericTokenAndKeywordGate) {
    const std::vector<std::string> reports = {
        "ETT 5 cm above carina. Nodule 3 mm.", "No ETT.", "Opacity 2 x 3 cm in the left lower lobe.",
        "Catheter tip in SVC.", "ETT in standard position. Heart normal.", "Mass measures 14 millimeters."};
    for (const auto& r : reports) {
        const auto fs = findings(r);
        if (!fs.empty()) {
            EXPECT_TRUE(has_measurement_keywords(r)) << r;
        }
        for (const auto& f : fs) {
            const auto sentences = split_sentences(r);
            const std::string_view s = sentences.at(f.sentence_index).content.of(r);
            EXPECT_NE(s.find_first_of("0123456789"), std::string_view::npos) << r;
            EXPECT_GE(f.char_span.start, sentences[f.sentence_index].content.start);
            EXPECT_LE(f.char_span.end, sentences[f.sentence_index].content.end);
        }
    }
}

TEST(ExtractEtt, TableOne) {
    const EttObservation o = extract_ett("Endotracheal tube tip measures approximately 4.3 cm above the carina.");
    EXPECT_TRUE(o.present);
    EXPECT_EQ(o.measurement_cm, std::optional<double>(4.3));
    EXPECT_FALSE(o.placement.has_value());
}

TEST(ExtractEtt, ExtubationAndRemoval) {
    EXPECT_FALSE(extract_ett("The patient has been extubated.").present);
    EXPECT_FALSE(extract_ett("Interval removal of the endotracheal tube.").present);
    EXPECT_FALSE(extract_ett("ET tube has been removed. Lungs clear.").present);
    EXPECT_FALSE(extract_ett("No endotracheal tube.").present);
    EXPECT_FALSE(extract_ett("ETT 4 cm above the carina. Patient extubated later.").present);
    EXPECT_EQ(extract_ett("Lungs are clear."), EttObservation{});
}

TEST(ExtractEtt, StableAndUnchangedMeanCorrect) {
    const EttObservation o = extract_ett("ET tube in standard position, unchanged.");
    EXPECT_TRUE(o.present);
    EXPECT_FALSE(o.measurement_cm.has_value());
    EXPECT_EQ(o.placement, Placement::Correct);
    EXPECT_EQ(extract_ett("Endotracheal tube is stable.").placement, Placement::Correct);
    EXPECT_EQ(extract_ett("No change in the ETT.").present, true);
}

TEST(ExtractEtt, DirectionAndPlacementVocabulary) {
    EXPECT_EQ(extract_ett("ETT tip 1 cm below the carina.").measurement_cm, std::optional<double>(-1.0));
    EXPECT_EQ(extract_ett("ETT tip 2 cm from the carina.").measurement_cm, std::optional<double>(2.0));
    EXPECT_EQ(extract_ett("The ETT is low-lying, 1.5 cm above the carina.").placement, Placement::TooLow);
    EXPECT_EQ(extract_ett("ETT should be advanced 2 cm.").placement, Placement::TooHigh);
    EXPECT_EQ(extract_ett("ETT malpositioned.").placement, Placement::IncorrectUnspecified);
    EXPECT_EQ(extract_ett("ETT in right mainstem bronchus. ETT appropriately positioned.").placement,
              Placement::TooLow);
}

TEST(ExtractEtt, NoValueFromLandmarks) {
    const EttObservation o = extract_ett("The endotracheal tube terminates at the level of the clavicles.");
    EXPECT_TRUE(o.present);
    EXPECT_FALSE(o.measurement_cm.has_value());
}

TEST(ExtractEtt, RoundTripAgainstTemplatedGenerator) {
    // Renders known observations with a fixed template set and recovers them.
    const std::vector<std::string> subjects = {"Endotracheal tube", "ET tube", "ETT", "The endotracheal tube tip"};
    const std::vector<std::string> verbs = {"terminates", "is", "measures approximately", "lies"};
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> tenths(-20, 120);
    std::uniform_int_distribution<int> coin(0, 3);
    for (int i = 0; i < 500; ++i) {
        EttObservation truth;
        truth.present = true;
        std::string report = "Heart size is normal. ";
        const std::string subject = subjects[coin(rng)];
        const int kind = coin(rng);
        if (kind != 3) {
            const double v = tenths(rng) / 10.0;
            truth.measurement_cm = v;
            report += subject + " " + verbs[coin(rng)] + " " + format_cm(std::fabs(v)) + " cm " +
                      (v < 0 ? "below" : "above") + " the carina.";
        } else {
            report += subject + " in place.";
            truth.placement = Placement::Correct;
        }
        if (kind == 1) {
            const Placement p = coin(rng) % 2 ? Placement::TooLow : Placement::TooHigh;
            truth.placement = p;
            report += std::string(" ") + subject + " is " + std::string(to_string(p)) + ".";
        }
        report += " No pneumothorax.";
        ASSERT_EQ(extract_ett(report), truth) << report;
    }
}
