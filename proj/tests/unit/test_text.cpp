#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "chexfix/text.hpp"

using namespace chexfix;

namespace {

std::vector<std::string> contents(std::string_view text) {
    std::vector<std::string> out;
    for (const Sentence& s : split_sentences(text)) out.emplace_back(s.content.of(text));
    return out;
}

void expect_tiles(std::string_view text) {
    const auto sentences = split_sentences(text);
    std::string joined;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const Sentence& s = sentences[i];
        ASSERT_EQ(s.index, i);
        ASSERT_EQ(s.span.start, pos) << text;
        ASSERT_LE(s.span.start, s.content.start);
        ASSERT_LE(s.content.end, s.span.end);
        joined += s.span.of(text);
        pos = s.span.end;
    }
    ASSERT_EQ(joined, text);
}

}  // namespace

TEST(Keywords, HandLabelledCorpus) {
    // Twenty sentences labelled by hand for the presence of a measurement keyword.
    const std::vector<std::pair<std::string, bool>> corpus = {
        {"tip 4.3 cm above the carina", true},
        {"", false},
        {"the heart is measurably normal", false},
        {"The lesion measured 11 mm.", true},
        {"Nodule measures 1.3 x 1.4 CM.", true},
        {"Tube terminates 5 centimeters above the carina.", true},
        {"Opacity spans several centimeter-scale foci.", true},
        {"A 3 millimeter nodule.", true},
        {"Several millimeters of pleural thickening.", true},
        {"We measure the tube position daily.", true},
        {"No measurement was obtained.", false},
        {"The tube is 4cm above the carina.", true},
        {"Stable cardiomediastinal silhouette.", false},
        {"Endotracheal tube in standard position.", false},
        {"Measures approximately 2 cm.", true},
        {"The acme of the lung is clear.", false},
        {"Immeasurable improvement.", false},
        {"cm", true},
        {"Right PICC terminates in the SVC; mm-wave artifact.", true},
        {"ETT at the level of the clavicles.", false},
    };
    ASSERT_EQ(corpus.size(), 20u);
    for (const auto& [sentence, expected] : corpus) {
        EXPECT_EQ(has_measurement_keywords(sentence), expected) << sentence;
    }
}

TEST(SplitSentences, TrivialSplit) {
    EXPECT_EQ(contents("A. B."), (std::vector<std::string>{"A.", "B."}));
}

TEST(SplitSentences, SpacedDecimalDoesNotSplit) {
    EXPECT_EQ(contents("tube tip measures 2. 0 cm above carina."),
              (std::vector<std::string>{"tube tip measures 2. 0 cm above carina."}));
}

TEST(SplitSentences, AbbreviationsAndLineBreaks) {
    EXPECT_EQ(contents("Discussed with Dr. Smith at 10 am. No change"),
              (std::vector<std::string>{"Discussed with Dr. Smith at 10 am.", "No change"}));
    EXPECT_EQ(contents("FINDINGS:\nETT in place.\n\nIMPRESSION: Stable."),
              (std::vector<std::string>{"FINDINGS:", "ETT in place.", "IMPRESSION: Stable."}));
    EXPECT_EQ(contents("Approx. 4 cm! Really?"), (std::vector<std::string>{"Approx. 4 cm!", "Really?"}));
}

TEST(SplitSentences, DecimalInsideNumberDoesNotSplit) {
    EXPECT_EQ(contents("Tip is 4.3 cm above the carina. Heart normal."),
              (std::vector<std::string>{"Tip is 4.3 cm above the carina.", "Heart normal."}));
}

TEST(SplitSentences, SpansTileTheText) {
    for (std::string_view t : {"", "   ", "A. B.", "  Lead. Trail.  ", "x\n\ny", "No. 5 tube. Ok", "2. 0 cm. 3. Done",
                               "One.Two.Three", "...", "a.\r\nb"}) {
        expect_tiles(t);
    }
    std::mt19937_64 rng(5);
    const std::string alphabet = "ab .\n2 ";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 60);
    for (int i = 0; i < 500; ++i) {
        std::string s;
        for (int k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
        expect_tiles(s);
    }
}

TEST(Words, LowercasesLetterRuns) {
    const auto ws = words("ET-tube, T2 Carina");
    ASSERT_EQ(ws.size(), 4u);
    EXPECT_EQ(ws[0].lower, "et");
    EXPECT_EQ(ws[1].lower, "tube");
    EXPECT_EQ(ws[2].lower, "t");
    EXPECT_EQ(ws[3].lower, "carina");
    EXPECT_EQ(ws[3].span, (Span{12, 18}));
}

TEST(FindPhrase, WholeWordCaseInsensitive) {
    EXPECT_EQ(find_phrase("The ETT tip", "ett"), 4u);
    EXPECT_EQ(find_phrase("settle", "ett"), std::string_view::npos);
    EXPECT_EQ(find_phrase("incorrect position", "correct"), std::string_view::npos);
    EXPECT_EQ(find_phrase("ET tube, ET tube", "et tube", 1), 9u);
}
