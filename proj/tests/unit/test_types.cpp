#include <limits>

#include <gtest/gtest.h>

#include "chexfix/errors.hpp"
#include "chexfix/types.hpp"

using namespace chexfix;

TEST(BBox, PointIffDegenerate) {
    EXPECT_TRUE(BBox::point(3, 4).is_point());
    EXPECT_FALSE((BBox{3, 4, 3, 5}).is_point());
    EXPECT_FALSE((BBox{3, 4, 4, 4}).is_point());
    EXPECT_EQ(BBox::point(3, 4).center(), (Point{3, 4}));
    EXPECT_DOUBLE_EQ((BBox{0, 0, 40, 20}).area(), 800.0);
}

TEST(ValidateObject, AcceptsBoxesOnTheImageEdge) {
    EXPECT_NO_THROW(validate_object({"carina", {0, 0, 100, 50}, 1.0}, {100, 50}));
    EXPECT_NO_THROW(validate_object({"carina", BBox::point(100, 50), 0.0}, {100, 50}));
}

TEST(ValidateObject, RejectsBrokenInvariants) {
    const ImageSize size{100, 100};
    EXPECT_THROW(validate_object({"x", {10, 0, 5, 5}, 1.0}, size), InvalidGeometry);
    EXPECT_THROW(validate_object({"x", {0, 10, 5, 5}, 1.0}, size), InvalidGeometry);
    EXPECT_THROW(validate_object({"x", {-1, 0, 5, 5}, 1.0}, size), InvalidGeometry);
    EXPECT_THROW(validate_object({"x", {0, 0, 101, 5}, 1.0}, size), InvalidGeometry);
    EXPECT_THROW(validate_object({"x", {0, 0, 5, 5}, 1.5}, size), InvalidGeometry);
    EXPECT_THROW(validate_object({"x", {0, 0, 5, 5}, -0.1}, size), InvalidGeometry);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate_object({"x", {0, 0, nan, 5}, 1.0}, size), InvalidGeometry);
    EXPECT_THROW(validate_object({"x", {0, 0, 5, 5}, nan}, size), InvalidGeometry);
}

TEST(Placement, BinarisationPartitions) {
    int correct = 0, incorrect = 0;
    for (Placement p : {Placement::Correct, Placement::TooLow, Placement::TooHigh, Placement::IncorrectUnspecified}) {
        (is_correct(p) ? correct : incorrect) += 1;
        EXPECT_EQ(placement_from_string(to_string(p)), p);
    }
    EXPECT_EQ(correct, 1);
    EXPECT_EQ(incorrect, 3);
    EXPECT_FALSE(placement_from_string("sideways").has_value());
}

TEST(StudyRecord, Invariants) {
    StudyRecord s;
    s.study_id = "s1";
    s.original_size = {2048, 2048};
    s.pixel_spacing = {0.139, 0.139};
    s.ground_truth_report = "ETT in place.";
    EXPECT_NO_THROW(s.validate());

    StudyRecord bad = s;
    bad.original_size = {0, 10};
    EXPECT_THROW(bad.validate(), InvalidGeometry);
    bad = s;
    bad.pixel_spacing = {0.0, 0.1};
    EXPECT_THROW(bad.validate(), InvalidGeometry);
    bad = s;
    bad.ground_truth_report.clear();
    EXPECT_THROW(bad.validate(), IngestError);
    bad = s;
    bad.model_image_sizes["m"] = {0, 512};
    EXPECT_THROW(bad.validate(), InvalidGeometry);
}
