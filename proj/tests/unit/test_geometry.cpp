#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "chexfix/errors.hpp"
#include "chexfix/geometry.hpp"

using namespace chexfix;

TEST(PxDistance, CoincidentPointsAreZero) {
    EXPECT_DOUBLE_EQ(px_distance_to_cm(0, 0, {0.5, 0.5}), 0.0);
    EXPECT_DOUBLE_EQ(px_distance_to_cm(0, 0, {0.139, 0.2}), 0.0);
}

TEST(PxDistance, PythagoreanTriple) { EXPECT_DOUBLE_EQ(px_distance_to_cm(30, 40, {0.5, 0.5}), 2.5); }

TEST(PxDistance, AnisotropicSpacingUsesAxisSpacing) {
    EXPECT_DOUBLE_EQ(px_distance_to_cm(10, 0, {1.0, 2.0}), 1.0);
    EXPECT_DOUBLE_EQ(px_distance_to_cm(0, 10, {1.0, 2.0}), 2.0);
}

TEST(PxDistance, SymmetricInSign) {
    const PixelSpacing s{0.3, 0.7};
    const double d = px_distance_to_cm(12.5, -7.25, s);
    EXPECT_EQ(d, px_distance_to_cm(-12.5, 7.25, s));
    EXPECT_EQ(d, px_distance_to_cm(12.5, 7.25, s));
    EXPECT_EQ(d, px_distance_to_cm(-12.5, -7.25, s));
}

TEST(PxDistance, RejectsNonFiniteAndBadSpacing) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(px_distance_to_cm(nan, 0, {1, 1}), InvalidGeometry);
    EXPECT_THROW(px_distance_to_cm(0, inf, {1, 1}), InvalidGeometry);
    EXPECT_THROW(px_distance_to_cm(1, 1, {0, 1}), InvalidGeometry);
    EXPECT_THROW(px_distance_to_cm(1, 1, {1, -1}), InvalidGeometry);
    EXPECT_THROW(px_distance_to_cm(1, 1, {nan, 1}), InvalidGeometry);
}

TEST(CenterDistance, UsesBoxCentres) {
    const BBox ett = BBox::point(100, 200);
    const BBox carina{90, 250, 110, 270};  // centre (100, 260)
    EXPECT_DOUBLE_EQ(center_distance_cm(ett.center(), carina.center(), {0.5, 0.5}), 3.0);
}

TEST(CenterDistance, ExactlySymmetric) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 3000);
    std::uniform_real_distribution<double> sp(0.05, 1.5);
    for (int i = 0; i < 2000; ++i) {
        const Point a{u(rng), u(rng)};
        const Point b{u(rng), u(rng)};
        const PixelSpacing s{sp(rng), sp(rng)};
        ASSERT_EQ(center_distance_cm(a, b, s), center_distance_cm(b, a, s));
        ASSERT_EQ(center_distance_cm(a, a, s), 0.0);
    }
}

TEST(Rescale, IdentityFrame) {
    const BBox b{0, 0, 100, 100};
    EXPECT_EQ(rescale_coords(b, {200, 200}, {200, 200}), b);
}

TEST(Rescale, IndependentAxes) {
    EXPECT_EQ(rescale_coords(BBox::point(10, 10), {100, 100}, {400, 200}), BBox::point(40, 20));
}

TEST(Rescale, PreservesPointness) {
    const BBox p = BBox::point(13.7, 99.1);
    EXPECT_TRUE(rescale_coords(p, {512, 512}, {2048, 1760}).is_point());
}

TEST(Rescale, RoundTripAndComposition) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> dim(1, 4096);
    for (int i = 0; i < 1000; ++i) {
        const ImageSize a{dim(rng), dim(rng)}, b{dim(rng), dim(rng)}, c{dim(rng), dim(rng)};
        const double l = u(rng) * a.width, r = l + u(rng) * (a.width - l);
        const double lo = u(rng) * a.height, up = lo + u(rng) * (a.height - lo);
        const BBox box{l, lo, r, up};
        const BBox back = rescale_coords(rescale_coords(box, a, b), b, a);
        ASSERT_NEAR(back.left, box.left, 1e-9 * a.width);
        ASSERT_NEAR(back.upper, box.upper, 1e-9 * a.height);
        const BBox direct = rescale_coords(box, a, c);
        const BBox via = rescale_coords(rescale_coords(box, a, b), b, c);
        ASSERT_NEAR(direct.left, via.left, 1e-9 * c.width);
        ASSERT_NEAR(direct.right, via.right, 1e-9 * c.width);
        ASSERT_NEAR(direct.lower, via.lower, 1e-9 * c.height);
        ASSERT_NEAR(direct.upper, via.upper, 1e-9 * c.height);
    }
}

TEST(Rescale, RejectsZeroDims) {
    EXPECT_THROW(rescale_coords(BBox{}, {0, 10}, {10, 10}), InvalidGeometry);
    EXPECT_THROW(rescale_coords(BBox{}, {10, 10}, {10, 0}), InvalidGeometry);
}

TEST(Presentation, OneDecimal) {
    EXPECT_EQ(format_cm(4.3), "4.3");
    EXPECT_EQ(format_cm(2.95), "3.0");  // half away from zero, like round_to_tenth
    EXPECT_EQ(format_cm(-0.04), "0.0");
    EXPECT_EQ(format_cm(-1.25), "-1.3");
    EXPECT_DOUBLE_EQ(round_to_tenth(4.349), 4.3);
    EXPECT_DOUBLE_EQ(round_to_tenth(4.35), 4.4);
}
