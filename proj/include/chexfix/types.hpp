#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace chexfix {

struct ImageSize {
    int width = 0;
    int height = 0;

    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Physical size of one pixel, in millimetres, along x and y.
struct PixelSpacing {
    double x_mm = 0.0;
    double y_mm = 0.0;

    friend bool operator==(const PixelSpacing&, const PixelSpacing&) = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box (left, lower, right, upper) in pixel coordinates.
/// A box with left == right and lower == upper is a point.
struct BBox {
    double left = 0.0;
    double lower = 0.0;
    double right = 0.0;
    double upper = 0.0;

    static BBox point(double x, double y) { return {x, y, x, y}; }

    bool is_point() const noexcept { return left == right && lower == upper; }
    Point center() const noexcept { return {(left + right) / 2.0, (lower + upper) / 2.0}; }
    double width() const noexcept { return right - left; }
    double height() const noexcept { return upper - lower; }
    double area() const noexcept { return width() * height(); }

    /// Closed containment test.
    bool contains(Point p) const noexcept {
        return p.x >= left && p.x <= right && p.y >= lower && p.y <= upper;
    }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// One detection in original-image pixel space.
struct CxrObject {
    std::string object_name;
    BBox bbox;
    double confidence = 1.0;

    friend bool operator==(const CxrObject&, const CxrObject&) = default;
};

/// Checks the box ordering, bounds against `size`, and confidence range.
/// Throws InvalidGeometry.
void validate_object(const CxrObject& object, ImageSize size);

enum class Placement { Correct, TooLow, TooHigh, IncorrectUnspecified };

constexpr bool is_correct(Placement p) noexcept { return p == Placement::Correct; }

std::string_view to_string(Placement p) noexcept;
std::optional<Placement> placement_from_string(std::string_view s) noexcept;

struct StudyRecord {
    std::string study_id;
    std::string image_ref;
    ImageSize original_size;
    PixelSpacing pixel_spacing;
    std::string ground_truth_report;
    std::map<std::string, std::string> model_reports;
    // Image dimensions each report-generation model consumed, when known.
    std::map<std::string, ImageSize> model_image_sizes;

    /// Throws InvalidGeometry or IngestError when an invariant is broken.
    void validate() const;
};

}  // namespace chexfix
