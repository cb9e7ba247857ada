#include "chexfix/geometry.hpp"

#include <cmath>
#include <cstdio>

#include "chexfix/errors.hpp"

namespace chexfix {

double px_distance_to_cm(double dx_px, double dy_px, PixelSpacing spacing) {
    if (!std::isfinite(dx_px) || !std::isfinite(dy_px) || !std::isfinite(spacing.x_mm) ||
        !std::isfinite(spacing.y_mm)) {
        throw InvalidGeometry("non-finite displacement or spacing");
    }
    if (!(spacing.x_mm > 0.0) || !(spacing.y_mm > 0.0)) {
        throw InvalidGeometry("pixel spacing must be positive");
    }
    return std::hypot(dx_px * spacing.x_mm, dy_px * spacing.y_mm) / 10.0;
}

double center_distance_cm(Point a, Point b, PixelSpacing spacing) {
    // |dx| keeps the result independent of argument order bit for bit.
    return px_distance_to_cm(std::fabs(a.x - b.x), std::fabs(a.y - b.y), spacing);
}

BBox rescale_coords(const BBox& box, ImageSize from, ImageSize to) {
    if (from.width < 1 || from.height < 1 || to.width < 1 || to.height < 1) {
        throw InvalidGeometry("image dimensions must be >= 1");
    }
    const auto sx = [&](double v) { return v * to.width / from.width; };
    const auto sy = [&](double v) { return v * to.height / from.height; };
    return {sx(box.left), sy(box.lower), sx(box.right), sy(box.upper)};
}

double round_to_tenth(double cm) { return std::round(cm * 10.0) / 10.0; }

std::string format_cm(double cm) {
    char buf[32];
    double r = round_to_tenth(cm);
    if (r == 0.0) r = 0.0;  // no "-0.0"
    std::snprintf(buf, sizeof buf, "%.1f", r);
    return buf;
}

}  // namespace chexfix
