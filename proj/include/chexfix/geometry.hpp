#pragma once

#include <string>

#include "chexfix/types.hpp"

namespace chexfix {

/// Physical length in centimetres of a pixel displacement (dx, dy).
/// Throws InvalidGeometry on non-finite input or non-positive spacing.
double px_distance_to_cm(double dx_px, double dy_px, PixelSpacing spacing);

/// Distance in cm between two points given in the same pixel frame.
double center_distance_cm(Point a, Point b, PixelSpacing spacing);

/// Maps a box from one image frame to another by independent axis scaling.
/// Throws InvalidGeometry when any dimension is < 1.
BBox rescale_coords(const BBox& box, ImageSize from, ImageSize to);

/// Presentation form of a distance: one decimal, e.g. "4.3".
std::string format_cm(double cm);

/// Rounds to one decimal, the precision reports carry.
double round_to_tenth(double cm);

}  // namespace chexfix
