#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chexfix/types.hpp"

namespace chexfix {

/// Run-length encoded binary mask over row-major pixel order.
///
/// `counts` alternate between runs of `starts_with` and its complement, so
/// the first run holds pixels equal to `starts_with`. Runs are never zero
/// except for an empty mask (no pixels at all). The sum of counts always
/// equals width * height.
class RleMask {
public:
    RleMask() = default;

    /// All-zero mask of the given size.
    explicit RleMask(ImageSize size);

    /// Validates the counts against the size. Throws InvalidGeometry.
    RleMask(ImageSize size, std::vector<std::uint32_t> counts, int starts_with);

    static RleMask encode(ImageSize size, std::span<const std::uint8_t> pixels);

    /// Fixture convention: first count is the run of zeros (may be 0).
    static RleMask from_zero_first(ImageSize size, std::span<const std::uint32_t> counts);
    std::vector<std::uint32_t> to_zero_first() const;

    std::vector<std::uint8_t> decode() const;

    ImageSize size() const noexcept { return size_; }
    const std::vector<std::uint32_t>& counts() const noexcept { return counts_; }
    int starts_with() const noexcept { return starts_with_; }

    bool at(int x, int y) const;
    std::size_t area() const;
    bool empty() const { return area() == 0; }

    /// Widest horizontal extent (in pixels) over all rows; 0 for an empty mask.
    int pixel_width() const;
    /// Tallest vertical extent (in pixels) over all columns; 0 for an empty mask.
    int pixel_height() const;
    /// Tight bounding box of the set pixels, pixel edges inclusive-exclusive.
    std::optional<BBox> bounding_box() const;

    /// Nearest-neighbour resample into a new frame.
    RleMask resample(ImageSize to) const;

    friend bool operator==(const RleMask&, const RleMask&) = default;

private:
    ImageSize size_{};
    std::vector<std::uint32_t> counts_;
    int starts_with_ = 0;
    // Run start offsets, for O(log n) lookups.
    std::vector<std::uint64_t> offsets_;

    void build_offsets();
};

struct CxrSegmentation {
    std::string object_name;
    RleMask mask;

    /// Whether the pixel under `p` is inside the region.
    bool contains(Point p) const;

    friend bool operator==(const CxrSegmentation&, const CxrSegmentation&) = default;
};

}  // namespace chexfix
