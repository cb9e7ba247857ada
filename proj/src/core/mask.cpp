#include "chexfix/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chexfix/errors.hpp"

namespace chexfix {

namespace {

std::uint64_t pixel_count(ImageSize size) {
    return static_cast<std::uint64_t>(size.width) * static_cast<std::uint64_t>(size.height);
}

void check_size(ImageSize size) {
    if (size.width < 1 || size.height < 1) throw InvalidGeometry("mask size must be >= 1");
}

}  // namespace

RleMask::RleMask(ImageSize size) : size_(size), counts_{}, starts_with_(0) {
    check_size(size);
    counts_.push_back(static_cast<std::uint32_t>(pixel_count(size)));
    build_offsets();
}

RleMask::RleMask(ImageSize size, std::vector<std::uint32_t> counts, int starts_with) : size_(size) {
    check_size(size);
    if (starts_with != 0 && starts_with != 1) throw InvalidGeometry("starts_with must be 0 or 1");
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total != pixel_count(size)) {
        throw InvalidGeometry("run lengths sum to " + std::to_string(total) + ", expected " +
                              std::to_string(pixel_count(size)));
    }
    // Canonicalise: drop empty runs, merging their neighbours.
    int value = starts_with;
    int last_value = -1;
    std::vector<std::uint32_t> canon;
    for (std::uint32_t c : counts) {
        if (c != 0) {
            if (value == last_value) {
                canon.back() += c;
            } else {
                if (canon.empty()) starts_with_ = value;
                canon.push_back(c);
                last_value = value;
            }
        }
        value = 1 - value;
    }
    counts_ = std::move(canon);
    build_offsets();
}

RleMask RleMask::encode(ImageSize size, std::span<const std::uint8_t> pixels) {
    check_size(size);
    if (pixels.size() != pixel_count(size)) throw InvalidGeometry("pixel buffer does not match size");
    std::vector<std::uint32_t> counts;
    const int first = pixels.front() ? 1 : 0;
    int current = first;
    std::uint32_t run = 0;
    for (std::uint8_t p : pixels) {
        const int v = p ? 1 : 0;
        if (v != current) {
            counts.push_back(run);
            run = 0;
            current = v;
        }
        ++run;
    }
    counts.push_back(run);
    return RleMask(size, std::move(counts), first);
}

RleMask RleMask::from_zero_first(ImageSize size, std::span<const std::uint32_t> counts) {
    return RleMask(size, std::vector<std::uint32_t>(counts.begin(), counts.end()), 0);
}

std::vector<std::uint32_t> RleMask::to_zero_first() const {
    std::vector<std::uint32_t> out;
    if (starts_with_ == 1) out.push_back(0);
    out.insert(out.end(), counts_.begin(), counts_.end());
    return out;
}

void RleMask::build_offsets() {
    offsets_.clear();
    offsets_.reserve(counts_.size());
    std::uint64_t acc = 0;
    for (std::uint32_t c : counts_) {
        offsets_.push_back(acc);
        acc += c;
    }
}

std::vector<std::uint8_t> RleMask::decode() const {
    std::vector<std::uint8_t> pixels;
    pixels.reserve(pixel_count(size_));
    std::uint8_t v = static_cast<std::uint8_t>(starts_with_);
    for (std::uint32_t c : counts_) {
        pixels.insert(pixels.end(), c, v);
        v = static_cast<std::uint8_t>(1 - v);
    }
    return pixels;
}

bool RleMask::at(int x, int y) const {
    if (x < 0 || y < 0 || x >= size_.width || y >= size_.height) return false;
    const std::uint64_t idx = static_cast<std::uint64_t>(y) * size_.width + x;
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), idx);
    const auto run = static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
    return (run % 2 == 0) ? starts_with_ == 1 : starts_with_ == 0;
}

std::size_t RleMask::area() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        const bool set = (i % 2 == 0) ? starts_with_ == 1 : starts_with_ == 0;
        if (set) total += counts_[i];
    }
    return total;
}

int RleMask::pixel_width() const {
    const auto px = decode();
    int best = 0;
    for (int y = 0; y < size_.height; ++y) {
        int first = -1, last = -1;
        for (int x = 0; x < size_.width; ++x) {
            if (px[static_cast<std::size_t>(y) * size_.width + x]) {
                if (first < 0) first = x;
                last = x;
            }
        }
        if (first >= 0) best = std::max(best, last - first + 1);
    }
    return best;
}

int RleMask::pixel_height() const {
    const auto px = decode();
    int best = 0;
    for (int x = 0; x < size_.width; ++x) {
        int first = -1, last = -1;
        for (int y = 0; y < size_.height; ++y) {
            if (px[static_cast<std::size_t>(y) * size_.width + x]) {
                if (first < 0) first = y;
                last = y;
            }
        }
        if (first >= 0) best = std::max(best, last - first + 1);
    }
    return best;
}

std::optional<BBox> RleMask::bounding_box() const {
    const auto px = decode();
    int min_x = size_.width, min_y = size_.height, max_x = -1, max_y = -1;
    for (int y = 0; y < size_.height; ++y) {
        for (int x = 0; x < size_.width; ++x) {
            if (px[static_cast<std::size_t>(y) * size_.width + x]) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
        }
    }
    if (max_x < 0) return std::nullopt;
    return BBox{static_cast<double>(min_x), static_cast<double>(min_y), static_cast<double>(max_x + 1),
                static_cast<double>(max_y + 1)};
}

RleMask RleMask::resample(ImageSize to) const {
    check_size(to);
    if (to == size_) return *this;
    const auto src = decode();
    std::vector<std::uint8_t> dst(pixel_count(to));
    for (int y = 0; y < to.height; ++y) {
        const int sy = std::min(size_.height - 1,
                                static_cast<int>((static_cast<double>(y) + 0.5) * size_.height / to.height));
        for (int x = 0; x < to.width; ++x) {
            const int sx = std::min(size_.width - 1,
                                    static_cast<int>((static_cast<double>(x) + 0.5) * size_.width / to.width));
            dst[static_cast<std::size_t>(y) * to.width + x] = src[static_cast<std::size_t>(sy) * size_.width + sx];
        }
    }
    return encode(to, dst);
}

bool CxrSegmentation::contains(Point p) const {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    const ImageSize s = mask.size();
    // A center on the far image edge belongs to the last pixel.
    int x = static_cast<int>(std::floor(p.x));
    int y = static_cast<int>(std::floor(p.y));
    if (p.x == s.width) x = s.width - 1;
    if (p.y == s.height) y = s.height - 1;
    return mask.at(x, y);
}

}  // namespace chexfix
