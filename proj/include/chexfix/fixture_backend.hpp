#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chexfix/backend.hpp"

namespace chexfix {

struct FixtureEntry {
    std::vector<CxrObject> objects;
    std::optional<RleMask> mask;
};

/// Annotations for one study, keyed by lower-case object name.
struct FixtureAnnotation {
    std::string study_id;
    std::map<std::string, FixtureEntry> entries;

    const FixtureEntry* entry(std::string_view object_name) const;
};

/// Line-delimited fixture records:
///
///   study_id<TAB>object_name<TAB>l,lo,r,u<TAB>confidence
///   study_id<TAB>object_name<TAB>MASK<TAB>w,h<TAB>rle...
///
/// Mask run lengths are whitespace or comma separated and start with the
/// run of zeros (which may be 0). Blank lines and '#' comments are ignored.
class FixtureSet {
public:
    /// Throws IngestError carrying the line number of the first bad record.
    static FixtureSet parse(std::istream& in);
    static FixtureSet load(const std::filesystem::path& path);

    void add_object(const std::string& study_id, CxrObject object);
    void add_mask(const std::string& study_id, const std::string& object_name, RleMask mask);

    const FixtureAnnotation* study(std::string_view study_id) const;
    const std::map<std::string, FixtureAnnotation, std::less<>>& studies() const noexcept { return studies_; }

    /// Writes the records back in the same format, sorted by study and object.
    void write(std::ostream& out) const;

private:
    std::map<std::string, FixtureAnnotation, std::less<>> studies_;
};

/// Answers from an immutable FixtureSet. Objects without boxes fall back to
/// their mask's bounding box; boxes are rasterised when a mask is requested.
class FixtureBackend final : public ToolBackend {
public:
    explicit FixtureBackend(std::shared_ptr<const FixtureSet> fixtures, std::string name = "fixtures");

    std::string name() const override { return name_; }
    ExistsAnswer exists(const ImageContext& image, std::string_view object_name) const override;
    std::vector<CxrObject> find(const ImageContext& image, std::string_view object_name) const override;
    CxrSegmentation segment(const ImageContext& image, std::string_view object_name) const override;

private:
    std::shared_ptr<const FixtureSet> fixtures_;
    std::string name_;
};

std::shared_ptr<const ToolBackend> fixture_backend(const std::filesystem::path& path);

/// Pixels covered by the box; a point covers the pixel it falls in.
RleMask rasterize(const BBox& box, ImageSize size);

}  // namespace chexfix
