#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chexfix/mask.hpp"
#include "chexfix/types.hpp"

namespace chexfix {

/// The image a tool call refers to.
struct ImageContext {
    std::string image_id;
    ImageSize original_size;

    static ImageContext of(const StudyRecord& study) { return {study.study_id, study.original_size}; }
};

struct ExistsAnswer {
    bool exists = false;
    double confidence = 0.0;

    friend bool operator==(const ExistsAnswer&, const ExistsAnswer&) = default;
};

/// A detection provider. Implementations must be safe to call concurrently.
class ToolBackend {
public:
    virtual ~ToolBackend() = default;

    virtual std::string name() const = 0;
    virtual ExistsAnswer exists(const ImageContext& image, std::string_view object_name) const = 0;
    virtual std::vector<CxrObject> find(const ImageContext& image, std::string_view object_name) const = 0;
    virtual CxrSegmentation segment(const ImageContext& image, std::string_view object_name) const = 0;

    /// Name of the tool that answers for `object_name`, for provenance.
    virtual std::string tool_for(std::string_view) const { return name(); }
};

/// Adapter every backend goes through before the executor sees it: it
/// validates geometry in the original frame, applies the confidence floor,
/// brings masks into the original frame, and derives exists() from find()
/// so the two always agree.
class CheckedBackend final : public ToolBackend {
public:
    explicit CheckedBackend(std::shared_ptr<const ToolBackend> inner, double min_confidence = 0.0);

    std::string name() const override { return inner_->name(); }
    ExistsAnswer exists(const ImageContext& image, std::string_view object_name) const override;
    std::vector<CxrObject> find(const ImageContext& image, std::string_view object_name) const override;
    CxrSegmentation segment(const ImageContext& image, std::string_view object_name) const override;
    std::string tool_for(std::string_view object_name) const override { return inner_->tool_for(object_name); }

private:
    std::shared_ptr<const ToolBackend> inner_;
    double min_confidence_;
};

/// Object-name pattern to backend id. The longest matching pattern wins.
struct RoutingTable {
    std::vector<std::pair<std::string, std::string>> patterns;
    std::string default_backend;

    /// Keypoint model for the carina and tube, anatomy segmenter for the
    /// fourteen segmented regions, everything else to `fallback`.
    static RoutingTable standard(std::string keypoint_id = "carinanet", std::string anatomy_id = "anatomy",
                                 std::string fallback = "fixtures");
};

std::string route(const RoutingTable& table, std::string_view object_name);

class RoutedBackend final : public ToolBackend {
public:
    /// Throws ConfigError when a pattern or the default names an unknown backend.
    RoutedBackend(RoutingTable table, std::map<std::string, std::shared_ptr<const ToolBackend>> backends);

    std::string name() const override { return "routed"; }
    ExistsAnswer exists(const ImageContext& image, std::string_view object_name) const override;
    std::vector<CxrObject> find(const ImageContext& image, std::string_view object_name) const override;
    CxrSegmentation segment(const ImageContext& image, std::string_view object_name) const override;
    std::string tool_for(std::string_view object_name) const override {
        return backend_for(object_name).tool_for(object_name);
    }

    const ToolBackend& backend_for(std::string_view object_name) const;

private:
    RoutingTable table_;
    std::map<std::string, std::shared_ptr<const ToolBackend>> backends_;
};

}  // namespace chexfix
