#include "chexfix/types.hpp"

#include <cmath>

#include "chexfix/errors.hpp"

namespace chexfix {

void validate_object(const CxrObject& object, ImageSize size) {
    const BBox& b = object.bbox;
    for (double v : {b.left, b.lower, b.right, b.upper}) {
        if (!std::isfinite(v)) {
            throw InvalidGeometry(object.object_name + ": non-finite coordinate");
        }
    }
    if (b.left > b.right || b.lower > b.upper) {
        throw InvalidGeometry(object.object_name + ": box edges out of order");
    }
    if (b.left < 0 || b.lower < 0 || b.right > size.width || b.upper > size.height) {
        throw InvalidGeometry(object.object_name + ": box outside the image");
    }
    if (!(object.confidence >= 0.0 && object.confidence <= 1.0)) {
        throw InvalidGeometry(object.object_name + ": confidence outside [0,1]");
    }
}

std::string_view to_string(Placement p) noexcept {
    switch (p) {
        case Placement::Correct: return "correct";
        case Placement::TooLow: return "too low";
        case Placement::TooHigh: return "too high";
        case Placement::IncorrectUnspecified: return "incorrect";
    }
    return "incorrect";
}

std::optional<Placement> placement_from_string(std::string_view s) noexcept {
    if (s == "correct") return Placement::Correct;
    if (s == "too low") return Placement::TooLow;
    if (s == "too high") return Placement::TooHigh;
    if (s == "incorrect") return Placement::IncorrectUnspecified;
    return std::nullopt;
}

void StudyRecord::validate() const {
    if (study_id.empty()) throw IngestError("empty study_id");
    if (original_size.width < 1 || original_size.height < 1) {
        throw InvalidGeometry(study_id + ": original_size must be >= 1 in both axes");
    }
    if (!(pixel_spacing.x_mm > 0.0) || !(pixel_spacing.y_mm > 0.0) ||
        !std::isfinite(pixel_spacing.x_mm) || !std::isfinite(pixel_spacing.y_mm)) {
        throw InvalidGeometry(study_id + ": pixel spacing must be positive");
    }
    if (ground_truth_report.empty()) throw IngestError(study_id + ": empty ground-truth report");
    for (const auto& [model, size] : model_image_sizes) {
        if (size.width < 1 || size.height < 1) {
            throw InvalidGeometry(study_id + ": bad image size for model " + model);
        }
    }
}

}  // namespace chexfix
