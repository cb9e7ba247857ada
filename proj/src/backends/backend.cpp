#include "chexfix/backend.hpp"

#include <algorithm>

#include "chexfix/errors.hpp"
#include "chexfix/text.hpp"

namespace chexfix {

CheckedBackend::CheckedBackend(std::shared_ptr<const ToolBackend> inner, double min_confidence)
    : inner_(std::move(inner)), min_confidence_(min_confidence) {
    if (!inner_) throw ConfigError("CheckedBackend needs a backend");
    if (!(min_confidence_ >= 0.0 && min_confidence_ <= 1.0)) {
        throw ConfigError("minimum confidence must lie in [0,1]");
    }
}

std::vector<CxrObject> CheckedBackend::find(const ImageContext& image, std::string_view object_name) const {
    std::vector<CxrObject> raw = inner_->find(image, object_name);
    std::vector<CxrObject> out;
    out.reserve(raw.size());
    for (CxrObject& o : raw) {
        try {
            validate_object(o, image.original_size);
        } catch (const InvalidGeometry& e) {
            throw ProtocolViolation(inner_->name() + ": " + e.what());
        }
        if (o.confidence < min_confidence_) continue;
        out.push_back(std::move(o));
    }
    return out;
}

ExistsAnswer CheckedBackend::exists(const ImageContext& image, std::string_view object_name) const {
    const auto found = find(image, object_name);
    ExistsAnswer a;
    a.exists = !found.empty();
    for (const CxrObject& o : found) a.confidence = std::max(a.confidence, o.confidence);
    return a;
}

CxrSegmentation CheckedBackend::segment(const ImageContext& image, std::string_view object_name) const {
    CxrSegmentation seg = inner_->segment(image, object_name);
    if (seg.mask.size() != image.original_size) seg.mask = seg.mask.resample(image.original_size);
    return seg;
}

RoutingTable RoutingTable::standard(std::string keypoint_id, std::string anatomy_id, std::string fallback) {
    RoutingTable t;
    t.patterns = {{"carina", keypoint_id}, {"endotracheal tube", keypoint_id}};
    for (const char* region : {"left clavicle", "right clavicle", "left scapula", "right scapula", "left lung",
                               "right lung", "left hilus pulmonis", "right hilus pulmonis", "heart", "aorta",
                               "facies diaphragmatica", "mediastinum", "weasand", "spine"}) {
        t.patterns.emplace_back(region, anatomy_id);
    }
    t.default_backend = std::move(fallback);
    return t;
}

std::string route(const RoutingTable& table, std::string_view object_name) {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& entry : table.patterns) {
        if (find_phrase(object_name, entry.first) == std::string_view::npos) continue;
        if (best == nullptr || entry.first.size() > best->first.size()) best = &entry;
    }
    return best ? best->second : table.default_backend;
}

RoutedBackend::RoutedBackend(RoutingTable table, std::map<std::string, std::shared_ptr<const ToolBackend>> backends)
    : table_(std::move(table)), backends_(std::move(backends)) {
    const auto check = [&](const std::string& id) {
        const auto it = backends_.find(id);
        if (it == backends_.end() || !it->second) throw ConfigError("routing names unknown backend '" + id + "'");
    };
    for (const auto& [pattern, id] : table_.patterns) check(id);
    check(table_.default_backend);
}

const ToolBackend& RoutedBackend::backend_for(std::string_view object_name) const {
    return *backends_.at(route(table_, object_name));
}

ExistsAnswer RoutedBackend::exists(const ImageContext& image, std::string_view object_name) const {
    return backend_for(object_name).exists(image, object_name);
}

std::vector<CxrObject> RoutedBackend::find(const ImageContext& image, std::string_view object_name) const {
    return backend_for(object_name).find(image, object_name);
}

CxrSegmentation RoutedBackend::segment(const ImageContext& image, std::string_view object_name) const {
    return backend_for(object_name).segment(image, object_name);
}

}  // namespace chexfix
