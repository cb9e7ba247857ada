#include "chexfix/http_backend.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "chexfix/errors.hpp"
#include "chexfix/geometry.hpp"

namespace chexfix {

using nlohmann::json;

namespace {

ImageSize parse_size(const json& body, const std::string& who) {
    const auto it = body.find("image_size");
    if (it == body.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer()) {
        throw ProtocolViolation(who + ": image_size must be [w,h]");
    }
    const ImageSize size{(*it)[0].get<int>(), (*it)[1].get<int>()};
    if (size.width < 1 || size.height < 1) throw ProtocolViolation(who + ": image_size must be positive");
    return size;
}

double parse_number(const json& v, const std::string& who, const char* what) {
    if (!v.is_number()) throw ProtocolViolation(who + ": " + what + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ProtocolViolation(who + ": " + what + " must be finite");
    return d;
}

double parse_confidence(const json& v, const std::string& who) {
    const double c = parse_number(v, who, "confidence");
    if (c < 0.0 || c > 1.0) throw ProtocolViolation(who + ": confidence outside [0,1]");
    return c;
}

}  // namespace

void HttpBackend::Slots::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
}

void HttpBackend::Slots::release() {
    {
        std::lock_guard lock(mutex_);
        ++free_;
    }
    cv_.notify_one();
}

HttpBackend::HttpBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    if (endpoint_.base_url.empty()) throw ConfigError("http backend needs a base url");
    if (endpoint_.max_in_flight < 1) throw ConfigError("http backend needs at least one in-flight request");
    scheme_host_port_ = endpoint_.base_url;
    while (!scheme_host_port_.empty() && scheme_host_port_.back() == '/') scheme_host_port_.pop_back();
    slots_ = std::make_unique<Slots>(endpoint_.max_in_flight);
}

std::string HttpBackend::post(const std::string& path, const ImageContext& image,
                              std::string_view object_name) const {
    const json request = {{"image_id", image.image_id}, {"object_name", std::string(object_name)}};
    const std::string who = endpoint_.name + " " + path;

    slots_->acquire();
    httplib::Result res;
    try {
        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(endpoint_.timeout);
        client.set_read_timeout(endpoint_.timeout);
        client.set_write_timeout(endpoint_.timeout);
        res = client.Post(path, request.dump(), "application/json");
    } catch (...) {
        slots_->release();
        throw;
    }
    slots_->release();

    if (!res) throw BackendUnavailable(who + ": " + httplib::to_string(res.error()));
    if (res->status >= 500 || res->status == 404 || res->status == 408 || res->status == 429) {
        std::string detail = res->body;
        try {
            detail = json::parse(res->body).at("error").at("message").get<std::string>();
        } catch (const std::exception&) {
        }
        throw BackendUnavailable(who + ": HTTP " + std::to_string(res->status) + " " + detail);
    }
    if (res->status != 200) {
        throw ProtocolViolation(who + ": HTTP " + std::to_string(res->status) + " " + res->body);
    }
    return res->body;
}

ExistsAnswer HttpBackend::exists(const ImageContext& image, std::string_view object_name) const {
    const std::string who = endpoint_.name + " /v1/exists";
    json body;
    try {
        body = json::parse(post("/v1/exists", image, object_name));
    } catch (const json::exception& e) {
        throw ProtocolViolation(who + ": " + e.what());
    }
    if (!body.is_object() || !body.contains("exists") || !body["exists"].is_boolean() || !body.contains("confidence")) {
        throw ProtocolViolation(who + ": expected {exists, confidence}");
    }
    return {body["exists"].get<bool>(), parse_confidence(body["confidence"], who)};
}

std::vector<CxrObject> HttpBackend::find(const ImageContext& image, std::string_view object_name) const {
    const std::string who = endpoint_.name + " /v1/find";
    json body;
    try {
        body = json::parse(post("/v1/find", image, object_name));
    } catch (const json::exception& e) {
        throw ProtocolViolation(who + ": " + e.what());
    }
    if (!body.is_object()) throw ProtocolViolation(who + ": expected an object");
    const ImageSize frame = parse_size(body, who);
    const auto dets = body.find("detections");
    if (dets == body.end() || !dets->is_array()) throw ProtocolViolation(who + ": detections must be an array");

    std::vector<CxrObject> out;
    out.reserve(dets->size());
    for (const json& d : *dets) {
        if (!d.is_object() || !d.contains("bbox") || !d["bbox"].is_array() || d["bbox"].size() != 4 ||
            !d.contains("confidence")) {
            throw ProtocolViolation(who + ": detection must be {bbox:[l,lo,r,u], confidence}");
        }
        const json& b = d["bbox"];
        const BBox box{parse_number(b[0], who, "bbox"), parse_number(b[1], who, "bbox"),
                       parse_number(b[2], who, "bbox"), parse_number(b[3], who, "bbox")};
        if (box.left > box.right || box.lower > box.upper) throw ProtocolViolation(who + ": bbox edges out of order");
        CxrObject o;
        o.object_name = std::string(object_name);
        o.bbox = frame == image.original_size ? box : rescale_coords(box, frame, image.original_size);
        o.confidence = parse_confidence(d["confidence"], who);
        out.push_back(std::move(o));
    }
    return out;
}

CxrSegmentation HttpBackend::segment(const ImageContext& image, std::string_view object_name) const {
    const std::string who = endpoint_.name + " /v1/segment";
    json body;
    try {
        body = json::parse(post("/v1/segment", image, object_name));
    } catch (const json::exception& e) {
        throw ProtocolViolation(who + ": " + e.what());
    }
    if (!body.is_object()) throw ProtocolViolation(who + ": expected an object");
    const ImageSize frame = parse_size(body, who);
    const auto rle = body.find("rle");
    const auto starts = body.find("starts_with");
    if (rle == body.end() || !rle->is_array()) throw ProtocolViolation(who + ": rle must be an array");
    if (starts == body.end() || !starts->is_number_integer() || (*starts != 0 && *starts != 1)) {
        throw ProtocolViolation(who + ": starts_with must be 0 or 1");
    }
    std::vector<std::uint32_t> counts;
    counts.reserve(rle->size());
    for (const json& c : *rle) {
        if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0)) {
            throw ProtocolViolation(who + ": rle counts must be non-negative integers");
        }
        counts.push_back(c.get<std::uint32_t>());
    }
    try {
        RleMask mask(frame, std::move(counts), starts->get<int>());
        if (frame != image.original_size) mask = mask.resample(image.original_size);
        return {std::string(object_name), std::move(mask)};
    } catch (const InvalidGeometry& e) {
        throw ProtocolViolation(who + ": " + e.what());
    }
}

std::shared_ptr<const ToolBackend> http_backend(HttpEndpoint endpoint) {
    return std::make_shared<HttpBackend>(std::move(endpoint));
}

}  // namespace chexfix
