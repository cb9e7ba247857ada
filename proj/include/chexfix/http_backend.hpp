#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>

#include "chexfix/backend.hpp"

namespace chexfix {

struct HttpEndpoint {
    std::string base_url;  // "http://host:port"
    std::chrono::milliseconds timeout{10000};
    int max_in_flight = 8;
    std::string name = "http";
};

/// Client for the tool wire protocol:
///
///   POST /v1/exists  {image_id, object_name} -> {exists, confidence}
///   POST /v1/find    {image_id, object_name} -> {image_size, detections:[{bbox, confidence}]}
///   POST /v1/segment {image_id, object_name} -> {image_size, rle, starts_with}
///
/// Coordinates come back in the server's frame and are rescaled to the
/// original image. Transport failures and 5xx answers raise
/// BackendUnavailable; malformed answers raise ProtocolViolation.
class HttpBackend final : public ToolBackend {
public:
    explicit HttpBackend(HttpEndpoint endpoint);

    std::string name() const override { return endpoint_.name; }
    ExistsAnswer exists(const ImageContext& image, std::string_view object_name) const override;
    std::vector<CxrObject> find(const ImageContext& image, std::string_view object_name) const override;
    CxrSegmentation segment(const ImageContext& image, std::string_view object_name) const override;

private:
    class Slots {
    public:
        explicit Slots(int n) : free_(n) {}
        void acquire();
        void release();

    private:
        std::mutex mutex_;
        std::condition_variable cv_;
        int free_;
    };

    std::string post(const std::string& path, const ImageContext& image, std::string_view object_name) const;

    HttpEndpoint endpoint_;
    std::string scheme_host_port_;
    std::unique_ptr<Slots> slots_;
};

std::shared_ptr<const ToolBackend> http_backend(HttpEndpoint endpoint);

}  // namespace chexfix
