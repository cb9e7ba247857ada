#include "chexfix/fixture_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "chexfix/errors.hpp"
#include "chexfix/geometry.hpp"

namespace chexfix {

using nlohmann::json;

namespace {

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(), "application/json");
}

}  // namespace

struct FixtureServer::Impl {
    FixtureBackend backend;
    std::map<std::string, ImageSize> sizes;
    FixtureServerOptions options;
    httplib::Server server;

    Impl(std::shared_ptr<const FixtureSet> fixtures, std::map<std::string, ImageSize> image_sizes,
         FixtureServerOptions opts)
        : backend(std::move(fixtures)), sizes(std::move(image_sizes)), options(std::move(opts)) {}

    // Parses the request and resolves the image; answers the error itself
    // and returns nullopt when the request cannot be served.
    std::optional<std::pair<ImageContext, std::string>> resolve(const httplib::Request& req,
                                                                httplib::Response& res) const {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception&) {
            send_error(res, 400, "bad_request", "body is not valid JSON");
            return std::nullopt;
        }
        if (!body.is_object() || !body.contains("image_id") || !body["image_id"].is_string() ||
            !body.contains("object_name") || !body["object_name"].is_string() ||
            body["object_name"].get<std::string>().empty()) {
            send_error(res, 400, "bad_request", "expected {image_id: string, object_name: string}");
            return std::nullopt;
        }
        const std::string id = body["image_id"].get<std::string>();
        const auto it = sizes.find(id);
        if (it == sizes.end()) {
            send_error(res, 404, "unknown_image", "no image with id '" + id + "'");
            return std::nullopt;
        }
        return std::make_pair(ImageContext{id, it->second}, body["object_name"].get<std::string>());
    }

    ImageSize frame_for(const ImageContext& image) const { return options.served_frame.value_or(image.original_size); }

    void install() {
        server.Post("/v1/exists", [this](const httplib::Request& req, httplib::Response& res) {
            const auto r = resolve(req, res);
            if (!r) return;
            const ExistsAnswer a = backend.exists(r->first, r->second);
            res.set_content(json{{"exists", a.exists}, {"confidence", a.confidence}}.dump(), "application/json");
        });
        server.Post("/v1/find", [this](const httplib::Request& req, httplib::Response& res) {
            const auto r = resolve(req, res);
            if (!r) return;
            const ImageSize frame = frame_for(r->first);
            json dets = json::array();
            for (const CxrObject& o : backend.find(r->first, r->second)) {
                const BBox b = frame == r->first.original_size ? o.bbox
                                                                : rescale_coords(o.bbox, r->first.original_size, frame);
                dets.push_back({{"bbox", {b.left, b.lower, b.right, b.upper}}, {"confidence", o.confidence}});
            }
            res.set_content(json{{"image_size", {frame.width, frame.height}}, {"detections", dets}}.dump(),
                            "application/json");
        });
        server.Post("/v1/segment", [this](const httplib::Request& req, httplib::Response& res) {
            const auto r = resolve(req, res);
            if (!r) return;
            const ImageSize frame = frame_for(r->first);
            RleMask mask = backend.segment(r->first, r->second).mask;
            if (frame != mask.size()) mask = mask.resample(frame);
            res.set_content(json{{"image_size", {frame.width, frame.height}},
                                 {"rle", mask.counts()},
                                 {"starts_with", mask.starts_with()}}
                                .dump(),
                            "application/json");
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) {
                send_error(res, res.status, res.status == 404 ? "not_found" : "error", "request failed");
            }
        });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string message = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                message = e.what();
            } catch (...) {
            }
            send_error(res, 500, "internal", message);
        });
    }
};

FixtureServer::FixtureServer(std::shared_ptr<const FixtureSet> fixtures, std::map<std::string, ImageSize> image_sizes,
                             FixtureServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(fixtures), std::move(image_sizes), std::move(options))) {
    impl_->install();
}

FixtureServer::~FixtureServer() { stop(); }

int FixtureServer::start() {
    const auto& opt = impl_->options;
    if (opt.port == 0) {
        port_ = impl_->server.bind_to_any_port(opt.host);
    } else {
        port_ = impl_->server.bind_to_port(opt.host, opt.port) ? opt.port : -1;
    }
    if (port_ <= 0) throw ConfigError("cannot bind " + opt.host + ":" + std::to_string(opt.port));
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void FixtureServer::serve_forever() {
    const auto& opt = impl_->options;
    if (!impl_->server.bind_to_port(opt.host, opt.port)) {
        throw ConfigError("cannot bind " + opt.host + ":" + std::to_string(opt.port));
    }
    port_ = opt.port;
    impl_->server.listen_after_bind();
}

void FixtureServer::stop() {
    if (impl_) impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

std::string FixtureServer::base_url() const { return "http://" + impl_->options.host + ":" + std::to_string(port_); }

}  // namespace chexfix
