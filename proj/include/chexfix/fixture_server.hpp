#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "chexfix/fixture_backend.hpp"

namespace chexfix {

struct FixtureServerOptions {
    std::string host = "127.0.0.1";
    int port = 0;  // 0 picks a free port
    // When set, coordinates and masks are served in this frame instead of the
    // original one, the way a model server with a fixed input size would.
    std::optional<ImageSize> served_frame;
};

/// Serves a FixtureSet over the tool wire protocol. Image sizes come from
/// the manifest; an image id without a known size answers 404.
class FixtureServer {
public:
    FixtureServer(std::shared_ptr<const FixtureSet> fixtures, std::map<std::string, ImageSize> image_sizes,
                  FixtureServerOptions options = {});
    ~FixtureServer();

    FixtureServer(const FixtureServer&) = delete;
    FixtureServer& operator=(const FixtureServer&) = delete;

    /// Binds and serves on a background thread. Throws ConfigError when the
    /// port cannot be bound. Returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void serve_forever();
    void stop();

    int port() const noexcept { return port_; }
    std::string base_url() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace chexfix
