#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chexfix/backend.hpp"
#include "chexfix/lexicon.hpp"
#include "chexfix/query.hpp"
#include "chexfix/updater.hpp"

namespace chexfix {

/// Pipeline settings. JSON form (every key optional):
///
///   {"guidelines": {"ett_correct_min_cm": 3, "ett_correct_max_cm": 7,
///                   "ett_ideal_cm": 5, "ett_ideal_tolerance_cm": 2},
///    "keywords": ["cm", "mm", ...],
///    "lexicon": "terms.tsv",
///    "backends": {"main": "fixtures:boxes.tsv", "keypoints": "http:http://127.0.0.1:8080"},
///    "routing": {"default": "main", "patterns": {"carina": "keypoints"}},
///    "min_confidence": 0.0,
///    "allow_non_ett_queries": false,
///    "all_images": false,
///    "jobs": 0,
///    "http": {"timeout_ms": 10000, "max_in_flight": 8},
///    "outputs": {"corpus": "updated.jsonl", "audit": "audit.jsonl"}}
///
/// Relative paths are resolved against the directory of the config file.
struct PipelineConfig {
    Guidelines guidelines;
    std::vector<std::string> keywords;
    std::optional<std::filesystem::path> lexicon_path;
    // Backend id -> "fixtures:<path>" or "http:<url>".
    std::map<std::string, std::string> backends;
    RoutingTable routing;
    double min_confidence = 0.0;
    QueryOptions queries;
    bool all_images = false;
    unsigned jobs = 0;  // 0 = one per hardware thread
    std::chrono::milliseconds http_timeout{10000};
    int http_max_in_flight = 8;
    std::optional<std::filesystem::path> corpus_out;
    std::optional<std::filesystem::path> audit_out;

    PipelineConfig();

    /// Throws ConfigError on unknown keys, bad values, or missing files.
    static PipelineConfig parse(std::string_view json_text, const std::filesystem::path& base_dir = {});
    static PipelineConfig load(const std::filesystem::path& path);

    /// `explicit_path` if given, else $CHEXFIX_CONFIG if set, else defaults.
    static PipelineConfig resolve(const std::optional<std::filesystem::path>& explicit_path);

    /// Routes every object to a single backend, replacing any configured set.
    void use_single_backend(std::string spec);

    /// Checks ranges, file existence, and that routing names known backends.
    void validate() const;

    CategoryLexicon lexicon() const;
    unsigned effective_jobs() const;
};

/// "fixtures:<path>" or "http:<url>". Throws ConfigError for any other form.
std::shared_ptr<const ToolBackend> make_backend(std::string_view spec, const std::string& id,
                                                const PipelineConfig& config);

/// Every configured backend behind the validity checks, joined by the routing
/// table. Throws ConfigError when no backend is configured.
std::shared_ptr<const ToolBackend> build_backend(const PipelineConfig& config);

}  // namespace chexfix
