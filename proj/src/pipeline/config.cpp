#include "chexfix/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "chexfix/errors.hpp"
#include "chexfix/fixture_backend.hpp"
#include "chexfix/http_backend.hpp"
#include "chexfix/text.hpp"

namespace chexfix {

namespace {

using json = nlohmann::json;

constexpr std::string_view kFixturesPrefix = "fixtures:";
constexpr std::string_view kHttpPrefix = "http:";

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown config key '" + where + key + "'");
    }
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

// Resolves the path part of a fixtures spec against `base`.
std::string resolve_spec(const std::filesystem::path& base, const std::string& spec) {
    if (spec.rfind(kFixturesPrefix, 0) == 0) {
        return std::string(kFixturesPrefix) + resolve_path(base, spec.substr(kFixturesPrefix.size())).string();
    }
    return spec;
}

}  // namespace

PipelineConfig::PipelineConfig() : keywords(default_measurement_keywords()) {}

PipelineConfig PipelineConfig::parse(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j, "", {"guidelines", "keywords", "lexicon", "backends", "routing", "min_confidence",
                           "allow_non_ett_queries", "all_images", "jobs", "http", "outputs"});

    PipelineConfig c;
    try {
        if (j.contains("guidelines")) {
            const json& g = j["guidelines"];
            reject_unknown(g, "guidelines.",
                           {"ett_correct_min_cm", "ett_correct_max_cm", "ett_ideal_cm", "ett_ideal_tolerance_cm"});
            c.guidelines.ett_correct_min_cm = g.value("ett_correct_min_cm", c.guidelines.ett_correct_min_cm);
            c.guidelines.ett_correct_max_cm = g.value("ett_correct_max_cm", c.guidelines.ett_correct_max_cm);
            c.guidelines.ett_ideal_cm = g.value("ett_ideal_cm", c.guidelines.ett_ideal_cm);
            c.guidelines.ett_ideal_tolerance_cm = g.value("ett_ideal_tolerance_cm", c.guidelines.ett_ideal_tolerance_cm);
        }
        if (j.contains("keywords")) c.keywords = j["keywords"].get<std::vector<std::string>>();
        if (j.contains("lexicon")) c.lexicon_path = resolve_path(base_dir, j["lexicon"].get<std::string>());
        if (j.contains("backends")) {
            for (const auto& [id, spec] : j["backends"].items()) {
                c.backends[id] = resolve_spec(base_dir, spec.get<std::string>());
            }
        }
        if (j.contains("routing")) {
            const json& r = j["routing"];
            reject_unknown(r, "routing.", {"default", "patterns"});
            c.routing.default_backend = r.value("default", std::string());
            if (r.contains("patterns")) {
                for (const auto& [pattern, id] : r["patterns"].items()) {
                    c.routing.patterns.emplace_back(to_lower(pattern), id.get<std::string>());
                }
            }
        }
        c.min_confidence = j.value("min_confidence", c.min_confidence);
        c.queries.allow_non_ett = j.value("allow_non_ett_queries", c.queries.allow_non_ett);
        c.all_images = j.value("all_images", c.all_images);
        if (j.contains("jobs")) {
            const long jobs = j["jobs"].get<long>();
            if (jobs < 0) throw ConfigError("jobs must be >= 0");
            c.jobs = static_cast<unsigned>(jobs);
        }
        if (j.contains("http")) {
            const json& h = j["http"];
            reject_unknown(h, "http.", {"timeout_ms", "max_in_flight"});
            c.http_timeout = std::chrono::milliseconds(h.value("timeout_ms", c.http_timeout.count()));
            c.http_max_in_flight = h.value("max_in_flight", c.http_max_in_flight);
        }
        if (j.contains("outputs")) {
            const json& o = j["outputs"];
            reject_unknown(o, "outputs.", {"corpus", "audit"});
            if (o.contains("corpus")) c.corpus_out = resolve_path(base_dir, o["corpus"].get<std::string>());
            if (o.contains("audit")) c.audit_out = resolve_path(base_dir, o["audit"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.parent_path());
}

PipelineConfig PipelineConfig::resolve(const std::optional<std::filesystem::path>& explicit_path) {
    if (explicit_path) return load(*explicit_path);
    if (const char* env = std::getenv("CHEXFIX_CONFIG"); env != nullptr && *env != '\0') return load(env);
    return PipelineConfig{};
}

void PipelineConfig::use_single_backend(std::string spec) {
    backends.clear();
    backends["default"] = std::move(spec);
    routing = RoutingTable{};
    routing.default_backend = "default";
}

void PipelineConfig::validate() const {
    guidelines.validate();
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) throw ConfigError("min_confidence must be in [0, 1]");
    if (http_timeout.count() <= 0) throw ConfigError("http.timeout_ms must be positive");
    if (http_max_in_flight < 1) throw ConfigError("http.max_in_flight must be >= 1");
    if (keywords.empty()) throw ConfigError("keywords must not be empty");
    if (lexicon_path && !std::filesystem::exists(*lexicon_path)) {
        throw ConfigError("lexicon file not found: " + lexicon_path->string());
    }
    for (const auto& [id, spec] : backends) {
        if (spec.rfind(kFixturesPrefix, 0) == 0) {
            const std::filesystem::path p = spec.substr(kFixturesPrefix.size());
            if (!std::filesystem::exists(p)) throw ConfigError("fixture file not found for '" + id + "': " + p.string());
        } else if (spec.rfind(kHttpPrefix, 0) != 0) {
            throw ConfigError("backend '" + id + "' must be fixtures:<path> or http:<url>, got '" + spec + "'");
        }
    }
    if (backends.empty()) return;
    const auto known = [&](const std::string& id) { return backends.count(id) != 0; };
    if (!routing.default_backend.empty() && !known(routing.default_backend)) {
        throw ConfigError("routing default names unknown backend '" + routing.default_backend + "'");
    }
    if (routing.default_backend.empty() && backends.size() != 1) {
        throw ConfigError("routing.default is required when more than one backend is configured");
    }
    for (const auto& [pattern, id] : routing.patterns) {
        if (!known(id)) throw ConfigError("routing pattern '" + pattern + "' names unknown backend '" + id + "'");
    }
}

CategoryLexicon PipelineConfig::lexicon() const {
    return lexicon_path ? CategoryLexicon::load(*lexicon_path) : CategoryLexicon::defaults();
}

unsigned PipelineConfig::effective_jobs() const {
    if (jobs > 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::shared_ptr<const ToolBackend> make_backend(std::string_view spec, const std::string& id,
                                                const PipelineConfig& config) {
    if (spec.substr(0, kFixturesPrefix.size()) == kFixturesPrefix) {
        const std::filesystem::path path(spec.substr(kFixturesPrefix.size()));
        auto fixtures = std::make_shared<const FixtureSet>(FixtureSet::load(path));
        return std::make_shared<FixtureBackend>(std::move(fixtures), id);
    }
    if (spec.substr(0, kHttpPrefix.size()) == kHttpPrefix) {
        HttpEndpoint endpoint;
        endpoint.base_url = std::string(spec.substr(kHttpPrefix.size()));
        endpoint.timeout = config.http_timeout;
        endpoint.max_in_flight = config.http_max_in_flight;
        endpoint.name = id;
        return http_backend(std::move(endpoint));
    }
    throw ConfigError("backend must be fixtures:<path> or http:<url>, got '" + std::string(spec) + "'");
}

std::shared_ptr<const ToolBackend> build_backend(const PipelineConfig& config) {
    if (config.backends.empty()) throw ConfigError("no backend configured; pass --backend or set backends");
    std::map<std::string, std::shared_ptr<const ToolBackend>> checked;
    for (const auto& [id, spec] : config.backends) {
        checked[id] = std::make_shared<CheckedBackend>(make_backend(spec, id, config), config.min_confidence);
    }
    RoutingTable table = config.routing;
    if (table.default_backend.empty()) table.default_backend = config.backends.begin()->first;
    return std::make_shared<RoutedBackend>(std::move(table), std::move(checked));
}

}  // namespace chexfix
