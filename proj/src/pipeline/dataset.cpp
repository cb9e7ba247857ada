#include "chexfix/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "chexfix/errors.hpp"

namespace chexfix {

namespace {

using json = nlohmann::ordered_json;

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

// Calls `record(json, line)` for each non-blank line of `in`.
template <class F>
void for_each_record(std::istream& in, F&& record) {
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw IngestError(std::string("malformed JSON: ") + e.what(), line);
        }
        if (!j.is_object()) throw IngestError("record is not a JSON object", line);
        try {
            record(j, line);
        } catch (const IngestError& e) {
            if (e.line() != 0) throw;
            throw IngestError(e.what(), line);
        } catch (const json::exception& e) {
            throw IngestError(std::string("bad field: ") + e.what(), line);
        } catch (const Error& e) {
            throw IngestError(e.what(), line);
        }
    }
}

const json& require(const json& j, const char* key, std::size_t line) {
    const auto it = j.find(key);
    if (it == j.end()) throw IngestError(std::string("missing field '") + key + "'", line);
    return *it;
}

std::string require_string(const json& j, const char* key, std::size_t line) {
    const json& v = require(j, key, line);
    if (!v.is_string()) throw IngestError(std::string("field '") + key + "' must be a string", line);
    return v.get<std::string>();
}

ImageSize image_size(const json& v, const std::string& what, std::size_t line) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        throw IngestError(what + " must be [width, height] integers", line);
    }
    return {v[0].get<int>(), v[1].get<int>()};
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string());
    return in;
}

}  // namespace

Manifest Manifest::parse(std::istream& in) {
    Manifest m;
    std::set<std::string, std::less<>> seen;
    for_each_record(in, [&](const json& j, std::size_t line) {
        StudyRecord s;
        s.study_id = require_string(j, "study_id", line);
        if (j.contains("image_ref")) s.image_ref = require_string(j, "image_ref", line);
        s.original_size = image_size(require(j, "original_size", line), "original_size", line);
        const json& spacing = require(j, "pixel_spacing_mm", line);
        if (!spacing.is_array() || spacing.size() != 2 || !spacing[0].is_number() || !spacing[1].is_number()) {
            throw IngestError("pixel_spacing_mm must be [sx, sy] numbers", line);
        }
        s.pixel_spacing = {spacing[0].get<double>(), spacing[1].get<double>()};
        if (const auto it = j.find("model_image_size"); it != j.end() && !it->is_null()) {
            if (!it->is_object()) throw IngestError("model_image_size must be an object", line);
            for (const auto& [model, size] : it->items()) {
                s.model_image_sizes[model] = image_size(size, "model_image_size." + model, line);
            }
        }
        const json& reports = require(j, "reports", line);
        if (!reports.is_object()) throw IngestError("reports must be an object", line);
        for (const auto& [model, text] : reports.items()) {
            if (!text.is_string()) throw IngestError("report '" + model + "' must be a string", line);
            if (model == kGroundTruthModel) {
                s.ground_truth_report = text.get<std::string>();
            } else {
                s.model_reports[model] = text.get<std::string>();
            }
        }
        if (!reports.contains(std::string(kGroundTruthModel))) throw IngestError("reports lack ground_truth", line);
        s.validate();
        if (!seen.insert(s.study_id).second) throw IngestError("duplicate study_id '" + s.study_id + "'", line);
        m.studies.push_back(std::move(s));
    });
    return m;
}

Manifest Manifest::load(const std::filesystem::path& path) {
    auto in = open(path);
    return parse(in);
}

void Manifest::write(std::ostream& out) const {
    for (const StudyRecord& s : studies) {
        json j;
        j["study_id"] = s.study_id;
        if (!s.image_ref.empty()) j["image_ref"] = s.image_ref;
        j["original_size"] = {s.original_size.width, s.original_size.height};
        j["pixel_spacing_mm"] = {s.pixel_spacing.x_mm, s.pixel_spacing.y_mm};
        if (!s.model_image_sizes.empty()) {
            json sizes = json::object();
            for (const auto& [model, size] : s.model_image_sizes) sizes[model] = {size.width, size.height};
            j["model_image_size"] = sizes;
        }
        json reports = json::object();
        reports[std::string(kGroundTruthModel)] = s.ground_truth_report;
        for (const auto& [model, text] : s.model_reports) reports[model] = text;
        j["reports"] = reports;
        out << dump(j) << '\n';
    }
}

const StudyRecord* Manifest::find(std::string_view study_id) const {
    for (const StudyRecord& s : studies) {
        if (s.study_id == study_id) return &s;
    }
    return nullptr;
}

Corpus Corpus::parse(std::istream& in) {
    Corpus c;
    std::set<std::pair<std::string, std::string>> seen;
    for_each_record(in, [&](const json& j, std::size_t line) {
        CorpusEntry e;
        e.study_id = require_string(j, "study_id", line);
        e.model = j.contains("model") ? require_string(j, "model", line) : std::string(kGroundTruthModel);
        e.report = require_string(j, "report", line);
        if (e.study_id.empty()) throw IngestError("empty study_id", line);
        if (!seen.emplace(e.study_id, e.model).second) {
            throw IngestError("duplicate report for study '" + e.study_id + "', model '" + e.model + "'", line);
        }
        c.entries.push_back(std::move(e));
    });
    return c;
}

Corpus Corpus::load(const std::filesystem::path& path) {
    auto in = open(path);
    return parse(in);
}

void Corpus::write(std::ostream& out) const {
    for (const CorpusEntry& e : entries) {
        json j;
        j["study_id"] = e.study_id;
        j["model"] = e.model;
        j["report"] = e.report;
        out << dump(j) << '\n';
    }
}

Corpus Corpus::ground_truth(const Manifest& manifest) {
    Corpus c;
    for (const StudyRecord& s : manifest.studies) {
        c.entries.push_back({s.study_id, std::string(kGroundTruthModel), s.ground_truth_report});
    }
    return c;
}

Corpus Corpus::model_reports(const Manifest& manifest) {
    Corpus c;
    for (const StudyRecord& s : manifest.studies) {
        for (const auto& [model, text] : s.model_reports) c.entries.push_back({s.study_id, model, text});
    }
    return c;
}

}  // namespace chexfix
