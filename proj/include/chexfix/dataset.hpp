#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chexfix/types.hpp"

namespace chexfix {

/// Studies in file order. One JSON object per line:
///
///   {"study_id": "...", "image_ref": "...", "original_size": [w, h],
///    "pixel_spacing_mm": [sx, sy], "model_image_size": {"<model>": [w, h]},
///    "reports": {"ground_truth": "...", "<model>": "..."}}
///
/// `image_ref` and `model_image_size` are optional.
struct Manifest {
    std::vector<StudyRecord> studies;

    /// Throws IngestError (with the line number) on malformed JSON, missing
    /// fields, broken study invariants, or a repeated study_id.
    static Manifest parse(std::istream& in);
    static Manifest load(const std::filesystem::path& path);

    void write(std::ostream& out) const;
    const StudyRecord* find(std::string_view study_id) const;
};

/// One generated (or ground-truth) report.
struct CorpusEntry {
    std::string study_id;
    std::string model;
    std::string report;

    friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

inline constexpr std::string_view kGroundTruthModel = "ground_truth";

/// Line-delimited {"study_id", "model", "report"} records.
struct Corpus {
    std::vector<CorpusEntry> entries;

    /// Throws IngestError with the line number.
    static Corpus parse(std::istream& in);
    static Corpus load(const std::filesystem::path& path);

    void write(std::ostream& out) const;

    /// Ground-truth reports of every study, in manifest order.
    static Corpus ground_truth(const Manifest& manifest);
    /// Model reports of every study: manifest order, then model name.
    static Corpus model_reports(const Manifest& manifest);
};

}  // namespace chexfix
