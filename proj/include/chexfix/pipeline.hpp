#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chexfix/config.hpp"
#include "chexfix/dataset.hpp"
#include "chexfix/fixture_backend.hpp"
#include "chexfix/metrics.hpp"
#include "chexfix/plan.hpp"
#include "chexfix/updater.hpp"

namespace chexfix {

/// Everything the pipeline did to one report.
struct ReportAudit {
    std::string study_id;
    std::string model;
    // The report mentions the tube (or every image is processed).
    bool gated = false;
    std::vector<MeasurementQuery> queries;
    std::vector<Plan> plans;
    UpdatedReport update;        // results_used holds every executed plan's result
    std::optional<std::string> error;  // the study failed and its report passed through
    bool backend_failure = false;      // the error came from an unreachable tool
};

struct PipelineResult {
    Corpus corpus;                   // same order as Corpus::model_reports(manifest)
    std::vector<ReportAudit> audit;  // parallel to corpus.entries
    std::size_t gated = 0;
    std::size_t failed = 0;
    std::size_t backend_failures = 0;

    /// Every gated report failed because the tools were unreachable.
    bool systemic_failure() const noexcept { return gated > 0 && backend_failures == gated; }
};

/// Query -> plan -> execute -> update for one report. Reports without a tube
/// mention pass through untouched unless `all_images` is set.
ReportAudit process_report(const StudyRecord& study, const std::string& model, const std::string& report,
                           Executor& executor, const PipelineConfig& config, const CategoryLexicon& lexicon);

/// Processes every model report of every study on a pool of
/// config.effective_jobs() workers; one study's failure never affects another.
PipelineResult run_pipeline(const Manifest& manifest, const ToolBackend& backend, const PipelineConfig& config);

/// One JSON object per report: queries, rendered plans, outcomes with
/// provenance, and edits.
void write_audit(std::ostream& out, const std::vector<ReportAudit>& audit);

/// Builds evaluation cases per model from three aligned corpora and scores
/// original against updated. Models keep their first-appearance order in
/// `original`. Throws AlignmentError naming every study/model that does not
/// line up.
Summary run_eval(const Corpus& ground_truth, const Corpus& original, const Corpus& updated,
                 const Guidelines& g, const CategoryLexicon& lexicon);
Summary run_eval(const Corpus& ground_truth, const Corpus& original, const Corpus& updated,
                 const Guidelines& g = {});

struct InjectionRecord {
    std::string study_id;
    bool injected = false;
    std::optional<double> distance_cm;
    std::optional<std::string> error;
};

struct InjectionResult {
    Manifest manifest;
    std::vector<InjectionRecord> records;  // one per study
    std::size_t injected = 0;
};

/// Writes annotated tube-to-carina distances into ground-truth reports that
/// mention the tube without a value. Studies lacking usable annotations keep
/// their report and carry an error record.
InjectionResult inject_manifest(const Manifest& manifest, const FixtureSet& annotations, const Guidelines& g = {});

/// What the extractor sees in each report of a corpus, one JSON line each.
void write_extraction(std::ostream& out, const Corpus& corpus, const CategoryLexicon& lexicon,
                      const std::vector<std::string>& keywords);

}  // namespace chexfix
