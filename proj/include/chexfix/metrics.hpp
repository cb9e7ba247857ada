#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chexfix/extractor.hpp"
#include "chexfix/updater.hpp"

namespace chexfix {

struct BinaryCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    friend bool operator==(const BinaryCounts&, const BinaryCounts&) = default;
};

/// Tallies (truth, prediction) pairs; the positive class is `true`.
BinaryCounts confusion(const std::vector<bool>& truth, const std::vector<bool>& predicted);

struct BinaryMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double bacc = 0.0;  // (TPR + TNR) / 2
    BinaryCounts counts;
    // A ratio had an empty denominator and was reported as 0.
    bool degenerate = false;
};

BinaryMetrics binary_metrics(const BinaryCounts& counts);

/// One study as seen by the ground truth and by one version of a model report.
struct EvalCase {
    std::string study_id;
    EttObservation gt;
    EttObservation model;
};

/// Tube presence: ground truth vs. model.
BinaryMetrics presence_metrics(const std::vector<EvalCase>& cases);

/// Absolute errors over cases where the ground truth has a value and the
/// model mentions the tube. A model without a value counts as 0 cm.
std::vector<double> measurement_errors(const std::vector<EvalCase>& cases);

struct ErrorStats {
    std::size_t n = 0;
    double mae = 0.0;
    double mse = 0.0;
    double max = 0.0;
    double min = 0.0;
    double avg = 0.0;
    double std = 0.0;  // population standard deviation
};

/// All fields are 0 for an empty list.
ErrorStats error_stats(const std::vector<double>& errors);

/// MAE / F1. Throws CompositeUndefined unless 0 < f1 <= 1.
double composite(double mae, double f1);

/// Fraction of errors strictly above `threshold_cm`; 0 for an empty list.
double failure_rate(const std::vector<double>& errors, double threshold_cm = 1.5);

/// The placement a report implies: its measurement classified, else its
/// stated placement, else correct by default.
Placement effective_placement(const EttObservation& obs, const Guidelines& g = {});

/// Placement over cases where both sides report the tube; "correct" is the
/// positive class.
BinaryMetrics placement_metrics(const std::vector<EvalCase>& cases, const Guidelines& g = {});

/// 100 * (original - updated) / updated. Throws ImprovementUndefined unless updated > 0.
double improvement_pct(double original, double updated);
/// improvement_pct rounded to the nearest whole percent.
double improvement(double original, double updated);

struct MetricsTable {
    std::string model;
    BinaryMetrics presence;
    ErrorStats measurement;
    std::optional<double> composite;  // absent when F1 is 0
    double failure_rate = 0.0;
    BinaryMetrics placement;
};

MetricsTable compute_metrics(std::string model, const std::vector<EvalCase>& cases, const Guidelines& g = {});

struct Comparison {
    std::string model;
    MetricsTable original;
    MetricsTable updated;
    std::optional<double> mae_improvement;        // whole percent
    std::optional<double> composite_improvement;  // whole percent
};

Comparison compare(const MetricsTable& original, const MetricsTable& updated);

struct Summary {
    std::vector<Comparison> rows;
    // Unweighted means of every per-model metric; its improvements are the
    // improvement of the mean values.
    Comparison average;
    // Means of the per-model improvement percentages, for reference.
    std::optional<double> mean_mae_improvement;
    std::optional<double> mean_composite_improvement;
};

/// Throws std::invalid_argument for an empty list.
Summary summarize(std::vector<Comparison> rows);

enum class TableFormat { Csv, Markdown, Text };
enum class TableLayout {
    Comparison,  // presence precision, MAE, composite, placement precision; original vs updated
    Detailed,    // full presence / measurement / placement statistics per report version
};

std::optional<TableFormat> table_format_from_string(std::string_view s) noexcept;

std::string render(const Summary& summary, TableFormat format, TableLayout layout = TableLayout::Comparison);

}  // namespace chexfix
