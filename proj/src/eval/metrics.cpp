#include "chexfix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chexfix/errors.hpp"

namespace chexfix {

namespace {

// num / den, or 0 with `degenerate` set when the denominator is empty.
double ratio(double num, double den, bool& degenerate) {
    if (den == 0.0) {
        degenerate = true;
        return 0.0;
    }
    return num / den;
}

}  // namespace

BinaryCounts confusion(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("label vectors differ in length");
    BinaryCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            predicted[i] ? ++c.tp : ++c.fn;
        } else {
            predicted[i] ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

BinaryMetrics binary_metrics(const BinaryCounts& c) {
    BinaryMetrics m;
    m.counts = c;
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
    m.precision = ratio(tp, tp + fp, m.degenerate);
    m.recall = ratio(tp, tp + fn, m.degenerate);
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall, m.degenerate);
    const double tnr = ratio(tn, tn + fp, m.degenerate);
    m.bacc = (m.recall + tnr) / 2.0;
    return m;
}

BinaryMetrics presence_metrics(const std::vector<EvalCase>& cases) {
    std::vector<bool> truth, predicted;
    for (const EvalCase& c : cases) {
        truth.push_back(c.gt.present);
        predicted.push_back(c.model.present);
    }
    return binary_metrics(confusion(truth, predicted));
}

std::vector<double> measurement_errors(const std::vector<EvalCase>& cases) {
    std::vector<double> errors;
    for (const EvalCase& c : cases) {
        if (!c.gt.measurement_cm || !c.model.present) continue;
        errors.push_back(std::fabs(*c.gt.measurement_cm - c.model.measurement_cm.value_or(0.0)));
    }
    return errors;
}

ErrorStats error_stats(const std::vector<double>& errors) {
    ErrorStats s;
    s.n = errors.size();
    if (errors.empty()) return s;
    const double n = static_cast<double>(errors.size());
    double sum = 0.0, sum_sq = 0.0;
    for (double e : errors) {
        sum += std::fabs(e);
        sum_sq += e * e;
    }
    s.mae = sum / n;
    s.mse = sum_sq / n;
    s.max = *std::max_element(errors.begin(), errors.end());
    s.min = *std::min_element(errors.begin(), errors.end());
    double signed_sum = 0.0;
    for (double e : errors) signed_sum += e;
    s.avg = signed_sum / n;
    double var = 0.0;
    for (double e : errors) var += (e - s.avg) * (e - s.avg);
    s.std = std::sqrt(var / n);
    return s;
}

double composite(double mae, double f1) {
    if (!(f1 > 0.0 && f1 <= 1.0)) throw CompositeUndefined("composite needs 0 < F1 <= 1, got " + std::to_string(f1));
    return mae / f1;
}

double failure_rate(const std::vector<double>& errors, double threshold_cm) {
    if (errors.empty()) return 0.0;
    const auto failures = std::count_if(errors.begin(), errors.end(), [&](double e) { return e > threshold_cm; });
    return static_cast<double>(failures) / static_cast<double>(errors.size());
}

Placement effective_placement(const EttObservation& obs, const Guidelines& g) {
    if (obs.measurement_cm) return classify_placement(*obs.measurement_cm, g);
    if (obs.placement) return *obs.placement;
    return Placement::Correct;
}

BinaryMetrics placement_metrics(const std::vector<EvalCase>& cases, const Guidelines& g) {
    std::vector<bool> truth, predicted;
    for (const EvalCase& c : cases) {
        if (!c.gt.present || !c.model.present) continue;
        truth.push_back(is_correct(effective_placement(c.gt, g)));
        predicted.push_back(is_correct(effective_placement(c.model, g)));
    }
    return binary_metrics(confusion(truth, predicted));
}

double improvement_pct(double original, double updated) {
    if (!(updated > 0.0) || !std::isfinite(original)) {
        throw ImprovementUndefined("improvement needs a positive updated value, got " + std::to_string(updated));
    }
    return 100.0 * (original - updated) / updated;
}

double improvement(double original, double updated) { return std::round(improvement_pct(original, updated)); }

MetricsTable compute_metrics(std::string model, const std::vector<EvalCase>& cases, const Guidelines& g) {
    MetricsTable t;
    t.model = std::move(model);
    t.presence = presence_metrics(cases);
    const std::vector<double> errors = measurement_errors(cases);
    t.measurement = error_stats(errors);
    if (t.presence.f1 > 0.0) t.composite = composite(t.measurement.mae, t.presence.f1);
    t.failure_rate = failure_rate(errors);
    t.placement = placement_metrics(cases, g);
    return t;
}

namespace {

std::optional<double> maybe_improvement(std::optional<double> original, std::optional<double> updated) {
    if (!original || !updated || !(*updated > 0.0)) return std::nullopt;
    return improvement(*original, *updated);
}

}  // namespace

Comparison compare(const MetricsTable& original, const MetricsTable& updated) {
    Comparison c;
    c.model = original.model;
    c.original = original;
    c.updated = updated;
    c.mae_improvement = maybe_improvement(original.measurement.mae, updated.measurement.mae);
    c.composite_improvement = maybe_improvement(original.composite, updated.composite);
    return c;
}

namespace {

BinaryMetrics mean_binary(const std::vector<const BinaryMetrics*>& xs) {
    BinaryMetrics m;
    for (const BinaryMetrics* x : xs) {
        m.precision += x->precision;
        m.recall += x->recall;
        m.f1 += x->f1;
        m.bacc += x->bacc;
        m.degenerate = m.degenerate || x->degenerate;
    }
    const double n = static_cast<double>(xs.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    m.bacc /= n;
    return m;
}

MetricsTable mean_table(const std::vector<const MetricsTable*>& xs) {
    MetricsTable m;
    m.model = "Average";
    std::vector<const BinaryMetrics*> presence, placement;
    double composite_sum = 0.0;
    bool composite_defined = true;
    for (const MetricsTable* x : xs) {
        presence.push_back(&x->presence);
        placement.push_back(&x->placement);
        m.measurement.n += x->measurement.n;
        m.measurement.mae += x->measurement.mae;
        m.measurement.mse += x->measurement.mse;
        m.measurement.max += x->measurement.max;
        m.measurement.min += x->measurement.min;
        m.measurement.avg += x->measurement.avg;
        m.measurement.std += x->measurement.std;
        m.failure_rate += x->failure_rate;
        if (x->composite) {
            composite_sum += *x->composite;
        } else {
            composite_defined = false;
        }
    }
    const double n = static_cast<double>(xs.size());
    m.presence = mean_binary(presence);
    m.placement = mean_binary(placement);
    m.measurement.mae /= n;
    m.measurement.mse /= n;
    m.measurement.max /= n;
    m.measurement.min /= n;
    m.measurement.avg /= n;
    m.measurement.std /= n;
    m.failure_rate /= n;
    if (composite_defined) m.composite = composite_sum / n;
    return m;
}

std::optional<double> mean_of(const std::vector<Comparison>& rows, std::optional<double> Comparison::*field) {
    double sum = 0.0;
    for (const Comparison& r : rows) {
        if (!(r.*field)) return std::nullopt;
        sum += *(r.*field);
    }
    return sum / static_cast<double>(rows.size());
}

}  // namespace

Summary summarize(std::vector<Comparison> rows) {
    if (rows.empty()) throw std::invalid_argument("summarize needs at least one model");
    Summary s;
    std::vector<const MetricsTable*> originals, updateds;
    for (const Comparison& r : rows) {
        originals.push_back(&r.original);
        updateds.push_back(&r.updated);
    }
    s.average = compare(mean_table(originals), mean_table(updateds));
    s.average.model = "Average";
    s.mean_mae_improvement = mean_of(rows, &Comparison::mae_improvement);
    s.mean_composite_improvement = mean_of(rows, &Comparison::composite_improvement);
    s.rows = std::move(rows);
    return s;
}

}  // namespace chexfix
