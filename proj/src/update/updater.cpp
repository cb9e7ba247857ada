#include "chexfix/updater.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "chexfix/errors.hpp"
#include "chexfix/extractor.hpp"
#include "chexfix/geometry.hpp"

namespace chexfix {

namespace {

// What happens to one sentence of the original report.
struct SentencePlan {
    bool remove = false;
    std::vector<std::pair<Span, std::string>> replacements;  // absolute spans
    std::optional<std::string> rewrite;
    std::optional<std::string> clause;
    std::vector<std::string> appended;
    std::vector<std::size_t> results;
    std::vector<std::string> reasons;

    void note(std::size_t result, std::string why) {
        if (std::find(results.begin(), results.end(), result) == results.end()) results.push_back(result);
        reasons.push_back(std::move(why));
    }
};

bool agrees(std::optional<Placement> stated, Placement verdict) {
    if (!stated) return false;
    if (*stated == verdict) return true;
    return *stated == Placement::IncorrectUnspecified && !is_correct(verdict);
}

bool conflicts(std::optional<Placement> stated, Placement verdict) { return stated && !agrees(stated, verdict); }

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

std::string with_clause(std::string content, std::string_view clause) {
    if (!content.empty() && is_terminal(content.back())) {
        content.insert(content.size() - 1, clause);
    } else {
        content += clause;
    }
    return content;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::optional<std::string> rendered_value(const Outcome& o) {
    if (const auto* s = std::get_if<outcome::Scalar>(&o)) return format_cm(s->cm) + " cm";
    if (const auto* d = std::get_if<outcome::Dims>(&o)) {
        return format_cm(d->major_cm) + " x " + format_cm(d->minor_cm) + " cm";
    }
    return std::nullopt;
}

bool mentions(const SentenceAnalysis& sa, const std::string& subject, bool positive_only) {
    for (std::size_t k = 0; k < sa.objects.size(); ++k) {
        if (sa.objects[k].object_name == subject && (!positive_only || !sa.object_negated[k])) return true;
    }
    return false;
}

}  // namespace

void Guidelines::validate() const {
    if (!(ett_correct_min_cm > 0.0) || !(ett_correct_max_cm > ett_correct_min_cm) || !std::isfinite(ett_correct_max_cm)) {
        throw ConfigError("placement interval must satisfy 0 < min < max");
    }
}

Placement classify_placement(double distance_cm, const Guidelines& g) {
    if (!std::isfinite(distance_cm)) throw InvalidGeometry("non-finite tube distance");
    if (distance_cm < g.ett_correct_min_cm) return Placement::TooLow;
    if (distance_cm > g.ett_correct_max_cm) return Placement::TooHigh;
    return Placement::Correct;
}

std::string_view to_string(EditKind k) noexcept {
    switch (k) {
        case EditKind::Replace: return "replace";
        case EditKind::RemoveSentence: return "remove_sentence";
        case EditKind::AppendClause: return "append_clause";
        case EditKind::NoOp: return "no_op";
    }
    return "no_op";
}

std::string ett_template(double distance_cm, bool below, Placement verdict) {
    return "The endotracheal tube tip is " + format_cm(distance_cm) + " cm " + (below ? "below" : "above") +
           " the carina; position is " + std::string(to_string(verdict)) + ".";
}

std::string apply_edits(std::string_view original, const std::vector<Edit>& edits) {
    std::vector<const Edit*> active;
    for (const Edit& e : edits) {
        if (e.kind != EditKind::NoOp) active.push_back(&e);
    }
    std::stable_sort(active.begin(), active.end(), [](const Edit* a, const Edit* b) {
        return a->span.start != b->span.start ? a->span.start < b->span.start : a->span.end < b->span.end;
    });
    std::string out;
    std::size_t cursor = 0;
    for (const Edit* e : active) {
        if (e->span.end > original.size() || e->span.start > e->span.end) {
            throw ConsistencyError("edit span outside the report");
        }
        if (e->span.start < cursor) throw ConsistencyError("overlapping edits");
        if (e->span.of(original) != e->before) throw ConsistencyError("edit does not match the report text");
        out.append(original.substr(cursor, e->span.start - cursor));
        out += e->after;
        cursor = e->span.end;
    }
    out.append(original.substr(cursor));
    return out;
}

UpdatedReport update_report(std::string_view report, const std::vector<MeasurementResult>& results,
                            const Guidelines& g, const CategoryLexicon& lexicon, const UpdateOptions& options) {
    g.validate();
    const ReportAnalysis analysis = analyze_report(report, lexicon);
    const auto& sents = analysis.sentences;
    const std::size_t n = sents.size();
    const std::vector<MeasuredFinding> findings = extract_measured_findings(report, lexicon);

    std::vector<SentencePlan> plans(n);
    std::vector<std::string> trailing;
    std::vector<std::size_t> trailing_results;
    std::vector<Edit> noops;
    std::map<std::string, std::size_t> ordinals;
    bool ett_placement_done = false;

    const auto content_of = [&](std::size_t i) { return std::string(sents[i].sentence.content.of(report)); };
    const auto is_reposition = [&](std::size_t i) {
        return i < n && to_lower(sents[i].sentence.content.of(report)) == to_lower(kRepositionSentence);
    };
    // Sentence text after rewrites and value replacements, before any clause.
    const auto revised = [&](std::size_t i) {
        const SentencePlan& p = plans[i];
        if (p.rewrite) return *p.rewrite;
        std::string content = content_of(i);
        auto reps = p.replacements;
        std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) { return a.first.start > b.first.start; });
        const std::size_t base = sents[i].sentence.content.start;
        for (const auto& [span, text] : reps) content.replace(span.start - base, span.size(), text);
        return content;
    };

    for (std::size_t ri = 0; ri < results.size(); ++ri) {
        const MeasurementResult& r = results[ri];
        const std::string subject = to_lower(r.query.subject);
        const bool is_ett = subject == kEndotrachealTube;
        const std::size_t ordinal = ordinals[subject]++;
        const auto noop = [&](std::string why) {
            Edit e;
            e.kind = EditKind::NoOp;
            e.sentence_index = n;
            e.reason = std::move(why);
            e.results = {ri};
            noops.push_back(std::move(e));
        };

        std::vector<std::size_t> positive, any;
        for (std::size_t i = 0; i < n; ++i) {
            if (mentions(sents[i], subject, true)) positive.push_back(i);
            if (mentions(sents[i], subject, false)) any.push_back(i);
        }

        if (const auto* f = std::get_if<outcome::Failed>(&r.outcome)) {
            noop("measurement failed (" + f->message + "); original kept");
            continue;
        }
        if (std::holds_alternative<outcome::Present>(r.outcome)) {
            noop(subject + " confirmed present; original kept");
            continue;
        }
        if (const auto* np = std::get_if<outcome::NotPresent>(&r.outcome)) {
            if (to_lower(np->object_name) != subject) {
                noop(np->object_name + " not present in the image; " + subject + " not measured; original kept");
                continue;
            }
            if (positive.empty()) {
                noop(subject + " not present in the image and not asserted by the report");
                continue;
            }
            for (std::size_t i : positive) {
                plans[i].remove = true;
                plans[i].note(ri, subject + " not present in the image");
                if (is_ett && is_reposition(i + 1) && !mentions(sents[i + 1], subject, false)) {
                    plans[i + 1].remove = true;
                    plans[i + 1].note(ri, "follow-up for a removed tube");
                }
            }
            continue;
        }

        // Scalar or Dims.
        const std::string value = *rendered_value(r.outcome);
        const auto* scalar = std::get_if<outcome::Scalar>(&r.outcome);
        if (positive.empty()) {
            if (!options.allow_unmentioned) {
                throw ConsistencyError("result for '" + subject + "', which the report does not mention");
            }
            if (!is_ett || scalar == nullptr || ett_placement_done) {
                noop("no sentence can carry the measurement of " + subject);
                continue;
            }
            ett_placement_done = true;
            const Placement v = classify_placement(round_to_tenth(scalar->cm), g);
            for (std::size_t i : any) {
                plans[i].remove = true;
                plans[i].note(ri, "contradicted by the measured " + subject);
            }
            trailing.push_back(ett_template(scalar->cm, false, v));
            if (!is_correct(v)) trailing.emplace_back(kRepositionSentence);
            trailing_results.push_back(ri);
            continue;
        }

        std::vector<const MeasuredFinding*> measured;
        for (const MeasuredFinding& f : findings) {
            if (f.object_name == subject && f.polarity == Polarity::Present) measured.push_back(&f);
        }
        const MeasuredFinding* target = ordinal < measured.size() ? measured[ordinal] : nullptr;
        bool changed = false;
        if (target != nullptr && target->char_span.of(report) != value) {
            plans[target->sentence_index].replacements.emplace_back(target->char_span, value);
            plans[target->sentence_index].note(ri, "measured value " + value);
            changed = true;
        }

        if (!is_ett || scalar == nullptr || ett_placement_done) {
            if (target == nullptr) {
                noop("no stated measurement of " + subject + " to replace; original kept");
            } else if (!changed) {
                noop(subject + " already reads " + value);
            }
            continue;
        }

        // Tube placement follows the measured distance.
        ett_placement_done = true;
        const bool below = target != nullptr && target->below;
        const double signed_cm = below ? -round_to_tenth(scalar->cm) : round_to_tenth(scalar->cm);
        const Placement v = classify_placement(signed_cm, g);
        const std::string verdict(to_string(v));
        std::size_t anchor = 0;
        if (target != nullptr) {
            anchor = target->sentence_index;
            if (conflicts(stated_placement(revised(anchor)), v)) {
                plans[anchor].rewrite = ett_template(scalar->cm, below, v);
                plans[anchor].note(ri, "placement restated as " + verdict);
                changed = true;
            }
        } else {
            anchor = positive.front();
            plans[anchor].appended.push_back(ett_template(scalar->cm, false, v));
            plans[anchor].note(ri, "measured distance " + value + " added");
            changed = true;
        }
        for (std::size_t i : positive) {
            if (target != nullptr && i == anchor) continue;
            const bool has_value = std::any_of(measured.begin(), measured.end(),
                                               [&](const MeasuredFinding* f) { return f->sentence_index == i; });
            if (has_value) continue;
            if (conflicts(sents[i].stated_placement, v)) {
                plans[i].remove = true;
                plans[i].note(ri, "placement statement contradicts the measured " + verdict);
                changed = true;
            }
        }
        bool stated = target == nullptr;  // the inserted sentence states it
        for (std::size_t i : positive) {
            if (!plans[i].remove && agrees(stated_placement(revised(i)), v)) stated = true;
        }
        if (!stated) {
            plans[anchor].clause = "; position is " + verdict;
            plans[anchor].note(ri, "placement stated as " + verdict);
            changed = true;
        }
        const bool follow_up_next = is_reposition(anchor + 1) && !plans[anchor + 1].remove;
        if (!is_correct(v) && !follow_up_next) {
            plans[anchor].appended.emplace_back(kRepositionSentence);
            plans[anchor].note(ri, "repositioning recommended for " + verdict + " placement");
            changed = true;
        } else if (is_correct(v) && follow_up_next) {
            plans[anchor + 1].remove = true;
            plans[anchor + 1].note(ri, "repositioning no longer indicated");
            changed = true;
        }
        if (!changed) noop(subject + " already reads " + value + ", position " + verdict);
    }

    UpdatedReport out;
    out.results_used = results;
    for (std::size_t i = 0; i < n; ++i) {
        const SentencePlan& p = plans[i];
        const Sentence& s = sents[i].sentence;
        const std::string content = content_of(i);
        const std::string reason = join(p.reasons, "; ");
        if (p.remove) {
            Edit e;
            e.sentence_index = i;
            e.reason = reason;
            e.results = p.results;
            if (!p.appended.empty()) {
                e.kind = EditKind::Replace;
                e.span = s.content;
                e.after = join(p.appended, " ");
            } else {
                e.kind = EditKind::RemoveSentence;
                e.span = s.span;
                // The last sentence takes the blank before it along.
                if (i + 1 == n && i > 0 && !plans[i - 1].remove) e.span.start = sents[i - 1].sentence.content.end;
            }
            e.before = std::string(e.span.of(report));
            out.edits.push_back(std::move(e));
            continue;
        }
        std::string updated = revised(i);
        if (p.clause) updated = with_clause(updated, *p.clause);
        if (updated != content) {
            Edit e;
            e.kind = EditKind::Replace;
            e.sentence_index = i;
            e.span = s.content;
            e.before = content;
            e.after = updated;
            e.reason = reason;
            e.results = p.results;
            out.edits.push_back(std::move(e));
        }
        if (!p.appended.empty()) {
            Edit e;
            e.kind = EditKind::AppendClause;
            e.sentence_index = i;
            e.span = {s.content.end, s.content.end};
            e.after = " " + join(p.appended, " ");
            e.reason = reason;
            e.results = p.results;
            out.edits.push_back(std::move(e));
        }
    }
    if (!trailing.empty()) {
        Edit e;
        e.kind = EditKind::AppendClause;
        e.sentence_index = n;
        e.span = {report.size(), report.size()};
        const bool needs_blank = !report.empty() && !is_space(report.back());
        e.after = (needs_blank ? " " : "") + join(trailing, " ");
        e.reason = "measured tube added to a report that did not state it";
        e.results = trailing_results;
        out.edits.push_back(std::move(e));
    }
    for (Edit& e : noops) out.edits.push_back(std::move(e));
    out.text = apply_edits(report, out.edits);
    return out;
}

UpdatedReport update_report(std::string_view report, const std::vector<MeasurementResult>& results,
                            const Guidelines& g) {
    static const CategoryLexicon lexicon = CategoryLexicon::defaults();
    return update_report(report, results, g, lexicon);
}

UpdatedReport inject_ground_truth(std::string_view gt_report, const FixtureAnnotation& annotation,
                                  const StudyRecord& study, const Guidelines& g) {
    const EttObservation obs = extract_ett(gt_report);
    if (!obs.present || obs.measurement_cm) return UpdatedReport{std::string(gt_report), {}, {}};

    const auto locate = [&](std::string_view name) -> BBox {
        const FixtureEntry* entry = annotation.entry(name);
        if (entry != nullptr && !entry->objects.empty()) return select_singleton(entry->objects).bbox;
        if (entry != nullptr && entry->mask) {
            if (auto box = entry->mask->resample(study.original_size).bounding_box()) return *box;
        }
        throw AnnotationError(study.study_id + ": annotation lacks '" + std::string(name) + "'");
    };
    const BBox tube = locate(kEndotrachealTube);
    const BBox carina = locate(kCarina);

    MeasurementResult result;
    result.query.kind = QueryKind::DistanceBetween;
    result.query.subject = std::string(kEndotrachealTube);
    result.query.reference = std::string(kCarina);
    result.outcome = outcome::Scalar{center_distance_cm(tube.center(), carina.center(), study.pixel_spacing)};
    result.provenance = {{0, "annotation", std::nullopt}, {1, "annotation", std::nullopt}};
    return update_report(gt_report, {result}, g);
}

}  // namespace chexfix
