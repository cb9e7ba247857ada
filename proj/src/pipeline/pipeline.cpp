#include "chexfix/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "chexfix/errors.hpp"
#include "chexfix/extractor.hpp"
#include "chexfix/query.hpp"
#include "chexfix/text.hpp"

namespace chexfix {

namespace {

using json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json optional_string(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const MeasurementQuery& q) {
    json j;
    j["kind"] = std::string(to_string(q.kind));
    j["subject"] = q.subject;
    j["reference"] = optional_string(q.reference);
    j["region"] = optional_string(q.region);
    j["text"] = q.describe();
    return j;
}

json to_json(const Outcome& o) {
    json j = std::visit(overloaded{
                            [](const outcome::Scalar& v) { return json{{"type", "scalar"}, {"cm", v.cm}}; },
                            [](const outcome::Dims& v) {
                                return json{{"type", "dimensions"}, {"major_cm", v.major_cm}, {"minor_cm", v.minor_cm}};
                            },
                            [](const outcome::NotPresent& v) {
                                return json{{"type", "not_present"}, {"object", v.object_name}};
                            },
                            [](const outcome::Present& v) { return json{{"type", "present"}, {"object", v.object_name}}; },
                            [](const outcome::Failed& v) { return json{{"type", "failed"}, {"message", v.message}}; },
                        },
                        o);
    j["text"] = describe(o);
    return j;
}

json to_json(const MeasurementResult& r) {
    json provenance = json::array();
    for (const ProvenanceEntry& p : r.provenance) {
        provenance.push_back({{"step", p.step}, {"tool", p.tool}, {"confidence", optional_number(p.confidence)}});
    }
    return {{"query", r.query.describe()}, {"outcome", to_json(r.outcome)}, {"provenance", provenance}};
}

json to_json(const Edit& e) {
    json j;
    j["kind"] = std::string(to_string(e.kind));
    j["sentence"] = e.sentence_index;
    j["span"] = json::array({e.span.start, e.span.end});
    j["before"] = e.before;
    j["after"] = e.after;
    j["reason"] = e.reason;
    j["results"] = e.results;
    return j;
}

MeasurementQuery ett_distance_query() {
    MeasurementQuery q;
    q.kind = QueryKind::DistanceBetween;
    q.subject = std::string(kEndotrachealTube);
    q.reference = std::string(kCarina);
    return q;
}

bool has_failed_outcome(const UpdatedReport& u) {
    for (const MeasurementResult& r : u.results_used) {
        if (std::holds_alternative<outcome::Failed>(r.outcome)) return true;
    }
    return false;
}

}  // namespace

ReportAudit process_report(const StudyRecord& study, const std::string& model, const std::string& report,
                           Executor& executor, const PipelineConfig& config, const CategoryLexicon& lexicon) {
    ReportAudit audit;
    audit.study_id = study.study_id;
    audit.model = model;
    const bool mentions_tube = extract_ett(report, lexicon).present;
    audit.gated = mentions_tube || config.all_images;
    if (!audit.gated) {
        audit.update.text = report;
        return audit;
    }

    audit.queries = generate_queries(extract_query_findings(report, lexicon), config.queries);
    UpdateOptions options;
    if (!mentions_tube) {
        // Every image is checked: ask for the tube even though the report is silent.
        audit.queries.push_back(ett_distance_query());
        options.allow_unmentioned = true;
    }

    std::vector<MeasurementResult> results;
    for (const MeasurementQuery& q : audit.queries) {
        audit.plans.push_back(compile(q));
        results.push_back(executor.run(audit.plans.back()));
    }
    audit.update = update_report(report, results, config.guidelines, lexicon, options);
    audit.backend_failure = has_failed_outcome(audit.update);
    return audit;
}

PipelineResult run_pipeline(const Manifest& manifest, const ToolBackend& backend, const PipelineConfig& config) {
    const CategoryLexicon lexicon = config.lexicon();
    std::vector<std::vector<ReportAudit>> per_study(manifest.studies.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next++; i < manifest.studies.size(); i = next++) {
            const StudyRecord& study = manifest.studies[i];
            Executor executor(study, backend);
            for (const auto& [model, report] : study.model_reports) {
                ReportAudit audit;
                try {
                    audit = process_report(study, model, report, executor, config, lexicon);
                } catch (const std::exception& e) {
                    audit = ReportAudit{};
                    audit.study_id = study.study_id;
                    audit.model = model;
                    audit.gated = true;
                    audit.update.text = report;
                    audit.error = e.what();
                    audit.backend_failure = dynamic_cast<const BackendUnavailable*>(&e) != nullptr;
                }
                per_study[i].push_back(std::move(audit));
            }
        }
    };

    const unsigned jobs = static_cast<unsigned>(
        std::min<std::size_t>(config.effective_jobs(), std::max<std::size_t>(1, manifest.studies.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    PipelineResult result;
    for (auto& audits : per_study) {
        for (ReportAudit& a : audits) {
            result.corpus.entries.push_back({a.study_id, a.model, a.update.text});
            if (a.gated) ++result.gated;
            if (a.error || a.backend_failure) ++result.failed;
            if (a.backend_failure) ++result.backend_failures;
            result.audit.push_back(std::move(a));
        }
    }
    return result;
}

void write_audit(std::ostream& out, const std::vector<ReportAudit>& audit) {
    for (const ReportAudit& a : audit) {
        json j;
        j["study_id"] = a.study_id;
        j["model"] = a.model;
        j["gated"] = a.gated;
        json queries = json::array();
        for (const MeasurementQuery& q : a.queries) queries.push_back(to_json(q));
        j["queries"] = queries;
        json plans = json::array();
        for (const Plan& p : a.plans) plans.push_back(p.render());
        j["plans"] = plans;
        json results = json::array();
        for (const MeasurementResult& r : a.update.results_used) results.push_back(to_json(r));
        j["results"] = results;
        json edits = json::array();
        for (const Edit& e : a.update.edits) edits.push_back(to_json(e));
        j["edits"] = edits;
        j["error"] = optional_string(a.error);
        out << dump(j) << '\n';
    }
}

Summary run_eval(const Corpus& ground_truth, const Corpus& original, const Corpus& updated, const Guidelines& g,
                 const CategoryLexicon& lexicon) {
    std::map<std::string, const std::string*, std::less<>> gt;
    for (const CorpusEntry& e : ground_truth.entries) gt[e.study_id] = &e.report;

    std::vector<std::string> models;
    std::map<std::string, std::vector<const CorpusEntry*>> by_model;
    for (const CorpusEntry& e : original.entries) {
        if (by_model.find(e.model) == by_model.end()) models.push_back(e.model);
        by_model[e.model].push_back(&e);
    }
    std::map<std::pair<std::string, std::string>, const std::string*> upd;
    std::set<std::string> updated_models;
    for (const CorpusEntry& e : updated.entries) {
        upd[{e.model, e.study_id}] = &e.report;
        updated_models.insert(e.model);
    }

    std::vector<std::string> offenders;
    std::set<std::pair<std::string, std::string>> matched;
    for (const std::string& model : models) {
        for (const CorpusEntry* e : by_model[model]) {
            if (gt.find(e->study_id) == gt.end()) offenders.push_back(model + "/" + e->study_id + ": no ground truth");
            if (upd.find({model, e->study_id}) == upd.end()) {
                offenders.push_back(model + "/" + e->study_id + ": missing from updated corpus");
            } else {
                matched.insert({model, e->study_id});
            }
        }
    }
    for (const auto& [key, report] : upd) {
        if (matched.count(key) == 0) offenders.push_back(key.first + "/" + key.second + ": missing from original corpus");
    }
    if (!offenders.empty()) {
        std::string message = "corpora are not aligned on study_id (" + std::to_string(offenders.size()) + "):";
        for (const std::string& o : offenders) message += "\n  " + o;
        throw AlignmentError(message);
    }
    if (models.empty()) throw AlignmentError("original corpus is empty");

    std::vector<Comparison> rows;
    for (const std::string& model : models) {
        std::vector<EvalCase> before, after;
        for (const CorpusEntry* e : by_model[model]) {
            const EttObservation truth = extract_ett(*gt[e->study_id], lexicon);
            before.push_back({e->study_id, truth, extract_ett(e->report, lexicon)});
            after.push_back({e->study_id, truth, extract_ett(*upd[{model, e->study_id}], lexicon)});
        }
        rows.push_back(compare(compute_metrics(model, before, g), compute_metrics(model, after, g)));
    }
    return summarize(std::move(rows));
}

Summary run_eval(const Corpus& ground_truth, const Corpus& original, const Corpus& updated, const Guidelines& g) {
    return run_eval(ground_truth, original, updated, g, CategoryLexicon::defaults());
}

InjectionResult inject_manifest(const Manifest& manifest, const FixtureSet& annotations, const Guidelines& g) {
    InjectionResult result;
    result.manifest = manifest;
    for (StudyRecord& study : result.manifest.studies) {
        InjectionRecord record;
        record.study_id = study.study_id;
        const EttObservation obs = extract_ett(study.ground_truth_report);
        if (obs.present && !obs.measurement_cm) {
            const FixtureAnnotation* annotation = annotations.study(study.study_id);
            try {
                if (annotation == nullptr) throw AnnotationError(study.study_id + ": no annotation for this study");
                UpdatedReport u = inject_ground_truth(study.ground_truth_report, *annotation, study, g);
                if (!u.results_used.empty()) {
                    if (const auto* d = std::get_if<outcome::Scalar>(&u.results_used.front().outcome)) {
                        record.distance_cm = d->cm;
                    }
                }
                record.injected = u.text != study.ground_truth_report;
                study.ground_truth_report = std::move(u.text);
                if (record.injected) ++result.injected;
            } catch (const Error& e) {
                record.error = e.what();
            }
        }
        result.records.push_back(std::move(record));
    }
    return result;
}

void write_extraction(std::ostream& out, const Corpus& corpus, const CategoryLexicon& lexicon,
                      const std::vector<std::string>& keywords) {
    for (const CorpusEntry& e : corpus.entries) {
        const EttObservation ett = extract_ett(e.report, lexicon);
        json j;
        j["study_id"] = e.study_id;
        j["model"] = e.model;
        j["has_measurement_keywords"] = has_measurement_keywords(e.report, keywords);
        j["ett"] = {{"present", ett.present},
                    {"measurement_cm", optional_number(ett.measurement_cm)},
                    {"placement", ett.placement ? json(std::string(to_string(*ett.placement))) : json(nullptr)}};
        json findings = json::array();
        for (const MeasuredFinding& f : extract_measured_findings(e.report, lexicon)) {
            findings.push_back({{"object_name", f.object_name},
                                {"category", std::string(to_string(f.category))},
                                {"values_cm", f.values_cm},
                                {"polarity", f.polarity == Polarity::Present ? "present" : "absent"},
                                {"sentence", f.sentence_index},
                                {"region", optional_string(f.region)},
                                {"reference", optional_string(f.reference)},
                                {"below", f.below}});
        }
        j["findings"] = findings;
        out << dump(j) << '\n';
    }
}

}  // namespace chexfix
