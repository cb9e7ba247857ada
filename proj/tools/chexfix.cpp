// Command-line front end: extract, run, inject-gt, eval, serve-fixtures.
//
// Exit codes: 0 success, 1 systemic failure, 2 invalid input.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chexfix/errors.hpp"
#include "chexfix/fixture_server.hpp"
#include "chexfix/pipeline.hpp"

namespace {

using namespace chexfix;

constexpr int kOk = 0;
constexpr int kSystemic = 1;
constexpr int kInvalidInput = 2;

// Writes `text` to `path`, or to stdout when no path is given.
void emit(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + *path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + *path);
}

template <class T>
std::string written(const T& value) {
    std::ostringstream out;
    value.write(out);
    return out.str();
}

struct Options {
    std::optional<std::string> manifest;
    std::optional<std::string> corpus;
    std::optional<std::string> config;
    std::optional<std::string> backend;
    std::optional<std::string> out;
    std::optional<std::string> audit;
    std::optional<std::string> fixtures;
    std::optional<std::string> gt;
    std::optional<std::string> original;
    std::optional<std::string> updated;
    std::string format = "txt";
    std::string layout = "comparison";
    std::string host = "127.0.0.1";
    int port = 8080;
    unsigned jobs = 0;
    bool all_images = false;
};

PipelineConfig load_config(const Options& o) {
    std::optional<std::filesystem::path> path;
    if (o.config) path = *o.config;
    PipelineConfig config = PipelineConfig::resolve(path);
    if (o.backend) config.use_single_backend(*o.backend);
    if (o.jobs > 0) config.jobs = o.jobs;
    if (o.all_images) config.all_images = true;
    config.validate();
    return config;
}

int cmd_extract(const Options& o) {
    const PipelineConfig config = load_config(o);
    Corpus corpus;
    if (o.corpus) {
        corpus = Corpus::load(*o.corpus);
    } else if (o.manifest) {
        const Manifest manifest = Manifest::load(*o.manifest);
        corpus = Corpus::ground_truth(manifest);
        const Corpus models = Corpus::model_reports(manifest);
        corpus.entries.insert(corpus.entries.end(), models.entries.begin(), models.entries.end());
    } else {
        throw IngestError("extract needs --manifest or --corpus");
    }
    std::ostringstream text;
    write_extraction(text, corpus, config.lexicon(), config.keywords);
    emit(o.out, text.str());
    return kOk;
}

int cmd_run(const Options& o) {
    const PipelineConfig config = load_config(o);
    const Manifest manifest = Manifest::load(*o.manifest);
    const auto backend = build_backend(config);
    const PipelineResult result = run_pipeline(manifest, *backend, config);

    std::optional<std::string> out = o.out;
    if (!out && config.corpus_out) out = config.corpus_out->string();
    std::optional<std::string> audit = o.audit;
    if (!audit && config.audit_out) audit = config.audit_out->string();

    emit(out, written(result.corpus));
    if (audit) {
        std::ostringstream text;
        write_audit(text, result.audit);
        emit(audit, text.str());
    }
    for (const ReportAudit& a : result.audit) {
        if (a.error) std::cerr << "chexfix: " << a.study_id << "/" << a.model << ": " << *a.error << '\n';
    }
    std::cerr << "chexfix: " << result.corpus.entries.size() << " reports, " << result.gated << " checked, "
              << result.failed << " with failures\n";
    if (result.systemic_failure()) {
        std::cerr << "chexfix: every checked report failed at the tool backend\n";
        return kSystemic;
    }
    return kOk;
}

int cmd_inject(const Options& o) {
    const Manifest manifest = Manifest::load(*o.manifest);
    const FixtureSet annotations = FixtureSet::load(*o.fixtures);
    const PipelineConfig config = load_config(o);
    const InjectionResult result = inject_manifest(manifest, annotations, config.guidelines);
    emit(o.out, written(result.manifest));
    for (const InjectionRecord& r : result.records) {
        if (r.error) std::cerr << "chexfix: " << *r.error << '\n';
    }
    std::cerr << "chexfix: injected " << result.injected << " of " << result.records.size() << " studies\n";
    return kOk;
}

int cmd_eval(const Options& o) {
    const PipelineConfig config = load_config(o);
    const auto format = table_format_from_string(o.format);
    if (!format) throw IngestError("--format must be csv, md or txt");
    if (o.layout != "comparison" && o.layout != "detailed") throw IngestError("--layout must be comparison or detailed");

    Corpus gt, original;
    if (o.manifest) {
        const Manifest manifest = Manifest::load(*o.manifest);
        gt = Corpus::ground_truth(manifest);
        original = Corpus::model_reports(manifest);
    }
    if (o.gt) gt = Corpus::load(*o.gt);
    if (o.original) original = Corpus::load(*o.original);
    if (!o.manifest && (!o.gt || !o.original)) throw IngestError("eval needs --manifest, or both --gt and --original");
    const Corpus updated = Corpus::load(*o.updated);

    const Summary summary = run_eval(gt, original, updated, config.guidelines, config.lexicon());
    const TableLayout layout = o.layout == "detailed" ? TableLayout::Detailed : TableLayout::Comparison;
    emit(o.out, render(summary, *format, layout));
    return kOk;
}

int cmd_serve(const Options& o) {
    const Manifest manifest = Manifest::load(*o.manifest);
    auto fixtures = std::make_shared<const FixtureSet>(FixtureSet::load(*o.fixtures));
    std::map<std::string, ImageSize> sizes;
    for (const StudyRecord& s : manifest.studies) sizes[s.study_id] = s.original_size;
    FixtureServerOptions options;
    options.host = o.host;
    options.port = o.port;
    FixtureServer server(std::move(fixtures), std::move(sizes), options);
    std::cerr << "chexfix: serving " << manifest.studies.size() << " studies on " << o.host << ":" << o.port << '\n';
    server.serve_forever();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detects and corrects tube-placement measurement errors in generated chest X-ray reports."};
    app.require_subcommand(1);
    Options o;

    const auto config_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config, "Pipeline config (JSON); defaults to $CHEXFIX_CONFIG");
    };

    auto* extract = app.add_subcommand("extract", "Print what the extractor finds in each report");
    extract->add_option("--manifest", o.manifest, "Study manifest (JSONL)");
    extract->add_option("--corpus", o.corpus, "Report corpus (JSONL) instead of a manifest");
    extract->add_option("--out", o.out, "Output file (default stdout)");
    config_flags(extract);

    auto* run = app.add_subcommand("run", "Check and correct the model reports of a manifest");
    run->add_option("--manifest", o.manifest, "Study manifest (JSONL)")->required();
    run->add_option("--backend", o.backend, "fixtures:<path> or http:<url>; overrides configured backends");
    run->add_option("--out", o.out, "Updated corpus (JSONL; default stdout)");
    run->add_option("--audit", o.audit, "Audit log (JSONL)");
    run->add_flag("--all-images", o.all_images, "Check every image, not only reports that mention a tube");
    run->add_option("--jobs", o.jobs, "Worker threads (default: hardware threads)");
    config_flags(run);

    auto* inject = app.add_subcommand("inject-gt", "Write annotated tube distances into ground-truth reports");
    inject->add_option("--manifest", o.manifest, "Study manifest (JSONL)")->required();
    inject->add_option("--fixtures", o.fixtures, "Annotation file")->required();
    inject->add_option("--out", o.out, "Updated manifest (default stdout)");
    config_flags(inject);

    auto* eval = app.add_subcommand("eval", "Score original against updated reports");
    eval->add_option("--manifest", o.manifest, "Manifest supplying ground-truth and original reports");
    eval->add_option("--gt", o.gt, "Ground-truth corpus (JSONL)");
    eval->add_option("--original", o.original, "Original model corpus (JSONL)");
    eval->add_option("--updated", o.updated, "Updated model corpus (JSONL)")->required();
    eval->add_option("--format", o.format, "csv, md or txt")->capture_default_str();
    eval->add_option("--layout", o.layout, "comparison or detailed")->capture_default_str();
    eval->add_option("--out", o.out, "Output file (default stdout)");
    config_flags(eval);

    auto* serve = app.add_subcommand("serve-fixtures", "Serve an annotation file over the tool protocol");
    serve->add_option("--fixtures", o.fixtures, "Annotation file")->required();
    serve->add_option("--manifest", o.manifest, "Manifest supplying image sizes")->required();
    serve->add_option("--host", o.host, "Bind address")->capture_default_str();
    serve->add_option("--port", o.port, "Port")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (*extract) return cmd_extract(o);
        if (*run) return cmd_run(o);
        if (*inject) return cmd_inject(o);
        if (*eval) return cmd_eval(o);
        if (*serve) return cmd_serve(o);
    } catch (const IngestError& e) {
        std::cerr << "chexfix: invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const ConfigError& e) {
        std::cerr << "chexfix: invalid config: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const AlignmentError& e) {
        std::cerr << "chexfix: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const InvalidGeometry& e) {
        std::cerr << "chexfix: invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "chexfix: " << e.what() << '\n';
        return kSystemic;
    }
    return kOk;
}
