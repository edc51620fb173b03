#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "citywalk/http_providers.hpp"
#include "citywalk/pipeline.hpp"

namespace {

using namespace citywalk;

struct CliOptions {
    std::string config_path;
    std::string focal_glob = "*";
    std::string mock_script;
    std::string out_path;
    bool save_transcripts = false;
    bool rebuild_kb = false;
    bool dump_focal = false;
    std::string dump_deps_focal;
};

RunConfig load_config(const CliOptions& opts) {
    RunConfig cfg =
        opts.config_path.empty() ? RunConfig{} : RunConfig::load(opts.config_path);
    if (!opts.mock_script.empty()) {
        cfg.provider.kind = "mock";
        cfg.provider.mock_script = opts.mock_script;
    }
    if (opts.save_transcripts) cfg.save_transcripts = true;
    if (opts.rebuild_kb) cfg.rebuild_kb = true;
    if (!opts.out_path.empty()) cfg.out_dir = opts.out_path;
    return cfg;
}

struct Runtime {
    std::unique_ptr<LLMProvider> provider;
    std::unique_ptr<LLMProvider> retrying;
    std::unique_ptr<EmbeddingProvider> embedder;
    std::unique_ptr<Toolchain> toolchain;
    std::unique_ptr<GuidanceCatalog> loaded_catalog;
    const GuidanceCatalog* catalog = nullptr;
    std::unique_ptr<TranscriptRecorder> transcripts;
    std::unique_ptr<Pipeline> pipeline;
};

Runtime make_runtime(const RunConfig& cfg, bool need_provider = true) {
    Runtime rt;
    if (cfg.provider.kind == "mock") {
        if (cfg.provider.mock_script.empty() && need_provider)
            throw FatalError(FatalError::Kind::Config,
                             "mock provider selected but no mock script configured");
        std::vector<ScriptedMockProvider::Entry> script;
        if (!cfg.provider.mock_script.empty())
            script = ScriptedMockProvider::script_from_file(cfg.provider.mock_script);
        rt.provider = std::make_unique<ScriptedMockProvider>(std::move(script));
    } else {
        if (cfg.provider.endpoint.empty())
            throw FatalError(FatalError::Kind::Config, "http provider needs an endpoint");
        rt.provider = std::make_unique<HttpChatProvider>(
            cfg.provider.endpoint, cfg.provider.model, cfg.resolve_api_key());
    }
    rt.retrying = std::make_unique<RetryingProvider>(*rt.provider);

    if (cfg.embedding.kind == "hashing") {
        rt.embedder = std::make_unique<HashingEmbedder>(
            static_cast<std::size_t>(cfg.embedding.dimension));
    } else {
        const char* key = std::getenv(cfg.embedding.api_key_env.c_str());
        rt.embedder = std::make_unique<HttpEmbeddingProvider>(
            cfg.embedding.endpoint, cfg.embedding.model, key ? key : "",
            static_cast<std::size_t>(cfg.embedding.dimension));
    }

    if (cfg.stub_toolchain)
        rt.toolchain = std::make_unique<StubToolchain>();
    else
        rt.toolchain = std::make_unique<RealToolchain>(cfg.compiler);

    if (!cfg.guidelines_file.empty() || !cfg.classifier_rules_file.empty()) {
        rt.loaded_catalog = std::make_unique<GuidanceCatalog>(
            GuidanceCatalog::load(cfg.guidelines_file, cfg.classifier_rules_file));
        rt.catalog = rt.loaded_catalog.get();
    } else {
        rt.catalog = &GuidanceCatalog::builtin();
    }

    if (cfg.save_transcripts)
        rt.transcripts = std::make_unique<TranscriptRecorder>(cfg.out_dir / "transcripts");

    rt.pipeline = std::make_unique<Pipeline>(cfg, *rt.retrying, *rt.embedder, *rt.toolchain,
                                             *rt.catalog, rt.transcripts.get());
    return rt;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

int cmd_scan(const CliOptions& opts) {
    RunConfig cfg = load_config(opts);
    Runtime rt = make_runtime(cfg, /*need_provider=*/false);
    ScanSummary summary = rt.pipeline->scan();
    const RepoIndex& index = summary.index;

    if (opts.dump_focal) {
        emit(dump_focal_methods_json(enumerate_focal_methods(index, cfg.filters)) + "\n",
             opts.out_path);
        return 0;
    }
    if (!opts.dump_deps_focal.empty()) {
        FocalMethod focal;
        for (auto& m : enumerate_focal_methods(index, cfg.filters))
            if (m.id == opts.dump_deps_focal || m.name == opts.dump_deps_focal) focal = m;
        if (focal.id.empty())
            throw FatalError(FatalError::Kind::Config,
                             "no focal method matches: " + opts.dump_deps_focal);
        ConfigDependencies config_deps = rt.pipeline->config_dependencies(index);
        auto edges = build_include_graph(focal.file, index, 2, cfg.include_roots);
        CrossFileDependencies cross = extract_cross_file_dependencies(focal, edges, index);
        emit(dump_dependencies_json(config_deps, cross) + "\n", opts.out_path);
        return 0;
    }

    std::ostringstream out;
    out << "root: " << index.root.string() << "\n"
        << "source files: " << index.source_files.size() << "\n"
        << "header files: " << index.header_files.size() << "\n"
        << "config files: " << index.config_files.size() << "\n"
        << "doc files: " << index.doc_files.size() << "\n"
        << "test dir: " << (index.test_dir.empty() ? "(none)" : index.test_dir.string())
        << "\n"
        << "focal methods: " << summary.focal_method_count << "\n";
    for (const Warning& w : index.warnings)
        out << "warning: " << w.where << ": " << w.message << "\n";
    emit(out.str(), opts.out_path);
    return 0;
}

int cmd_generate(const CliOptions& opts) {
    RunConfig cfg = load_config(opts);
    Runtime rt = make_runtime(cfg);
    auto outcomes = rt.pipeline->generate(opts.focal_glob);
    std::ostringstream out;
    for (const GenerationOutcome& o : outcomes)
        out << o.file.focal_id << ": "
            << (o.failed ? "failed (" + o.error + ")" : "generated") << "\n";
    out << "generated " << outcomes.size() << " method(s); manifest at "
        << rt.pipeline->manifest_path().string() << "\n";
    emit(out.str(), opts.out_path);
    return 0;
}

int cmd_evaluate(const CliOptions& opts) {
    RunConfig cfg = load_config(opts);
    Runtime rt = make_runtime(cfg);
    MetricsReport report = rt.pipeline->evaluate(opts.focal_glob);
    emit(render_report_table(report), opts.out_path);
    return 0;
}

int cmd_report(const CliOptions& opts) {
    RunConfig cfg = load_config(opts);
    auto json = read_file(cfg.out_dir / "report.json");
    if (!json)
        throw FatalError(FatalError::Kind::Config,
                         "no report at " + (cfg.out_dir / "report.json").string() +
                             "; run evaluate first");
    emit(*json, opts.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"citywalk: unit-test generation, repair, and evaluation for C++ repos"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand too

    CliOptions opts;
    app.add_option("--config", opts.config_path, "run configuration file (JSON)");
    app.add_option("--out", opts.out_path, "write output to this path instead of stdout");
    app.add_option("--mock-provider", opts.mock_script, "scripted mock LLM script (JSON)");
    app.add_flag("--save-transcripts", opts.save_transcripts,
                 "persist request/response transcripts per method");
    app.add_flag("--rebuild-kb", opts.rebuild_kb, "rebuild the knowledge base index");

    CLI::App* scan = app.add_subcommand("scan", "index the repository and print counts");
    scan->add_flag("--dump-focal", opts.dump_focal, "emit focal methods as JSON");
    scan->add_option("--dump-deps", opts.dump_deps_focal,
                     "emit dependency structures for one focal method as JSON");

    CLI::App* generate =
        app.add_subcommand("generate", "generate tests for matching focal methods");
    generate->add_option("--focal", opts.focal_glob, "focal method id or name glob");

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "compile, repair, execute, and report");
    evaluate->add_option("--focal", opts.focal_glob, "focal method id or name glob");

    app.add_subcommand("report", "print the last evaluation report (JSON)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scan->parsed()) return cmd_scan(opts);
        if (generate->parsed()) return cmd_generate(opts);
        if (evaluate->parsed()) return cmd_evaluate(opts);
        return cmd_report(opts);
    } catch (const FatalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind == FatalError::Kind::Config ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
