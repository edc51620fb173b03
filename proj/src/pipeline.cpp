#include "citywalk/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

namespace citywalk {

namespace {

std::string stage_name(TestStage stage) {
    switch (stage) {
        case TestStage::Initial: return "initial";
        case TestStage::Refined: return "refined";
        case TestStage::RuleFixed: return "rule_fixed";
        case TestStage::LlmFixed: return "llm_fixed";
    }
    return "initial";
}

TestStage stage_from_name(const std::string& name) {
    if (name == "refined") return TestStage::Refined;
    if (name == "rule_fixed") return TestStage::RuleFixed;
    if (name == "llm_fixed") return TestStage::LlmFixed;
    return TestStage::Initial;
}

bool matches(const FocalMethod& m, const std::string& glob) {
    return glob.empty() || glob == "*" || glob_match(glob, m.id) || glob_match(glob, m.name);
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    std::size_t pos;
    while ((pos = text.find(key)) != std::string::npos) text.replace(pos, key.size(), value);
    return text;
}

}  // namespace

Pipeline::Pipeline(RunConfig config, LLMProvider& provider, EmbeddingProvider& embedder,
                   Toolchain& toolchain, const GuidanceCatalog& catalog,
                   TranscriptRecorder* transcripts)
    : config_(std::move(config)),
      provider_(provider),
      embedder_(embedder),
      toolchain_(toolchain),
      catalog_(catalog),
      transcripts_(transcripts) {}

fs::path Pipeline::tests_dir() const { return config_.out_dir / "tests"; }
fs::path Pipeline::manifest_path() const { return config_.out_dir / "generated.json"; }
fs::path Pipeline::report_path() const { return config_.out_dir / "report.json"; }

ScanSummary Pipeline::scan() const {
    std::error_code ec;
    if (!fs::is_directory(config_.project_root, ec))
        throw FatalError(FatalError::Kind::Config,
                         "project root is not a directory: " + config_.project_root.string());
    ScanOptions options;
    options.test_dir_name = config_.test_dir;
    ScanSummary summary;
    summary.index = scan_repository(config_.project_root, options);
    summary.focal_method_count =
        static_cast<int>(enumerate_focal_methods(summary.index, config_.filters).size());
    return summary;
}

ConfigDependencies Pipeline::config_dependencies(const RepoIndex& index) const {
    return extract_config_dependencies(index);
}

KnowledgeBase Pipeline::knowledge_base(const RepoIndex& index) {
    fs::path kb_path = config_.out_dir / "kb_index.json";
    if (!config_.rebuild_kb) {
        auto loaded = load_index(kb_path, embedder_.dimension());
        if (loaded) return std::move(*loaded);
    }
    KnowledgeBase kb = build_knowledge_base(index, embedder_);
    fs::create_directories(config_.out_dir);
    save_index(kb, kb_path);
    return kb;
}

GenerationOutcome Pipeline::generate_one(const FocalMethod& focal, const RepoIndex& index,
                                         const ConfigDependencies& config_deps,
                                         const KnowledgeBase& kb) {
    GenerationOutcome outcome;
    outcome.file.focal_id = focal.id;
    try {
        StructuredFocalContext ctx = extract_focal_context(focal, index);
        std::vector<Warning> warnings;
        auto edges =
            build_include_graph(focal.file, index, 2, config_.include_roots, &warnings);
        CrossFileDependencies cross = extract_cross_file_dependencies(focal, edges, index);

        PromptSections sections;
        sections.focal_context = render_focal_context(ctx);
        sections.config_deps = render_config_deps(config_deps);
        sections.cross_file_deps = render_cross_file_deps(cross);
        for (const auto& hit :
             retrieve_docs(build_query_statement(focal), kb.docs, embedder_, 2))
            sections.intention_contexts.push_back(hit.snippet);
        for (const auto& hit : retrieve_code_examples(focal, kb.code))
            sections.intention_contexts.push_back(hit.snippet);

        IntentSummary intent = run_step1_understanding(focal, sections, provider_,
                                                       transcripts_, config_.token_budget);
        GeneratedTestFile tc = run_step2_generate(
            focal, sections,
            intent, catalog_.guidelines_for(PromptStage::Generation, config_deps),
            provider_, transcripts_, config_.token_budget);
        tc = run_step3_refine(std::move(tc),
                              catalog_.guidelines_for(PromptStage::Refinement, config_deps),
                              provider_, transcripts_, config_.token_budget);
        tc = apply_syntax_rules(std::move(tc), ctx, config_deps);
        outcome.file = std::move(tc);
    } catch (const PerMethodError& e) {
        outcome.failed = true;
        outcome.error = e.what();
    } catch (const TransportError& e) {
        outcome.failed = true;
        outcome.error = std::string("provider unreachable: ") + e.what();
    }
    return outcome;
}

std::vector<GenerationOutcome> Pipeline::generate(const std::string& focal_glob) {
    ScanSummary summary = scan();
    const RepoIndex& index = summary.index;
    ConfigDependencies config_deps = config_dependencies(index);
    KnowledgeBase kb = knowledge_base(index);

    std::vector<FocalMethod> methods;
    for (auto& m : enumerate_focal_methods(index, config_.filters))
        if (matches(m, focal_glob)) methods.push_back(std::move(m));

    std::vector<GenerationOutcome> outcomes(methods.size());
    int workers = std::min(config_.workers,
                           std::max(1, static_cast<int>(methods.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < methods.size(); ++i)
            outcomes[i] = generate_one(methods[i], index, config_deps, kb);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < methods.size(); i = next++)
                    outcomes[i] = generate_one(methods[i], index, config_deps, kb);
            });
        for (auto& t : pool) t.join();
    }

    fs::create_directories(tests_dir());
    nlohmann::json manifest;
    manifest["schema"] = "citywalk-generated";
    manifest["version"] = 1;
    auto& entries = manifest["entries"] = nlohmann::json::array();
    for (const GenerationOutcome& o : outcomes) {
        nlohmann::json e;
        e["focal_id"] = o.file.focal_id;
        e["failed"] = o.failed;
        e["error"] = o.error;
        e["stage"] = stage_name(o.file.stage);
        e["lineage"] = o.file.lineage;
        e["notes"] = o.file.notes;
        if (!o.failed) {
            fs::path file =
                tests_dir() / ("citywalk_test_" + slugify(o.file.focal_id) + ".cpp");
            write_file(file, o.file.source);
            e["file"] = file.string();
        }
        entries.push_back(std::move(e));
    }
    write_file(manifest_path(), manifest.dump(2) + "\n");
    return outcomes;
}

MetricsReport Pipeline::evaluate(const std::string& focal_glob) {
    auto manifest_text = read_file(manifest_path());
    if (!manifest_text)
        throw FatalError(FatalError::Kind::Config,
                         "no generation manifest at " + manifest_path().string() +
                             "; run generate first");
    nlohmann::json manifest = nlohmann::json::parse(*manifest_text, nullptr, false);
    if (manifest.is_discarded())
        throw FatalError(FatalError::Kind::Config, "corrupt generation manifest");

    if (!toolchain_.available())
        throw FatalError(FatalError::Kind::Environment, "C++ toolchain unavailable");

    ScanSummary summary = scan();
    const RepoIndex& index = summary.index;
    ConfigDependencies config_deps = config_dependencies(index);
    fs::path scratch = config_.out_dir / "scratch";
    std::vector<fs::path> written_test_files;

    std::vector<MethodRecord> records;
    for (const auto& entry : manifest.at("entries")) {
        std::string focal_id = entry.at("focal_id").get<std::string>();
        FocalMethod probe;
        probe.id = focal_id;
        probe.name = focal_id;
        if (!matches(probe, focal_glob)) continue;

        MethodRecord record;
        record.focal_id = focal_id;
        if (entry.at("failed").get<bool>()) {
            record.removed = true;
            record.notes.push_back("generation failed: " +
                                   entry.value("error", std::string{}));
            records.push_back(std::move(record));
            continue;
        }

        GeneratedTestFile tc;
        tc.focal_id = focal_id;
        tc.stage = stage_from_name(entry.value("stage", "rule_fixed"));
        tc.lineage = entry.value("lineage", std::vector<std::string>{});
        tc.notes = entry.value("notes", std::vector<std::string>{});
        auto source = read_file(fs::path(entry.at("file").get<std::string>()));
        if (!source) {
            record.removed = true;
            record.notes.push_back("generated file missing");
            records.push_back(std::move(record));
            continue;
        }
        tc.source = *source;
        record.test_cases_generated = count_test_cases(tc.source);

        // Find the focal method for coverage-span restriction.
        FocalMethod focal;
        for (auto& m : enumerate_focal_methods(index, config_.filters))
            if (m.id == focal_id) focal = m;
        StructuredFocalContext ctx;
        if (!focal.id.empty()) ctx = extract_focal_context(focal, index);

        auto compile_once = [&](const GeneratedTestFile& file, fs::path* binary) {
            fs::path test_file;
            CompileResult r = compile_test(file, index, config_deps, toolchain_, scratch,
                                           config_.coverage.flags, binary, &test_file);
            if (!test_file.empty()) written_test_files.push_back(test_file);
            return r;
        };

        fs::path binary;
        CompileResult compile = compile_once(tc, &binary);
        if (compile.status == CompileStatus::Failure) {
            tc = apply_compile_rules(std::move(tc), compile, ctx, index, catalog_);
            compile = compile_once(tc, &binary);
        }
        if (compile.status == CompileStatus::Failure) {
            try {
                tc = llm_fix(std::move(tc), compile, provider_, transcripts_,
                             config_.token_budget);
                compile = compile_once(tc, &binary);
            } catch (const PerMethodError& e) {
                record.notes.push_back(e.what());
            }
        }

        if (compile.status == CompileStatus::Failure) {
            record.removed = true;  // pruned from the final set
            record.failure_diagnostics = compile.diagnostics;
            record.notes.push_back("removed after failing compile");
        } else {
            record.test_cases_compiled = record.test_cases_generated;
            ExecLimits limits;
            limits.timeout_seconds = config_.exec_timeout_seconds;
            ExecResult exec = execute_test(toolchain_, binary, limits);
            if (exec.status == ExecStatus::Pass)
                record.test_cases_passed = record.test_cases_generated;
            else
                record.notes.push_back("execution status: " +
                                       std::to_string(static_cast<int>(exec.status)));

            if (config_.coverage.enabled && !config_.coverage.export_command.empty() &&
                !focal.id.empty()) {
                std::string cmd = substitute(config_.coverage.export_command, "{binary}",
                                             binary.string());
                cmd = substitute(cmd, "{profile}", (scratch / "default.profraw").string());
                // The export command writes the JSON document to stdout.
                fs::path export_file = scratch / (slugify(focal_id) + "_coverage.json");
                std::system((cmd + " > " + export_file.string()).c_str());
                auto export_text = read_file(export_file);
                if (export_text) record.coverage = parse_coverage(*export_text, focal);
                if (!record.coverage)
                    record.notes.push_back("coverage export unavailable or malformed");
            }
        }
        records.push_back(std::move(record));
    }

    // Leave the scanned repository as we found it.
    for (const fs::path& f : written_test_files) {
        std::error_code ec;
        fs::remove(f, ec);
    }

    MetricsReport report = aggregate_report(records, catalog_);
    fs::create_directories(config_.out_dir);
    write_file(report_path(), render_report_json(report));
    write_file(config_.out_dir / "report.txt", render_report_table(report));
    return report;
}

}  // namespace citywalk
