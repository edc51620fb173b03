// Acceptance harness: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Everything runs against committed fixtures with the
// deterministic collaborators (scripted provider, hashing embedder, stub
// toolchain) except the repair-rule criterion, which uses the real compiler.
#include <chrono>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "citywalk/http_providers.hpp"
#include "citywalk/pipeline.hpp"

using namespace citywalk;

namespace {

const fs::path kFixtures = CITYWALK_FIXTURES_DIR;

int g_failures = 0;

void report(int criterion, const std::string& label, bool ok,
            const std::string& detail = {}) {
    std::cout << "criterion " << criterion << ": " << (ok ? "PASS" : "FAIL") << " - "
              << label;
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++g_failures;
}

RunConfig fixture_config(const std::string& repo, const fs::path& out_dir) {
    RunConfig cfg;
    cfg.project_root = kFixtures / repo;
    cfg.out_dir = out_dir;
    cfg.rebuild_kb = true;
    return cfg;
}

struct RunArtifacts {
    std::map<std::string, std::string> test_files;  // name -> bytes
    std::string report_json;
    std::vector<LLMRequest> requests;
};

RunArtifacts run_full_pipeline(const std::string& repo, const fs::path& script,
                               const fs::path& out_dir,
                               std::vector<StubToolchain::Verdict> verdicts = {},
                               bool save_transcripts = false) {
    fs::remove_all(out_dir);
    RunConfig cfg = fixture_config(repo, out_dir);
    cfg.save_transcripts = save_transcripts;

    ScriptedMockProvider provider(ScriptedMockProvider::script_from_file(script));
    HashingEmbedder embedder;
    StubToolchain toolchain(std::move(verdicts));
    TranscriptRecorder transcripts(out_dir / "transcripts");
    Pipeline pipeline(cfg, provider, embedder, toolchain, GuidanceCatalog::builtin(),
                      save_transcripts ? &transcripts : nullptr);
    pipeline.generate();
    pipeline.evaluate();

    RunArtifacts artifacts;
    for (const auto& entry : fs::directory_iterator(out_dir / "tests"))
        artifacts.test_files[entry.path().filename().string()] =
            read_file(entry.path()).value_or("");
    artifacts.report_json = read_file(out_dir / "report.json").value_or("");
    artifacts.requests = provider.calls();
    return artifacts;
}

// --- criterion 1: end-to-end determinism ------------------------------------

std::vector<LLMRequest> g_recorded_requests;  // feeds criterion 10

void criterion_determinism() {
    fs::path base = fs::temp_directory_path() / "citywalk_acceptance";
    auto start = std::chrono::steady_clock::now();
    RunArtifacts run1 = run_full_pipeline("repo_basic", kFixtures / "mock_script_basic.json",
                                          base / "det1");
    RunArtifacts run2 = run_full_pipeline("repo_basic", kFixtures / "mock_script_basic.json",
                                          base / "det2");
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& r : run1.requests) g_recorded_requests.push_back(r);
    for (const auto& r : run2.requests) g_recorded_requests.push_back(r);

    bool ok = !run1.test_files.empty() && run1.test_files == run2.test_files &&
              !run1.report_json.empty() && run1.report_json == run2.report_json &&
              seconds < 60.0;
    std::ostringstream detail;
    detail << "files=" << run1.test_files.size() << " identical="
           << (run1.test_files == run2.test_files) << " reports-identical="
           << (run1.report_json == run2.report_json) << " seconds=" << seconds;
    report(1, "two identical pipeline runs produce byte-identical tests and reports",
           ok, detail.str());
}

// --- criterion 2: configuration dependency extraction -----------------------

void criterion_config_extraction() {
    RepoIndex convert = scan_repository(kFixtures / "repo_convert");
    ConfigDependencies deps = extract_config_dependencies(convert);
    bool convert_ok = deps.libraries.size() == 1 && deps.libraries[0].name == "gtest" &&
                      deps.libraries[0].version == std::optional<std::string>("1.11.0") &&
                      deps.cxx_standard == std::optional<std::string>("11") &&
                      deps.gtest_available;

    RepoIndex chain = scan_repository(kFixtures / "repo_chain");
    ConfigDependencies none = extract_config_dependencies(chain);
    bool chain_ok = none.libraries.empty() && !none.cxx_standard && !none.gtest_available;

    auto active_a3 = [](const std::vector<Guideline>& gs) {
        for (const auto& g : gs)
            if (g.id == "A.3") return g.active;
        return false;
    };
    const GuidanceCatalog& catalog = GuidanceCatalog::builtin();
    bool a3_ok = active_a3(catalog.guidelines_for(PromptStage::Generation, none)) &&
                 !active_a3(catalog.guidelines_for(PromptStage::Generation, deps));

    report(2, "CMake extraction yields {gtest 1.11.0, C++11, gtest on} and a CMake-less "
              "repo activates A.3",
           convert_ok && chain_ok && a3_ok);
}

// --- criterion 3: two-layer dependency depth cap ----------------------------

void criterion_depth_cap() {
    RepoIndex index = scan_repository(kFixtures / "repo_chain");
    std::vector<FocalMethod> methods = enumerate_focal_methods(index);
    bool ok = methods.size() == 1 && methods[0].name == "entry";
    if (ok) {
        auto edges = build_include_graph(methods[0].file, index, 2);
        bool has_b1 = false, has_c2 = false, mentions_d = false;
        for (const auto& e : edges) {
            if (e.to.filename() == "b.h" && e.layer == 1) has_b1 = true;
            if (e.from.filename() == "b.h" && e.to.filename() == "c.h" && e.layer == 2)
                has_c2 = true;
            if (e.to.filename() == "d.h" || e.from.filename() == "d.h") mentions_d = true;
        }
        CrossFileDependencies cross =
            extract_cross_file_dependencies(methods[0], edges, index);
        bool entries_ok =
            cross.entries.size() == 2 && cross.entries[0].symbol == "b_helper" &&
            cross.entries[0].declaring_file.filename() == "b.h" &&
            cross.entries[0].layer == 1 && cross.entries[1].symbol == "c_helper" &&
            cross.entries[1].declaring_file.filename() == "c.h" &&
            cross.entries[1].layer == 2;
        bool chain_ok = cross.chain.size() == 3 && cross.chain[0].filename() == "a.cpp" &&
                        cross.chain[1].filename() == "b.h" &&
                        cross.chain[2].filename() == "c.h";
        ok = has_b1 && has_c2 && !mentions_d && entries_ok && chain_ok;
    }
    report(3, "include walk stops at layer 2: a.cpp -> b.h -> c.h, d.h never contributes",
           ok);
}

// --- criterion 4: signature-verified code-example retrieval -----------------

void criterion_code_retrieval() {
    CodeStore store;
    store.chunks.push_back({"use_double", "/repo/u1.cpp", CodeChunkKind::Method, "caller1",
                            {}, "void caller1() { double r = f(3.5); (void)r; }"});
    store.chunks.push_back({"use_int", "/repo/u2.cpp", CodeChunkKind::Method, "caller2",
                            {}, "void caller2() { double r = f(1); (void)r; }"});
    store.chunks.push_back({"use_string", "/repo/u3.cpp", CodeChunkKind::Method, "caller3",
                            {}, "void caller3() { double r = f(\"x\"); (void)r; }"});

    FocalMethod focal;
    focal.name = "f";
    focal.param_types = {"double"};
    focal.file = "/repo/f.cpp";

    auto hits = retrieve_code_examples(focal, store);
    bool ok = hits.size() == 1 && hits[0].chunk_id == "use_double" &&
              hits[0].score == 1.0;
    report(4, "code retrieval keeps only the call whose literal matches f(double)", ok);
}

// --- criterion 5: vectorized doc retrieval ----------------------------------

void criterion_doc_retrieval() {
    HashingEmbedder embedder;
    DocStore store;
    store.dimension = embedder.dimension();
    // Single-token texts occupy exactly one hash bucket, so identical text
    // scores exactly 1.0 and distinct tokens are orthogonal (or collide to a
    // full +/-1, never a partial overlap).
    store.chunks.push_back({"doc_alpha", "/d/a.md", {}, "alpha alpha alpha", {}});
    store.chunks.push_back({"doc_beta", "/d/b.md", {}, "beta beta beta", {}});
    store.chunks.push_back({"doc_tie_b", "/d/t2.md", {}, "gamma gamma gamma", {}});
    store.chunks.push_back({"doc_tie_a", "/d/t1.md", {}, "gamma gamma gamma", {}});
    embed_chunks(store.chunks, embedder);

    auto exact = retrieve_docs("alpha alpha alpha", store, embedder, 1);
    bool exact_ok = exact.size() == 1 && exact[0].chunk_id == "doc_alpha" &&
                    std::abs(exact[0].score - 1.0) <= 1e-9;

    auto tie = retrieve_docs("gamma gamma gamma", store, embedder, 2);
    bool tie_ok = tie.size() == 2 && tie[0].chunk_id == "doc_tie_a" &&
                  tie[1].chunk_id == "doc_tie_b" &&
                  std::abs(tie[0].score - tie[1].score) <= 1e-9;

    report(5, "identical doc text scores 1.0 and equal scores break ties by chunk id",
           exact_ok && tie_ok);
}

// --- criterion 6: repair rules flip compile status under the real compiler --

void criterion_repair_rules() {
    RealToolchain toolchain;
    if (!toolchain.available()) {
        report(6, "repair rules flip real compile failures to successes", false,
               "no compiler available");
        return;
    }
    fs::path scratch = fs::temp_directory_path() / "citywalk_acceptance" / "repair";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    RepoIndex basic = scan_repository(kFixtures / "repo_basic");
    ConfigDependencies basic_deps = extract_config_dependencies(basic);
    std::vector<FocalMethod> basic_methods = enumerate_focal_methods(basic);
    FocalMethod clamp;
    for (const auto& m : basic_methods)
        if (m.name == "clamp_positive") clamp = m;
    StructuredFocalContext clamp_ctx = extract_focal_context(clamp, basic);

    auto flip_syntax = [&](const std::string& label, const std::string& source) {
        GeneratedTestFile tc;
        tc.focal_id = "acceptance_" + label;
        tc.source = source;
        CompileResult before = compile_test(tc, basic, basic_deps, toolchain, scratch);
        GeneratedTestFile fixed = apply_syntax_rules(std::move(tc), clamp_ctx, basic_deps);
        CompileResult after = compile_test(fixed, basic, basic_deps, toolchain, scratch);
        return before.status == CompileStatus::Failure &&
               after.status == CompileStatus::Success;
    };

    bool brace_ok = flip_syntax("brace",
                                "#include \"a.h\"\n"
                                "int cw = 0;\n"
                                "void test_negative() {\n"
                                "  if (clamp_positive(-1) != 0) ++cw;\n");

    bool mains_ok = flip_syntax("mains",
                                "#include \"a.h\"\n"
                                "int main() { return clamp_positive(-1); }\n"
                                "int main() { return clamp_positive(2) - 2; }\n");

    // Phase 2: an include that resolves nowhere in the repository is deleted
    // once the real diagnostics name it.
    GeneratedTestFile bad_include;
    bad_include.focal_id = "acceptance_include";
    bad_include.source =
        "#include \"a.h\"\n"
        "#include \"missing_helper.h\"\n"
        "int main() { return clamp_positive(-3); }\n";
    CompileResult inc_before =
        compile_test(bad_include, basic, basic_deps, toolchain, scratch);
    GeneratedTestFile inc_fixed = apply_compile_rules(std::move(bad_include), inc_before,
                                                      clamp_ctx, basic);
    CompileResult inc_after = compile_test(inc_fixed, basic, basic_deps, toolchain, scratch);
    bool include_ok = inc_before.status == CompileStatus::Failure &&
                      inc_after.status == CompileStatus::Success;

    // Phase 2: a Namespace-classified diagnostic inserts the focal file's
    // using-directive. The before/after compiles are real; the classifying
    // diagnostic uses the canonical clang shape.
    RepoIndex convert = scan_repository(kFixtures / "repo_convert");
    ConfigDependencies convert_deps = extract_config_dependencies(convert);
    std::vector<FocalMethod> convert_methods = enumerate_focal_methods(convert);
    FocalMethod decode;
    for (const auto& m : convert_methods)
        if (m.name == "decode") decode = m;
    StructuredFocalContext decode_ctx = extract_focal_context(decode, convert);

    GeneratedTestFile no_ns;
    no_ns.focal_id = "acceptance_namespace";
    no_ns.source =
        "#include \"convert.h\"\n"
        "#include <string>\n"
        "int main() {\n"
        "  Node n;\n"
        "  n.SetScalar(\"v\");\n"
        "  std::string out;\n"
        "  bool ok = convert::decode(n, out);\n"
        "  return ok && out == \"v\" ? 0 : 1;\n"
        "}\n";
    CompileResult ns_before = compile_test(no_ns, convert, convert_deps, toolchain, scratch);
    CompileResult ns_classifiable = ns_before;
    ns_classifiable.diagnostics = {
        "test.cpp:4:3: error: no member named 'Node' in namespace 'YAML'"};
    GeneratedTestFile ns_fixed = apply_compile_rules(std::move(no_ns), ns_classifiable,
                                                     decode_ctx, convert);
    CompileResult ns_after = compile_test(ns_fixed, convert, convert_deps, toolchain, scratch);
    bool namespace_ok = ns_before.status == CompileStatus::Failure &&
                        ns_fixed.source.find("using namespace YAML;") != std::string::npos &&
                        ns_after.status == CompileStatus::Success;

    std::ostringstream detail;
    detail << "brace=" << brace_ok << " mains=" << mains_ok << " include=" << include_ok
           << " namespace=" << namespace_ok;
    report(6, "syntax and compile repair rules flip real g++ failures to successes",
           brace_ok && mains_ok && include_ok && namespace_ok, detail.str());
}

// --- criterion 7: llm_fix firewall and single-round guarantee ---------------

void criterion_fix_firewall() {
    fs::path out_dir = fs::temp_directory_path() / "citywalk_acceptance" / "fixrun";
    const char* sentinel = "EXEC-OUTPUT-SENTINEL";

    std::vector<StubToolchain::Verdict> verdicts;
    StubToolchain::Verdict fail_clamp;
    fail_clamp.match = "cw_marker_clamp refined";
    fail_clamp.compile.status = CompileStatus::Failure;
    fail_clamp.compile.diagnostics = {
        "citywalk_test.cpp:9:41: error: expected ';' before '}' token"};
    verdicts.push_back(fail_clamp);
    StubToolchain::Verdict pass_all;
    pass_all.compile.status = CompileStatus::Success;
    pass_all.exec.status = ExecStatus::Pass;
    pass_all.exec.stdout_text = std::string(sentinel) + " run ok";
    verdicts.push_back(pass_all);

    RunArtifacts run =
        run_full_pipeline("repo_basic", kFixtures / "mock_script_basic_fix.json", out_dir,
                          verdicts, /*save_transcripts=*/true);
    for (const auto& r : run.requests) g_recorded_requests.push_back(r);

    int fix_transcripts = 0;
    int clamp_fix_transcripts = 0;
    bool sentinel_leaked = false;
    bool fix_has_diagnostics = false;
    for (const auto& focal_dir : fs::directory_iterator(out_dir / "transcripts")) {
        for (const auto& entry : fs::directory_iterator(focal_dir.path())) {
            std::string text = read_file(entry.path()).value_or("");
            if (text.find(sentinel) != std::string::npos) sentinel_leaked = true;
            if (entry.path().filename().string().find("llm_fix") != std::string::npos) {
                ++fix_transcripts;
                if (focal_dir.path().filename().string().find("clamp") != std::string::npos)
                    ++clamp_fix_transcripts;
                if (text.find("expected ';' before '}' token") != std::string::npos)
                    fix_has_diagnostics = true;
            }
        }
    }

    nlohmann::json rep = nlohmann::json::parse(run.report_json);
    bool all_compiled =
        rep["counts"]["removed"] == 0 && rep["counts"]["compiled"] == rep["counts"]["generated"];

    std::ostringstream detail;
    detail << "fix_transcripts=" << fix_transcripts << " clamp=" << clamp_fix_transcripts
           << " sentinel_leaked=" << sentinel_leaked << " diags=" << fix_has_diagnostics
           << " all_compiled=" << all_compiled;
    report(7, "llm_fix runs once, only after the Phase-2 compile fails, and its prompt "
              "carries diagnostics but no execution output",
           fix_transcripts == 1 && clamp_fix_transcripts == 1 && !sentinel_leaked &&
               fix_has_diagnostics && all_compiled,
           detail.str());
}

// --- criterion 8: correctness and coverage arithmetic -----------------------

void criterion_metrics() {
    std::vector<TestCaseResult> cases;
    for (int i = 0; i < 4; ++i) {
        TestCaseResult c;
        c.focal_id = "m" + std::to_string(i);
        c.test_name = "t" + std::to_string(i);
        c.compiled = i < 3;  // 3 of 4 compile
        c.passed = i < 2;    // 2 of 4 pass
        cases.push_back(c);
    }
    Correctness corr = compute_correctness(cases);
    bool corr_ok = corr.generated == 4 && corr.compiled == 3 && corr.passed == 2 &&
                   std::abs(corr.csr - 0.75) <= 1e-12 && std::abs(corr.epr - 0.50) <= 1e-12;

    std::string export_json =
        read_file(kFixtures / "coverage_export.json").value_or("");
    FocalMethod focal;
    focal.id = "calc";
    focal.file = "/work/src/calc.cpp";
    focal.line_start = 3;
    focal.line_end = 12;
    auto cov = parse_coverage(export_json, focal);
    bool cov_ok = cov && cov->lines_covered == 8 && cov->lines_total == 10 &&
                  cov->branches_covered == 3 && cov->branches_total == 4;

    MethodRecord r1;
    r1.focal_id = "m1";
    r1.coverage = CoverageRecord{"m1", 8, 10, 3, 4};
    MethodRecord r2;
    r2.focal_id = "m2";
    r2.coverage = CoverageRecord{"m2", 1, 5, 1, 2};
    MetricsReport agg = aggregate_report({r1, r2});
    // Ratio of sums: lines (8+1)/(10+5) = 60%, branches (3+1)/(4+2) = 66.7%.
    // A mean of per-method ratios would give 50% and 62.5% instead.
    bool agg_ok = agg.cov_l && std::abs(*agg.cov_l - 60.0) <= 1e-9 && agg.cov_b &&
                  std::abs(*agg.cov_b - 400.0 / 6.0) <= 1e-9 &&
                  render_report_json(agg).find("ratio-of-sums") != std::string::npos;

    std::ostringstream detail;
    detail << "correctness=" << corr_ok << " coverage=" << cov_ok << " aggregation="
           << agg_ok;
    report(8, "CSR 75%/EPR 50% arithmetic, 8/10 line and 3/4 branch parsing, "
              "ratio-of-sums aggregation",
           corr_ok && cov_ok && agg_ok, detail.str());
}

// --- criterion 9: diagnostics corpus classification -------------------------

void criterion_classifier_corpus() {
    std::string text =
        read_file(kFixtures / "diagnostics_corpus.json").value_or("");
    nlohmann::json corpus = nlohmann::json::parse(text, nullptr, false);
    if (corpus.is_discarded()) {
        report(9, "captured compiler diagnostics classify into their intended patterns",
               false, "corpus unreadable");
        return;
    }
    const GuidanceCatalog& catalog = GuidanceCatalog::builtin();
    int total = 0, correct = 0;
    std::string first_miss;
    for (const auto& entry : corpus.at("entries")) {
        ++total;
        std::string diagnostic = entry.at("diagnostic").get<std::string>();
        ErrorPattern expected = pattern_from_name(entry.at("expected").get<std::string>());
        ErrorClassification got = catalog.classify_error(diagnostic);
        if (got.pattern == expected)
            ++correct;
        else if (first_miss.empty())
            first_miss = diagnostic + " -> " + std::string(pattern_name(got.pattern));
    }
    std::ostringstream detail;
    detail << correct << "/" << total;
    if (!first_miss.empty()) detail << "; first miss: " << first_miss;
    report(9, "all " + std::to_string(total) +
                  " captured compiler diagnostics classify into their intended patterns",
           total >= 12 && correct == total, detail.str());
}

// --- criterion 10: decoding invariants on every recorded request ------------

void criterion_decoding_invariants() {
    bool ok = !g_recorded_requests.empty();
    std::string detail = "requests=" + std::to_string(g_recorded_requests.size());
    for (const auto& r : g_recorded_requests)
        if (r.temperature != 0.0 || r.choice_count != 1 || r.max_output_tokens != 4096) {
            ok = false;
            detail += "; violation in provider_id=" + r.provider_id;
            break;
        }
    report(10, "every provider request pins temperature 0, one choice, 4096 max tokens",
           ok, detail);
}

}  // namespace

int main() {
    criterion_determinism();
    criterion_config_extraction();
    criterion_depth_cap();
    criterion_code_retrieval();
    criterion_doc_retrieval();
    criterion_repair_rules();
    criterion_fix_firewall();
    criterion_metrics();
    criterion_classifier_corpus();
    criterion_decoding_invariants();

    std::cout << (g_failures == 0 ? "acceptance: all criteria passed"
                                  : "acceptance: " + std::to_string(g_failures) +
                                        " criterion(s) failed")
              << "\n";
    return g_failures == 0 ? 0 : 1;
}
