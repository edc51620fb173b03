#pragma once

#include <memory>
#include <string>
#include <vector>

#include "citywalk/config.hpp"
#include "citywalk/deps.hpp"
#include "citywalk/generation.hpp"
#include "citywalk/kb.hpp"
#include "citywalk/metrics.hpp"
#include "citywalk/postprocess.hpp"

namespace citywalk {

// Per-method generation outcome; failures are data, never aborts.
struct GenerationOutcome {
    GeneratedTestFile file;
    bool failed = false;
    std::string error;
};

struct ScanSummary {
    RepoIndex index;
    int focal_method_count = 0;
};

// End-to-end orchestrator. All effectful collaborators are injected so runs
// can be fully deterministic (scripted provider, hashing embedder, stub
// toolchain).
class Pipeline {
  public:
    Pipeline(RunConfig config, LLMProvider& provider, EmbeddingProvider& embedder,
             Toolchain& toolchain, const GuidanceCatalog& catalog,
             TranscriptRecorder* transcripts = nullptr);

    ScanSummary scan() const;

    // Stages 1-5 per focal method matching `focal_glob` (id or name): context
    // extraction, dependency analysis, retrieval, three prompting steps,
    // Phase-1 rules. Writes test files and a manifest under out_dir.
    std::vector<GenerationOutcome> generate(const std::string& focal_glob = "*");

    // Compiles each generated file (Phase 2 and the single llm_fix round on
    // failure), executes survivors, optionally collects coverage, and writes
    // report.json plus the rendered table. Never aborts on per-method faults.
    MetricsReport evaluate(const std::string& focal_glob = "*");

    ConfigDependencies config_dependencies(const RepoIndex& index) const;
    KnowledgeBase knowledge_base(const RepoIndex& index);

    fs::path tests_dir() const;
    fs::path manifest_path() const;
    fs::path report_path() const;

  private:
    RunConfig config_;
    LLMProvider& provider_;
    EmbeddingProvider& embedder_;
    Toolchain& toolchain_;
    const GuidanceCatalog& catalog_;
    TranscriptRecorder* transcripts_;

    GenerationOutcome generate_one(const FocalMethod& focal, const RepoIndex& index,
                                   const ConfigDependencies& config_deps,
                                   const KnowledgeBase& kb);
};

}  // namespace citywalk
