#pragma once

#include <string>
#include <vector>

#include "citywalk/generation.hpp"

namespace citywalk {

enum class CompileStatus { Success, Failure };

struct CompileResult {
    CompileStatus status = CompileStatus::Failure;
    std::vector<std::string> diagnostics;  // nonempty on failure
    std::string command;                   // exact invocation
    double duration_seconds = 0.0;
};

enum class ExecStatus { Pass, AssertionFailure, Crash, Timeout };

struct ExecResult {
    ExecStatus status = ExecStatus::Pass;
    std::string stdout_text;
    std::string stderr_text;
    double duration_seconds = 0.0;
};

struct ExecLimits {
    double timeout_seconds = 10.0;
};

// Phase 1 (Rule_Fs): purely lexical/structural repairs — bracket balancing by
// appending closers at end of file, include consolidation against the focal
// context, and main-function normalization. Total and idempotent on the text.
GeneratedTestFile apply_syntax_rules(GeneratedTestFile tc,
                                     const StructuredFocalContext& focal_ctx,
                                     const ConfigDependencies& config_deps);

// Phase 2 (Rule_Fc): consults the repository — inserts using-directives for
// Namespace-classified diagnostics and deletes includes that resolve nowhere.
GeneratedTestFile apply_compile_rules(GeneratedTestFile tc, const CompileResult& compile,
                                      const StructuredFocalContext& focal_ctx,
                                      const RepoIndex& index,
                                      const GuidanceCatalog& catalog = GuidanceCatalog::builtin());

// Phase 3: single LLM round. The prompt carries the failing file and its
// compile diagnostics only — never any execution output. A second call on the
// same lineage is rejected.
GeneratedTestFile llm_fix(GeneratedTestFile tc, const CompileResult& compile,
                          LLMProvider& provider, TranscriptRecorder* transcripts = nullptr,
                          int token_budget = kDefaultTokenBudget);

struct CompileJob {
    fs::path test_file;
    fs::path output_binary;
    std::vector<fs::path> include_roots;
    std::vector<fs::path> extra_sources;  // project sources linked directly
    std::string cxx_standard;             // empty: compiler default
    std::vector<std::string> coverage_flags;
};

class Toolchain {
  public:
    virtual ~Toolchain() = default;
    virtual bool available() const = 0;
    virtual CompileResult compile(const CompileJob& job) = 0;
    virtual ExecResult execute(const fs::path& binary, const ExecLimits& limits) = 0;
};

// Shells out to a real compiler (default g++) and runs binaries under a
// wall-clock timeout.
class RealToolchain final : public Toolchain {
  public:
    explicit RealToolchain(std::string compiler = "g++") : compiler_(std::move(compiler)) {}
    bool available() const override;
    CompileResult compile(const CompileJob& job) override;
    ExecResult execute(const fs::path& binary, const ExecLimits& limits) override;

  private:
    std::string compiler_;
};

// Deterministic double: scripted verdicts keyed by substrings of the test
// file contents, in order; unmatched files succeed.
class StubToolchain final : public Toolchain {
  public:
    struct Verdict {
        std::string match;  // substring of the test source; empty matches all
        CompileResult compile;
        ExecResult exec;
    };
    explicit StubToolchain(std::vector<Verdict> verdicts = {})
        : verdicts_(std::move(verdicts)) {}
    bool available() const override { return true; }
    CompileResult compile(const CompileJob& job) override;
    ExecResult execute(const fs::path& binary, const ExecLimits& limits) override;
    std::vector<CompileJob> jobs;

  private:
    std::vector<Verdict> verdicts_;
    ExecResult pending_exec_;
};

// Writes the namespaced test file (citywalk_test_<focal-id>.cpp) under the
// repository's test directory and compiles it against the project sources.
CompileResult compile_test(const GeneratedTestFile& tc, const RepoIndex& index,
                           const ConfigDependencies& config_deps, Toolchain& toolchain,
                           const fs::path& scratch_dir,
                           const std::vector<std::string>& coverage_flags = {},
                           fs::path* binary_out = nullptr,
                           fs::path* test_file_out = nullptr);

ExecResult execute_test(Toolchain& toolchain, const fs::path& binary,
                        const ExecLimits& limits = {});

}  // namespace citywalk
