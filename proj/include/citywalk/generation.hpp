#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "citywalk/guidance.hpp"
#include "citywalk/llm.hpp"
#include "citywalk/repo_model.hpp"

namespace citywalk {

// Failure confined to one focal method; the pipeline records it and moves on.
struct PerMethodError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PromptStep { Understand, Generate, Refine, Fix };

// Contextual-information inputs, in their fixed prompt order. Empty sections
// are omitted from the rendered prompt.
struct PromptSections {
    std::string focal_context;  // never truncated
    std::string config_deps;
    std::string cross_file_deps;
    std::vector<std::string> intention_contexts;  // retrieved docs + code examples
    std::string intent_summary;
    std::string ingredients;
};

struct PromptBundle {
    std::string task_definition;
    std::string step_instructions;
    std::vector<std::pair<std::string, std::string>> contextual_sections;  // (title, body)
    std::string output_format;
    std::string rendered;
    int token_estimate = 0;
    std::vector<std::string> truncated_sections;  // titles dropped for budget
};

// chars/4 budgeting heuristic.
int estimate_tokens(std::string_view text);

inline constexpr int kDefaultTokenBudget = 16000;

// Inputs beyond the shared sections, keyed by step: refine/fix consume
// `prior_source`; refine consumes `guidelines`; fix consumes `diagnostics`.
struct PromptExtras {
    std::vector<Guideline> guidelines;
    std::string prior_source;
    std::string diagnostics;
};

// Renders the four-component prompt. Over budget, contextual sections are
// dropped in reverse priority (intention contexts first); the focal context
// is never dropped. Focal context alone over budget -> PerMethodError.
PromptBundle assemble_prompt(PromptStep step, const PromptSections& sections,
                             const PromptExtras& extras = {},
                             int token_budget = kDefaultTokenBudget);

struct IntentSummary {
    std::string intent;
    std::vector<std::string> ingredients;  // possibly empty, never "null"
    bool structured = true;  // false when the fallback parse was used
};

// Labeled-section parse ("INTENT:" / "INGREDIENTS:"); free prose falls back
// to whole-text intent with empty ingredients.
IntentSummary parse_intent_response(const std::string& text);

// First fenced code block (``` ... ```), language tag ignored; extra block
// count is reported through `extra_blocks` when provided.
std::optional<std::string> extract_first_code_block(const std::string& text,
                                                    int* extra_blocks = nullptr);

enum class TestStage { Initial, Refined, RuleFixed, LlmFixed };

struct GeneratedTestFile {
    std::string focal_id;
    std::string source;
    TestStage stage = TestStage::Initial;
    std::vector<std::string> lineage;  // producing operations, in order
    std::vector<std::string> notes;    // non-fatal observations
};

IntentSummary run_step1_understanding(const FocalMethod& focal, const PromptSections& sections,
                                      LLMProvider& provider,
                                      TranscriptRecorder* transcripts = nullptr,
                                      int token_budget = kDefaultTokenBudget);

// `guidelines` carries the generation-stage catalog (compilation rules only).
GeneratedTestFile run_step2_generate(const FocalMethod& focal, const PromptSections& sections,
                                     const IntentSummary& intent,
                                     const std::vector<Guideline>& guidelines,
                                     LLMProvider& provider,
                                     TranscriptRecorder* transcripts = nullptr,
                                     int token_budget = kDefaultTokenBudget);

GeneratedTestFile run_step3_refine(GeneratedTestFile tc,
                                   const std::vector<Guideline>& guidelines,
                                   LLMProvider& provider,
                                   TranscriptRecorder* transcripts = nullptr,
                                   int token_budget = kDefaultTokenBudget);

// Renders the contextual sections for a focal method from the analysis
// structures. Pure formatting; no provider involvement.
std::string render_focal_context(const StructuredFocalContext& ctx);
std::string render_config_deps(const ConfigDependencies& deps);
std::string render_cross_file_deps(const CrossFileDependencies& deps);

}  // namespace citywalk
