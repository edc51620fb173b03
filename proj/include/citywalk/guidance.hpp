#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "citywalk/deps.hpp"

namespace citywalk {

enum class GuidelineCategory { CompilationError, ExecutionFailure, PoorCoverage };

struct Guideline {
    std::string id;  // A.1–A.6, B.1–B.2, C.1–C.2
    GuidelineCategory category = GuidelineCategory::CompilationError;
    std::string text;    // verbatim catalog sentence
    bool active = false;  // situational emphasis (A.3 without gtest, B.2 with gmock)
};

// Closed ten-pattern taxonomy; Other is the fallback.
enum class ErrorPattern {
    UndefinedSymbols,
    Access,
    Type,
    TestSetup,
    Linker,
    Syntax,
    Namespace,
    MultipleDefinition,
    Template,
    Other,
};

std::string_view pattern_name(ErrorPattern p);
std::string_view pattern_description(ErrorPattern p);
// Throws FatalError(Config) for names outside the taxonomy.
ErrorPattern pattern_from_name(std::string_view name);

struct ErrorClassification {
    ErrorPattern pattern = ErrorPattern::Other;
    std::string matched_rule;  // empty only when pattern == Other
    std::string message;       // the diagnostic line as given
};

// One ordered substring rule. A diagnostic matches when every `all_of` cue
// appears and, if `any_of` is nonempty, at least one of them appears.
// Matching is case-insensitive.
struct ClassifierRule {
    std::string id;
    ErrorPattern pattern = ErrorPattern::Other;
    std::vector<std::string> all_of;
    std::vector<std::string> any_of;
};

enum class PromptStage { Generation, Refinement };

class GuidanceCatalog {
  public:
    // Built-in catalog and rules; identical to the shipped data files.
    static const GuidanceCatalog& builtin();
    // Loads from the editable data files; throws FatalError(Config) on
    // schema, version, or content violations.
    static GuidanceCatalog load(const fs::path& guidelines_json, const fs::path& rules_json);

    // Generation stage: compilation guidelines A.1–A.6 only.
    // Refinement stage: all ten. ACTIVE flags follow config_deps.
    std::vector<Guideline> guidelines_for(PromptStage stage,
                                          const ConfigDependencies& config_deps) const;

    // First matching rule over the ordered table wins; unmatched -> Other.
    // Pure: depends only on the diagnostic text.
    ErrorClassification classify_error(const std::string& diagnostic) const;

    const std::vector<Guideline>& guidelines() const { return guidelines_; }
    const std::vector<ClassifierRule>& rules() const { return rules_; }

  private:
    std::vector<Guideline> guidelines_;
    std::vector<ClassifierRule> rules_;
    void validate() const;
};

}  // namespace citywalk
