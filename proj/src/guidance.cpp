#include "citywalk/guidance.hpp"

#include <array>
#include <set>

#include <nlohmann/json.hpp>

namespace citywalk {

namespace {

struct PatternRow {
    ErrorPattern pattern;
    std::string_view name;
    std::string_view description;
};

constexpr std::array<PatternRow, 10> kPatterns{{
    {ErrorPattern::UndefinedSymbols, "UndefinedSymbols", "Missing or unresolved identifiers"},
    {ErrorPattern::Access, "Access", "Invalid access to class members"},
    {ErrorPattern::Type, "Type", "Type mismatches in expressions or assignments"},
    {ErrorPattern::TestSetup, "TestSetup", "Failure during initialization of tests"},
    {ErrorPattern::Linker, "Linker", "Cross-file linkage failure"},
    {ErrorPattern::Syntax, "Syntax", "Invalid syntax in C++ source files"},
    {ErrorPattern::Namespace, "Namespace", "Incorrect or missing namespace usage"},
    {ErrorPattern::MultipleDefinition, "MultipleDefinition",
     "Duplicate symbols defined in different files"},
    {ErrorPattern::Template, "Template", "Invalid usage of C++ templates"},
    {ErrorPattern::Other, "Other", "Miscellaneous unclassified errors"},
}};

GuidelineCategory category_for_id(const std::string& id) {
    if (starts_with(id, "A.")) return GuidelineCategory::CompilationError;
    if (starts_with(id, "B.")) return GuidelineCategory::ExecutionFailure;
    return GuidelineCategory::PoorCoverage;
}

GuidelineCategory category_from_name(const std::string& name) {
    if (name == "CompilationError") return GuidelineCategory::CompilationError;
    if (name == "ExecutionFailure") return GuidelineCategory::ExecutionFailure;
    if (name == "PoorCoverage") return GuidelineCategory::PoorCoverage;
    throw FatalError(FatalError::Kind::Config, "unknown guideline category: " + name);
}

std::vector<Guideline> builtin_guidelines() {
    auto g = [](const char* id, const char* text) {
        Guideline out;
        out.id = id;
        out.category = category_for_id(out.id);
        out.text = text;
        return out;
    };
    return {
        g("A.1", "Import all necessary dependencies with the correct paths."),
        g("A.2",
          "Use only the C++ standard libraries, imported third-party libraries, and provided "
          "methods."),
        g("A.3", "If gtest is not allowed, directly call test methods from the main function."),
        g("A.4", "Use the correct namespace throughout the tests."),
        g("A.5", "Properly handle static members by accessing them using the class name."),
        g("A.6",
          "Avoid invoking private methods or accessing private fields defined in the program."),
        g("B.1",
          "Choose appropriate assertions for the pointer data type, clearly distinguishing "
          "between address and content comparisons."),
        g("B.2", "For mocking (if using gmock), remember that only virtual methods can be "
                 "mocked."),
        g("C.1",
          "Ensure coverage of true and false branches for each conditional predicate at least "
          "once."),
        g("C.2",
          "Utilize non-terminating assertions (e.g., EXPECT_*) to maximize code coverage."),
    };
}

std::vector<ClassifierRule> builtin_rules() {
    auto r = [](const char* id, ErrorPattern p, std::vector<std::string> all_of,
                std::vector<std::string> any_of) {
        return ClassifierRule{id, p, std::move(all_of), std::move(any_of)};
    };
    return {
        r("undefined-symbols", ErrorPattern::UndefinedSymbols, {},
          {"undeclared identifier", "not declared"}),
        r("access", ErrorPattern::Access, {},
          {"private member", "protected member", "is private within this context",
           "is protected within this context", "is inaccessible"}),
        r("type", ErrorPattern::Type, {},
          {"cannot convert", "invalid operands", "no viable conversion",
           "invalid conversion", "incompatible type"}),
        r("linker", ErrorPattern::Linker, {},
          {"undefined reference", "unresolved external"}),
        r("syntax", ErrorPattern::Syntax, {"expected"},
          {";", ")", "}", "(", "primary-expression", "unqualified-id", "declaration",
           "initializer"}),
        r("namespace", ErrorPattern::Namespace, {}, {"namespace"}),
        r("multiple-definition", ErrorPattern::MultipleDefinition, {},
          {"multiple definition", "redefinition"}),
        r("template", ErrorPattern::Template, {}, {"template"}),
        r("test-setup", ErrorPattern::TestSetup, {},
          {"setup", "teardown", "testbody", "test fixture", "test_f"}),
    };
}

bool contains_ci(const std::string& haystack_lower, const std::string& needle) {
    return haystack_lower.find(to_lower(needle)) != std::string::npos;
}

}  // namespace

std::string_view pattern_name(ErrorPattern p) {
    for (const auto& row : kPatterns)
        if (row.pattern == p) return row.name;
    return "Other";
}

std::string_view pattern_description(ErrorPattern p) {
    for (const auto& row : kPatterns)
        if (row.pattern == p) return row.description;
    return kPatterns.back().description;
}

ErrorPattern pattern_from_name(std::string_view name) {
    for (const auto& row : kPatterns)
        if (row.name == name) return row.pattern;
    throw FatalError(FatalError::Kind::Config,
                     "unknown error pattern: " + std::string(name));
}

const GuidanceCatalog& GuidanceCatalog::builtin() {
    static const GuidanceCatalog catalog = [] {
        GuidanceCatalog c;
        c.guidelines_ = builtin_guidelines();
        c.rules_ = builtin_rules();
        c.validate();
        return c;
    }();
    return catalog;
}

void GuidanceCatalog::validate() const {
    static const std::set<std::string> kIds = {"A.1", "A.2", "A.3", "A.4", "A.5",
                                              "A.6", "B.1", "B.2", "C.1", "C.2"};
    std::set<std::string> seen;
    for (const Guideline& g : guidelines_) {
        if (!kIds.count(g.id))
            throw FatalError(FatalError::Kind::Config, "unknown guideline id: " + g.id);
        if (!seen.insert(g.id).second)
            throw FatalError(FatalError::Kind::Config, "duplicate guideline id: " + g.id);
        if (g.category != category_for_id(g.id))
            throw FatalError(FatalError::Kind::Config,
                             "guideline category does not match id prefix: " + g.id);
        if (g.text.empty())
            throw FatalError(FatalError::Kind::Config, "empty guideline text: " + g.id);
    }
    if (seen.size() != kIds.size())
        throw FatalError(FatalError::Kind::Config, "guideline catalog must hold all ten rules");

    std::set<std::string> rule_ids;
    for (const ClassifierRule& r : rules_) {
        if (r.id.empty())
            throw FatalError(FatalError::Kind::Config, "classifier rule with empty id");
        if (!rule_ids.insert(r.id).second)
            throw FatalError(FatalError::Kind::Config, "duplicate classifier rule id: " + r.id);
        if (r.pattern == ErrorPattern::Other)
            throw FatalError(FatalError::Kind::Config,
                             "rule " + r.id + " targets Other; Other is the implicit fallback");
        if (r.all_of.empty() && r.any_of.empty())
            throw FatalError(FatalError::Kind::Config, "rule " + r.id + " has no cues");
    }
}

GuidanceCatalog GuidanceCatalog::load(const fs::path& guidelines_json,
                                      const fs::path& rules_json) {
    auto parse = [](const fs::path& path, const char* schema) {
        auto text = read_file(path);
        if (!text)
            throw FatalError(FatalError::Kind::Config,
                             "cannot read data file: " + path.string());
        nlohmann::json j = nlohmann::json::parse(*text, nullptr, false);
        if (j.is_discarded())
            throw FatalError(FatalError::Kind::Config, "invalid JSON: " + path.string());
        if (j.value("schema", "") != schema || j.value("version", 0) != 1)
            throw FatalError(FatalError::Kind::Config,
                             "unsupported schema/version: " + path.string());
        return j;
    };

    GuidanceCatalog c;
    nlohmann::json jg = parse(guidelines_json, "citywalk-guidelines");
    for (const auto& e : jg.at("guidelines")) {
        Guideline g;
        g.id = e.at("id").get<std::string>();
        g.category = category_from_name(e.at("category").get<std::string>());
        g.text = e.at("text").get<std::string>();
        c.guidelines_.push_back(std::move(g));
    }
    nlohmann::json jr = parse(rules_json, "citywalk-classifier-rules");
    for (const auto& e : jr.at("rules")) {
        ClassifierRule r;
        r.id = e.at("id").get<std::string>();
        r.pattern = pattern_from_name(e.at("pattern").get<std::string>());
        r.all_of = e.value("all_of", std::vector<std::string>{});
        r.any_of = e.value("any_of", std::vector<std::string>{});
        c.rules_.push_back(std::move(r));
    }
    c.validate();
    return c;
}

std::vector<Guideline> GuidanceCatalog::guidelines_for(
    PromptStage stage, const ConfigDependencies& config_deps) const {
    bool gmock = false;
    for (const LibraryDep& lib : config_deps.libraries) {
        std::string n = to_lower(lib.name);
        if (n == "gmock" || n == "googlemock") gmock = true;
    }
    std::vector<Guideline> out;
    for (Guideline g : guidelines_) {
        if (stage == PromptStage::Generation &&
            g.category != GuidelineCategory::CompilationError)
            continue;
        if (g.id == "A.3") g.active = !config_deps.gtest_available;
        if (g.id == "B.2") g.active = gmock;
        out.push_back(std::move(g));
    }
    return out;
}

ErrorClassification GuidanceCatalog::classify_error(const std::string& diagnostic) const {
    ErrorClassification out;
    out.message = diagnostic;
    std::string lower = to_lower(diagnostic);
    for (const ClassifierRule& r : rules_) {
        bool ok = true;
        for (const std::string& cue : r.all_of)
            if (!contains_ci(lower, cue)) {
                ok = false;
                break;
            }
        if (ok && !r.any_of.empty()) {
            ok = false;
            for (const std::string& cue : r.any_of)
                if (contains_ci(lower, cue)) {
                    ok = true;
                    break;
                }
        }
        if (ok) {
            out.pattern = r.pattern;
            out.matched_rule = r.id;
            return out;
        }
    }
    out.pattern = ErrorPattern::Other;
    return out;
}

}  // namespace citywalk
