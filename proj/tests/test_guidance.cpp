#include "citywalk/guidance.hpp"
#include "doctest.h"

using namespace citywalk;

namespace {

const fs::path kFixtures = CITYWALK_FIXTURES_DIR;
const fs::path kData = CITYWALK_DATA_DIR;

ConfigDependencies with_libs(std::vector<std::string> names, bool gtest) {
    ConfigDependencies deps;
    for (auto& n : names) {
        LibraryDep lib;
        lib.name = std::move(n);
        deps.libraries.push_back(std::move(lib));
    }
    deps.gtest_available = gtest;
    return deps;
}

}  // namespace

TEST_CASE("catalog texts are byte-identical to the golden file") {
    auto golden = read_file(kFixtures / "guidelines_golden.txt");
    REQUIRE(golden);
    std::string rendered;
    for (const Guideline& g : GuidanceCatalog::builtin().guidelines())
        rendered += g.id + "\t" + g.text + "\n";
    CHECK(rendered == *golden);
}

TEST_CASE("shipped data files load and match the built-in catalog") {
    GuidanceCatalog loaded =
        GuidanceCatalog::load(kData / "guidelines.json", kData / "classifier_rules.json");
    const auto& builtin = GuidanceCatalog::builtin();
    REQUIRE(loaded.guidelines().size() == builtin.guidelines().size());
    for (std::size_t i = 0; i < loaded.guidelines().size(); ++i) {
        CHECK(loaded.guidelines()[i].id == builtin.guidelines()[i].id);
        CHECK(loaded.guidelines()[i].text == builtin.guidelines()[i].text);
        CHECK(loaded.guidelines()[i].category == builtin.guidelines()[i].category);
    }
    REQUIRE(loaded.rules().size() == builtin.rules().size());
    for (std::size_t i = 0; i < loaded.rules().size(); ++i)
        CHECK(loaded.rules()[i].id == builtin.rules()[i].id);
}

TEST_CASE("loading rejects schema and content violations") {
    fs::path dir = fs::temp_directory_path() / "citywalk_guidance";
    fs::create_directories(dir);
    fs::path rules = kData / "classifier_rules.json";

    write_file(dir / "bad_schema.json", "{\"schema\":\"something-else\",\"version\":1}");
    CHECK_THROWS_AS(GuidanceCatalog::load(dir / "bad_schema.json", rules), FatalError);

    write_file(dir / "missing_rule.json",
               "{\"schema\":\"citywalk-guidelines\",\"version\":1,\"guidelines\":["
               "{\"id\":\"A.1\",\"category\":\"CompilationError\",\"text\":\"t\"}]}");
    CHECK_THROWS_AS(GuidanceCatalog::load(dir / "missing_rule.json", rules), FatalError);

    write_file(dir / "bad_category.json",
               "{\"schema\":\"citywalk-guidelines\",\"version\":1,\"guidelines\":["
               "{\"id\":\"A.1\",\"category\":\"PoorCoverage\",\"text\":\"t\"}]}");
    CHECK_THROWS_AS(GuidanceCatalog::load(dir / "bad_category.json", rules), FatalError);

    CHECK_THROWS_AS(GuidanceCatalog::load(dir / "nonexistent.json", rules), FatalError);
}

TEST_CASE("generation stage receives only the compilation guidelines") {
    auto gen = GuidanceCatalog::builtin().guidelines_for(PromptStage::Generation,
                                                         with_libs({}, true));
    REQUIRE(gen.size() == 6);
    for (const Guideline& g : gen) {
        CHECK(g.category == GuidelineCategory::CompilationError);
        CHECK(g.id[0] == 'A');
    }
}

TEST_CASE("refinement stage receives all ten; A.3 active without gtest") {
    const auto& catalog = GuidanceCatalog::builtin();

    auto without_gtest =
        catalog.guidelines_for(PromptStage::Refinement, with_libs({}, false));
    REQUIRE(without_gtest.size() == 10);
    for (const Guideline& g : without_gtest) {
        if (g.id == "A.3") CHECK(g.active);
        else CHECK_FALSE(g.active);
    }

    auto with_gtest = catalog.guidelines_for(PromptStage::Refinement,
                                             with_libs({"gtest"}, true));
    for (const Guideline& g : with_gtest) CHECK_FALSE(g.active);
}

TEST_CASE("B.2 is active when gmock is among the libraries") {
    auto gl = GuidanceCatalog::builtin().guidelines_for(PromptStage::Refinement,
                                                        with_libs({"gtest", "gmock"}, true));
    bool saw_b2 = false;
    for (const Guideline& g : gl)
        if (g.id == "B.2") {
            saw_b2 = true;
            CHECK(g.active);
        }
    CHECK(saw_b2);
}

TEST_CASE("classifier: spec examples map to the intended patterns") {
    const auto& c = GuidanceCatalog::builtin();
    CHECK(c.classify_error("use of undeclared identifier 'foo'").pattern ==
          ErrorPattern::UndefinedSymbols);
    CHECK(c.classify_error("'x' is a private member of 'C'").pattern == ErrorPattern::Access);
    CHECK(c.classify_error("undefined reference to `C::f()'").pattern == ErrorPattern::Linker);
    CHECK(c.classify_error("lorem ipsum").pattern == ErrorPattern::Other);
}

TEST_CASE("classifier: ordered rules and Other fallback invariants") {
    const auto& c = GuidanceCatalog::builtin();

    // First matching rule wins: a diagnostic with both an undeclared cue and
    // the word namespace lands on UndefinedSymbols.
    auto both = c.classify_error("error: 'id' was not declared in this scope; "
                                 "did you forget the namespace?");
    CHECK(both.pattern == ErrorPattern::UndefinedSymbols);
    CHECK(both.matched_rule == "undefined-symbols");

    auto other = c.classify_error("something entirely novel");
    CHECK(other.pattern == ErrorPattern::Other);
    CHECK(other.matched_rule.empty());
    CHECK(other.message == "something entirely novel");

    // Matched rule is nonempty for every non-Other result.
    auto typed = c.classify_error("cannot convert 'int' to 'const char*'");
    CHECK(typed.pattern == ErrorPattern::Type);
    CHECK_FALSE(typed.matched_rule.empty());
}

TEST_CASE("classifier is pure: same input, same output") {
    const auto& c = GuidanceCatalog::builtin();
    std::string diag = "multiple definition of `helper()'";
    auto a = c.classify_error(diag);
    auto b = c.classify_error(diag);
    CHECK(a.pattern == ErrorPattern::MultipleDefinition);
    CHECK(a.pattern == b.pattern);
    CHECK(a.matched_rule == b.matched_rule);
}

TEST_CASE("pattern name and description round-trip") {
    for (ErrorPattern p :
         {ErrorPattern::UndefinedSymbols, ErrorPattern::Access, ErrorPattern::Type,
          ErrorPattern::TestSetup, ErrorPattern::Linker, ErrorPattern::Syntax,
          ErrorPattern::Namespace, ErrorPattern::MultipleDefinition, ErrorPattern::Template,
          ErrorPattern::Other}) {
        CHECK(pattern_from_name(pattern_name(p)) == p);
        CHECK_FALSE(pattern_description(p).empty());
    }
    CHECK(pattern_description(ErrorPattern::Other) == "Miscellaneous unclassified errors");
    CHECK_THROWS_AS(pattern_from_name("NotAPattern"), FatalError);
}
