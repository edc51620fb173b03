#include <algorithm>

#include "citywalk/repo_model.hpp"
#include "doctest.h"

using namespace citywalk;

namespace {
const fs::path kFixtures = CITYWALK_FIXTURES_DIR;
}

TEST_CASE("scan_repository classifies the basic fixture") {
    RepoIndex index = scan_repository(kFixtures / "repo_basic");
    // build/ is excluded by default, test/ contents still scanned.
    REQUIRE(index.source_files.size() == 2);  // a.cpp + test/test_main.cpp
    CHECK(index.header_files.size() == 1);
    CHECK(index.config_files.size() == 1);
    CHECK(index.doc_files.size() == 1);
    for (const auto& p : index.source_files) CHECK(p.string().find("build") == std::string::npos);
    CHECK(index.test_dir == index.root / "test");
}

TEST_CASE("scan_repository on an empty directory") {
    fs::path dir = fs::temp_directory_path() / "citywalk_empty_scan";
    fs::create_directories(dir);
    RepoIndex index = scan_repository(dir);
    CHECK(index.source_files.empty());
    CHECK(index.header_files.empty());
    CHECK(index.config_files.empty());
    CHECK(index.doc_files.empty());
}

TEST_CASE("scan_repository rejects a missing root") {
    CHECK_THROWS_AS(scan_repository(kFixtures / "no_such_repo"), FatalError);
}

TEST_CASE("enumerate_focal_methods finds definitions in line order") {
    RepoIndex index = scan_repository(kFixtures / "repo_basic");
    FocalFilters filters;
    filters.min_body_lines = 1;
    auto methods = enumerate_focal_methods(index, filters);
    REQUIRE(methods.size() == 3);  // test/ excluded
    CHECK(methods[0].name == "twice");
    CHECK(methods[1].name == "clamp_positive");
    CHECK(methods[2].name == "sum_to");
    CHECK(methods[0].line_start < methods[1].line_start);

    // Determinism: a second scan yields an identical list.
    auto again = enumerate_focal_methods(scan_repository(kFixtures / "repo_basic"), filters);
    REQUIRE(again.size() == methods.size());
    for (std::size_t i = 0; i < methods.size(); ++i) {
        CHECK(again[i].id == methods[i].id);
        CHECK(again[i].body == methods[i].body);
        CHECK(again[i].line_start == methods[i].line_start);
    }
}

TEST_CASE("slice fidelity: body re-reads byte-for-byte") {
    RepoIndex index = scan_repository(kFixtures / "repo_basic");
    FocalFilters filters;
    filters.min_body_lines = 1;
    for (const auto& m : enumerate_focal_methods(index, filters)) {
        auto source = read_file(m.file);
        REQUIRE(source);
        CHECK(m.body == slice_lines(*source, m.line_start, m.line_end));
    }
}

TEST_CASE("min_body_lines filter drops one-line bodies") {
    RepoIndex index = scan_repository(kFixtures / "repo_basic");
    FocalFilters filters;
    filters.min_body_lines = 2;
    auto methods = enumerate_focal_methods(index, filters);
    REQUIRE(methods.size() == 2);
    CHECK(methods[0].name == "clamp_positive");
    CHECK(methods[1].name == "sum_to");
}

TEST_CASE("cyclomatic complexity") {
    CHECK(cyclomatic_complexity("{ return 1; }") == 1);
    CHECK(cyclomatic_complexity("{ if (a) {} for (;;) {} }") == 3);
    CHECK(cyclomatic_complexity("{ if (a && b) {} else if (c) {} else if (d) {} }") == 5);
    RepoIndex index = scan_repository(kFixtures / "repo_basic");
    FocalFilters filters;
    filters.min_body_lines = 1;
    for (const auto& m : enumerate_focal_methods(index, filters))
        CHECK(m.cyclomatic_complexity >= 1);
}

TEST_CASE("extract_focal_context categorizes imports and finds siblings") {
    RepoIndex index = scan_repository(kFixtures / "repo_convert");
    FocalFilters filters;
    filters.min_body_lines = 1;
    auto methods = enumerate_focal_methods(index, filters);
    auto it = std::find_if(methods.begin(), methods.end(),
                           [](const FocalMethod& m) { return m.name == "decode"; });
    REQUIRE(it != methods.end());
    CHECK(it->class_name == "convert");

    StructuredFocalContext ctx = extract_focal_context(*it, index);
    CHECK(std::count(ctx.std_imports.begin(), ctx.std_imports.end(), "#include <string>") == 1);
    CHECK(std::count(ctx.user_imports.begin(), ctx.user_imports.end(), "#include \"convert.h\"") == 1);
    CHECK(std::count(ctx.user_imports.begin(), ctx.user_imports.end(), "#include \"node.h\"") == 1);
    CHECK(ctx.third_party_imports.empty());

    REQUIRE(!ctx.namespaces.empty());
    CHECK(ctx.namespaces[0] == "YAML");

    // encode is a sibling; decode itself is excluded.
    bool has_encode = false, has_decode = false;
    for (const auto& sig : ctx.sibling_signatures) {
        if (sig.find("encode") != std::string::npos) has_encode = true;
        if (sig.find("decode") != std::string::npos) has_decode = true;
    }
    CHECK(has_encode);
    CHECK_FALSE(has_decode);
}

TEST_CASE("import categorization covers the three forms") {
    fs::path dir = fs::temp_directory_path() / "citywalk_import_repo";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_file(dir / "m.cpp",
               "#include <string>\n#include <gtest/gtest.h>\n#include \"m.h\"\n"
               "int probe_imports() {\n  int v = 1;\n  return v;\n}\n");
    write_file(dir / "m.h", "#pragma once\n");
    RepoIndex index = scan_repository(dir);
    FocalFilters filters;
    filters.min_body_lines = 1;
    auto methods = enumerate_focal_methods(index, filters);
    REQUIRE(methods.size() == 1);
    StructuredFocalContext ctx = extract_focal_context(methods[0], index);
    CHECK(ctx.std_imports == std::vector<std::string>{"#include <string>"});
    CHECK(ctx.third_party_imports == std::vector<std::string>{"#include <gtest/gtest.h>"});
    CHECK(ctx.user_imports == std::vector<std::string>{"#include \"m.h\""});
}

TEST_CASE("free function context has no siblings") {
    RepoIndex index = scan_repository(kFixtures / "repo_basic");
    FocalFilters filters;
    filters.min_body_lines = 1;
    auto methods = enumerate_focal_methods(index, filters);
    REQUIRE(!methods.empty());
    StructuredFocalContext ctx = extract_focal_context(methods[0], index);
    CHECK(ctx.sibling_signatures.empty());
    CHECK(ctx.class_fields.empty());
}
