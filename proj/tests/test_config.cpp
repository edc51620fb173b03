#include <cstdlib>

#include "citywalk/config.hpp"
#include "doctest.h"

using namespace citywalk;

namespace {

fs::path write_config(const char* name, const std::string& body) {
    fs::path dir = fs::temp_directory_path() / "citywalk_config";
    fs::create_directories(dir);
    fs::path path = dir / name;
    write_file(path, body);
    return path;
}

}  // namespace

TEST_CASE("config defaults survive an empty document") {
    RunConfig cfg = RunConfig::load(write_config("empty.json", "{}"));
    CHECK(cfg.project_root == fs::path("."));
    CHECK(cfg.provider.kind == "mock");
    CHECK(cfg.provider.api_key_env == "CITYWALK_API_KEY");
    CHECK(cfg.embedding.kind == "hashing");
    CHECK(cfg.embedding.dimension == 64);
    CHECK_FALSE(cfg.coverage.enabled);
    CHECK(cfg.workers == 1);
    CHECK(cfg.token_budget == 16000);
    CHECK(cfg.exec_timeout_seconds == doctest::Approx(10.0));
    CHECK(cfg.out_dir == fs::path("out/citywalk"));
    CHECK(cfg.compiler == "g++");
    CHECK_FALSE(cfg.stub_toolchain);
}

TEST_CASE("config round-trips explicit values") {
    RunConfig cfg = RunConfig::load(write_config("full.json", R"({
      "project_root": "/work/repo",
      "test_dir": "tests",
      "include_roots": ["include", "src"],
      "provider": {"kind": "http", "endpoint": "https://api.example/v1/chat/completions",
                   "model": "m-1", "api_key_env": "MY_KEY"},
      "embedding": {"kind": "hashing", "dimension": 32},
      "coverage": {"enabled": true, "flags": ["-fprofile-instr-generate"],
                   "export_command": "llvm-cov export {binary}"},
      "workers": 4,
      "token_budget": 9000,
      "exec_timeout_seconds": 2.5,
      "filters": {"min_body_lines": 3, "exclude_name_globs": ["operator*"]},
      "out_dir": "scratch/out",
      "compiler": "g++-12",
      "stub_toolchain": true,
      "save_transcripts": true,
      "rebuild_kb": true
    })"));
    CHECK(cfg.project_root == fs::path("/work/repo"));
    CHECK(cfg.include_roots.size() == 2);
    CHECK(cfg.provider.kind == "http");
    CHECK(cfg.provider.api_key_env == "MY_KEY");
    CHECK(cfg.embedding.dimension == 32);
    CHECK(cfg.coverage.enabled);
    CHECK(cfg.coverage.flags.size() == 1);
    CHECK(cfg.workers == 4);
    CHECK(cfg.token_budget == 9000);
    CHECK(cfg.exec_timeout_seconds == doctest::Approx(2.5));
    CHECK(cfg.filters.min_body_lines == 3);
    CHECK(cfg.filters.exclude_name_globs == std::vector<std::string>{"operator*"});
    CHECK(cfg.compiler == "g++-12");
    CHECK(cfg.stub_toolchain);
    CHECK(cfg.save_transcripts);
    CHECK(cfg.rebuild_kb);
}

TEST_CASE("unknown keys are rejected at the top level and nested") {
    CHECK_THROWS_AS(RunConfig::load(write_config("u1.json", R"({"projcet_root": "x"})")),
                    FatalError);
    CHECK_THROWS_AS(
        RunConfig::load(write_config("u2.json", R"({"provider": {"kid": "mock"}})")),
        FatalError);
    CHECK_THROWS_AS(
        RunConfig::load(write_config("u3.json", R"({"coverage": {"enable": true}})")),
        FatalError);
    CHECK_THROWS_AS(
        RunConfig::load(write_config("u4.json", R"({"filters": {"min_lines": 1}})")),
        FatalError);
    try {
        RunConfig::load(write_config("u2.json", R"({"provider": {"kid": "mock"}})"));
        FAIL("expected FatalError");
    } catch (const FatalError& e) {
        CHECK(e.kind == FatalError::Kind::Config);
        CHECK(std::string(e.what()).find("provider.kid") != std::string::npos);
    }
}

TEST_CASE("inline api_key is rejected; secrets come from the environment only") {
    CHECK_THROWS_AS(RunConfig::load(write_config(
                        "key.json", R"({"provider": {"kind": "http", "api_key": "sk-x"}})")),
                    FatalError);
}

TEST_CASE("api key resolves through the configured environment variable") {
    RunConfig cfg = RunConfig::load(
        write_config("env.json", R"({"provider": {"api_key_env": "CITYWALK_TEST_KEY"}})"));
    ::unsetenv("CITYWALK_TEST_KEY");
    CHECK(cfg.resolve_api_key().empty());
    ::setenv("CITYWALK_TEST_KEY", "sk-test-123", 1);
    CHECK(cfg.resolve_api_key() == "sk-test-123");
    ::unsetenv("CITYWALK_TEST_KEY");
}

TEST_CASE("kind and bound validation") {
    CHECK_THROWS_AS(
        RunConfig::load(write_config("k1.json", R"({"provider": {"kind": "local"}})")),
        FatalError);
    CHECK_THROWS_AS(
        RunConfig::load(write_config("k2.json", R"({"embedding": {"kind": "tfidf"}})")),
        FatalError);
    CHECK_THROWS_AS(
        RunConfig::load(write_config("k3.json", R"({"embedding": {"dimension": 0}})")),
        FatalError);
    CHECK_THROWS_AS(RunConfig::load(write_config("k4.json", R"({"workers": 0})")),
                    FatalError);
    CHECK_THROWS_AS(RunConfig::load(write_config("k5.json", R"({"token_budget": 0})")),
                    FatalError);
    CHECK_THROWS_AS(
        RunConfig::load(write_config("k6.json", R"({"exec_timeout_seconds": 0})")),
        FatalError);
}

TEST_CASE("unreadable or malformed config files are config faults") {
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/citywalk.json"), FatalError);
    CHECK_THROWS_AS(RunConfig::load(write_config("bad.json", "{ not json")), FatalError);
    CHECK_THROWS_AS(RunConfig::load(write_config("arr.json", "[1,2]")), FatalError);
}
