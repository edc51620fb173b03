#pragma once

#include <string>
#include <vector>

#include "citywalk/repo_model.hpp"

namespace citywalk {

struct ProviderSettings {
    std::string kind = "mock";  // "mock" | "http"
    std::string endpoint;
    std::string model;
    std::string api_key_env = "CITYWALK_API_KEY";  // secrets only via env
    fs::path mock_script;                          // mock kind only
};

struct EmbeddingSettings {
    std::string kind = "hashing";  // "hashing" | "http"
    int dimension = 64;
    std::string endpoint;
    std::string model;
    std::string api_key_env = "CITYWALK_EMBED_API_KEY";
};

struct CoverageSettings {
    bool enabled = false;
    std::vector<std::string> flags;  // instrumentation flags for the compile
    // Shell template producing the export JSON on stdout; placeholders
    // {binary} and {profile} are substituted.
    std::string export_command;
};

struct RunConfig {
    fs::path project_root = ".";
    std::string test_dir;  // empty: auto-detect
    std::vector<fs::path> include_roots;
    ProviderSettings provider;
    EmbeddingSettings embedding;
    CoverageSettings coverage;
    int workers = 1;
    int token_budget = 16000;
    double exec_timeout_seconds = 10.0;
    FocalFilters filters;
    fs::path out_dir = "out/citywalk";
    std::string compiler = "g++";
    bool stub_toolchain = false;  // deterministic runs without a compiler
    bool save_transcripts = false;
    bool rebuild_kb = false;
    fs::path guidelines_file;        // empty: built-in catalog
    fs::path classifier_rules_file;  // empty: built-in rules

    // Parses and validates; unknown keys anywhere are rejected with
    // FatalError(Config).
    static RunConfig load(const fs::path& path);

    // Reads the configured environment variable; empty when unset.
    std::string resolve_api_key() const;
};

}  // namespace citywalk
