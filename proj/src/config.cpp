#include "citywalk/config.hpp"

#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

namespace citywalk {

namespace {

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!known.count(key))
            throw FatalError(FatalError::Kind::Config,
                             "unknown config key: " + where + key);
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_path(const nlohmann::json& obj, const char* key, fs::path& out) {
    if (obj.contains(key)) out = fs::path(obj.at(key).get<std::string>());
}

}  // namespace

RunConfig RunConfig::load(const fs::path& path) {
    auto text = read_file(path);
    if (!text)
        throw FatalError(FatalError::Kind::Config,
                         "cannot read config file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(*text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw FatalError(FatalError::Kind::Config,
                         "config is not a JSON object: " + path.string());

    reject_unknown(j,
                   {"project_root", "test_dir", "include_roots", "provider", "embedding",
                    "coverage", "workers", "token_budget", "exec_timeout_seconds",
                    "filters", "out_dir", "compiler", "stub_toolchain", "save_transcripts",
                    "rebuild_kb", "guidelines_file", "classifier_rules_file"},
                   "");

    RunConfig cfg;
    read_path(j, "project_root", cfg.project_root);
    read(j, "test_dir", cfg.test_dir);
    if (j.contains("include_roots"))
        for (const auto& r : j.at("include_roots"))
            cfg.include_roots.emplace_back(r.get<std::string>());

    if (j.contains("provider")) {
        const auto& p = j.at("provider");
        reject_unknown(p, {"kind", "endpoint", "model", "api_key_env", "mock_script"},
                       "provider.");
        read(p, "kind", cfg.provider.kind);
        read(p, "endpoint", cfg.provider.endpoint);
        read(p, "model", cfg.provider.model);
        read(p, "api_key_env", cfg.provider.api_key_env);
        read_path(p, "mock_script", cfg.provider.mock_script);
        if (cfg.provider.kind != "mock" && cfg.provider.kind != "http")
            throw FatalError(FatalError::Kind::Config,
                             "provider.kind must be mock or http");
        if (p.contains("api_key"))
            throw FatalError(FatalError::Kind::Config,
                             "secrets must come from the environment, not the config file");
    }

    if (j.contains("embedding")) {
        const auto& e = j.at("embedding");
        reject_unknown(e, {"kind", "dimension", "endpoint", "model", "api_key_env"},
                       "embedding.");
        read(e, "kind", cfg.embedding.kind);
        read(e, "dimension", cfg.embedding.dimension);
        read(e, "endpoint", cfg.embedding.endpoint);
        read(e, "model", cfg.embedding.model);
        read(e, "api_key_env", cfg.embedding.api_key_env);
        if (cfg.embedding.kind != "hashing" && cfg.embedding.kind != "http")
            throw FatalError(FatalError::Kind::Config,
                             "embedding.kind must be hashing or http");
        if (cfg.embedding.dimension <= 0)
            throw FatalError(FatalError::Kind::Config,
                             "embedding.dimension must be positive");
    }

    if (j.contains("coverage")) {
        const auto& c = j.at("coverage");
        reject_unknown(c, {"enabled", "flags", "export_command"}, "coverage.");
        read(c, "enabled", cfg.coverage.enabled);
        if (c.contains("flags"))
            cfg.coverage.flags = c.at("flags").get<std::vector<std::string>>();
        read(c, "export_command", cfg.coverage.export_command);
    }

    read(j, "workers", cfg.workers);
    read(j, "token_budget", cfg.token_budget);
    read(j, "exec_timeout_seconds", cfg.exec_timeout_seconds);
    if (cfg.workers < 1)
        throw FatalError(FatalError::Kind::Config, "workers must be >= 1");
    if (cfg.token_budget < 1)
        throw FatalError(FatalError::Kind::Config, "token_budget must be >= 1");
    if (cfg.exec_timeout_seconds <= 0)
        throw FatalError(FatalError::Kind::Config, "exec_timeout_seconds must be > 0");

    if (j.contains("filters")) {
        const auto& f = j.at("filters");
        reject_unknown(f, {"min_body_lines", "exclude_name_globs", "include_special_members"},
                       "filters.");
        read(f, "min_body_lines", cfg.filters.min_body_lines);
        if (f.contains("exclude_name_globs"))
            cfg.filters.exclude_name_globs =
                f.at("exclude_name_globs").get<std::vector<std::string>>();
        read(f, "include_special_members", cfg.filters.include_special_members);
    }

    read_path(j, "out_dir", cfg.out_dir);
    read(j, "compiler", cfg.compiler);
    read(j, "stub_toolchain", cfg.stub_toolchain);
    read(j, "save_transcripts", cfg.save_transcripts);
    read(j, "rebuild_kb", cfg.rebuild_kb);
    read_path(j, "guidelines_file", cfg.guidelines_file);
    read_path(j, "classifier_rules_file", cfg.classifier_rules_file);
    return cfg;
}

std::string RunConfig::resolve_api_key() const {
    const char* value = std::getenv(provider.api_key_env.c_str());
    return value ? value : "";
}

}  // namespace citywalk
