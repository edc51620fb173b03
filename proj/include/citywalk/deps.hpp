#pragma once

#include <optional>
#include <string>
#include <vector>

#include "citywalk/repo_model.hpp"

namespace citywalk {

struct Provenance {
    fs::path file;
    int line = 0;
    std::string raw;
};

struct LibraryDep {
    std::string name;
    std::optional<std::string> version;
    std::vector<Provenance> provenance;
};

struct ConfigDependencies {
    std::vector<LibraryDep> libraries;
    std::optional<std::string> cxx_standard;  // e.g. "11"
    bool gtest_available = false;
    std::vector<Provenance> provenance;  // every matched command
};

struct IncludeEdge {
    fs::path from;
    fs::path to;  // resolved, exists under the repo
    int layer = 1;
};

struct DependencyEntry {
    std::string symbol;
    fs::path declaring_file;
    std::string declaration_text;  // byte-exact slice of declaring_file
    int layer = 1;
};

struct CrossFileDependencies {
    std::vector<DependencyEntry> entries;
    std::vector<fs::path> chain;  // files walked, in order
    std::vector<std::string> unresolved;
    std::vector<Warning> warnings;
};

ConfigDependencies extract_config_dependencies(const RepoIndex& index);

std::vector<IncludeEdge> build_include_graph(
    const fs::path& focal_file, const RepoIndex& index, int max_depth = 2,
    const std::vector<fs::path>& include_roots = {},
    std::vector<Warning>* warnings = nullptr);

CrossFileDependencies extract_cross_file_dependencies(
    const FocalMethod& focal, const std::vector<IncludeEdge>& edges, const RepoIndex& index,
    const syntax::SyntaxBackend& backend = syntax::default_backend());

// Identifiers invoked or instantiated inside a method body: free and member
// calls, constructor uses, and static member accesses. Plain variable reads
// are excluded.
std::vector<std::string> harvest_invoked_identifiers(std::string_view body);

std::string dump_dependencies_json(const ConfigDependencies& config,
                                   const CrossFileDependencies& cross);

}  // namespace citywalk
