#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "citywalk/syntax.hpp"
#include "citywalk/util.hpp"

namespace citywalk {

// Fatal configuration/environment problem; maps to a nonzero exit code.
struct FatalError : std::runtime_error {
    enum class Kind { Environment, Config };
    FatalError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

struct ScanOptions {
    std::vector<std::string> exclude_dirs = {"build", ".git", "out", "cmake-build-debug"};
    std::string test_dir_name;  // empty: auto-detect "test"/"tests", default "test"
};

struct FocalFilters {
    int min_body_lines = 2;
    std::vector<std::string> exclude_name_globs;
    bool include_special_members = false;  // constructors, destructors, operators
};

struct RepoIndex {
    fs::path root;
    std::vector<fs::path> source_files;  // suffix .cpp
    std::vector<fs::path> header_files;  // suffix .h / .hpp
    std::vector<fs::path> config_files;  // CMakeLists.txt instances
    std::vector<fs::path> doc_files;     // markdown / plain text
    fs::path test_dir;
    std::vector<Warning> warnings;

    bool under_test_dir(const fs::path& p) const;
};

struct FocalMethod {
    std::string id;
    std::string name;
    std::string class_name;
    std::string return_type;
    std::vector<std::string> param_types;
    fs::path file;
    int line_start = 0;  // 1-based inclusive
    int line_end = 0;
    std::string body;  // byte-exact slice of file within the line span
    int cyclomatic_complexity = 1;

    std::string signature_text() const;
};

struct StructuredFocalContext {
    FocalMethod focal;
    std::vector<std::string> std_imports;
    std::vector<std::string> third_party_imports;
    std::vector<std::string> user_imports;
    std::vector<std::string> namespaces;
    std::vector<std::string> sibling_signatures;
    std::vector<std::string> class_fields;
};

RepoIndex scan_repository(const fs::path& root, const ScanOptions& options = {});

std::vector<FocalMethod> enumerate_focal_methods(
    const RepoIndex& index, const FocalFilters& filters = {},
    const syntax::SyntaxBackend& backend = syntax::default_backend());

StructuredFocalContext extract_focal_context(
    const FocalMethod& m, const RepoIndex& index,
    const syntax::SyntaxBackend& backend = syntax::default_backend());

// 1 + decision points (if, for, while, case, catch, ?:, &&, ||).
int cyclomatic_complexity(std::string_view body);

// True when `header` is in the static C++ standard-header list (includes the
// C compatibility headers).
bool is_standard_header(std::string_view header);

// Header whose stem matches `source`, preferring the same directory, then
// include roots, then anywhere under the repo. Empty path when none.
fs::path paired_header(const fs::path& source, const RepoIndex& index,
                       const std::vector<fs::path>& include_roots = {});

std::string dump_focal_methods_json(const std::vector<FocalMethod>& methods);

}  // namespace citywalk
