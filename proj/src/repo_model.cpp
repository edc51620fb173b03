#include "citywalk/repo_model.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace citywalk {

namespace {

bool is_excluded_dir(const fs::path& rel, const std::vector<std::string>& exclude_dirs) {
    for (const auto& part : rel) {
        for (const auto& name : exclude_dirs)
            if (part.string() == name) return true;
    }
    return false;
}

}  // namespace

bool RepoIndex::under_test_dir(const fs::path& p) const {
    if (test_dir.empty()) return false;
    auto rel = fs::relative(p, test_dir);
    return !rel.empty() && rel.native()[0] != '.';
}

RepoIndex scan_repository(const fs::path& root, const ScanOptions& options) {
    std::error_code ec;
    if (!fs::exists(root, ec) || !fs::is_directory(root, ec))
        throw FatalError(FatalError::Kind::Config,
                         "repository root does not exist: " + root.string());

    RepoIndex index;
    index.root = fs::weakly_canonical(root);

    std::vector<fs::path> files;
    for (fs::recursive_directory_iterator it(index.root, fs::directory_options::skip_permission_denied, ec), end;
         it != end; it.increment(ec)) {
        if (ec) {
            index.warnings.push_back({index.root.string(), "scan error: " + ec.message()});
            break;
        }
        const fs::path& p = it->path();
        fs::path rel = fs::relative(p, index.root);
        if (it->is_directory() && is_excluded_dir(rel, options.exclude_dirs)) {
            it.disable_recursion_pending();
            continue;
        }
        if (!it->is_regular_file()) continue;
        if (is_excluded_dir(rel, options.exclude_dirs)) continue;
        files.push_back(p);
    }
    std::sort(files.begin(), files.end());

    for (const fs::path& p : files) {
        std::string name = p.filename().string();
        std::string ext = to_lower(p.extension().string());
        // Skip files we cannot read; they would poison later stages.
        if (!read_file(p)) {
            index.warnings.push_back({p.string(), "unreadable file skipped"});
            continue;
        }
        if (name == "CMakeLists.txt")
            index.config_files.push_back(p);
        else if (ext == ".cpp")
            index.source_files.push_back(p);
        else if (ext == ".h" || ext == ".hpp")
            index.header_files.push_back(p);
        else if (ext == ".md" || ext == ".markdown" || ext == ".txt")
            index.doc_files.push_back(p);
    }

    if (!options.test_dir_name.empty()) {
        index.test_dir = index.root / options.test_dir_name;
    } else if (fs::is_directory(index.root / "test")) {
        index.test_dir = index.root / "test";
    } else if (fs::is_directory(index.root / "tests")) {
        index.test_dir = index.root / "tests";
    } else {
        index.test_dir = index.root / "test";
    }
    return index;
}

std::string FocalMethod::signature_text() const {
    std::string out = return_type.empty() ? name : return_type + " " + name;
    out += "(";
    for (std::size_t i = 0; i < param_types.size(); ++i) {
        if (i) out += ", ";
        out += param_types[i];
    }
    out += ")";
    return out;
}

int cyclomatic_complexity(std::string_view body) {
    int decisions = 0;
    for (const syntax::Token& t : syntax::lex(body)) {
        std::string_view text = syntax::token_text(body, t);
        if (t.kind == syntax::TokenKind::Identifier) {
            if (text == "if" || text == "for" || text == "while" || text == "case" ||
                text == "catch")
                ++decisions;
        } else if (t.kind == syntax::TokenKind::Punct) {
            if (text == "?" || text == "&&" || text == "||") ++decisions;
        }
    }
    return 1 + decisions;
}

namespace {

int body_content_lines(const std::string& source, const syntax::FunctionInfo& fn) {
    if (fn.end_offset <= fn.body_open_offset + 2) return 0;
    std::string interior = source.substr(fn.body_open_offset + 1,
                                         fn.end_offset - 1 - (fn.body_open_offset + 1));
    int count = 0;
    for (const std::string& line : split_lines(interior)) {
        bool content = false;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)) && c != '{' && c != '}')
                content = true;
        if (content) ++count;
    }
    return count;
}

bool is_special_member(const syntax::FunctionInfo& fn) {
    if (!fn.name.empty() && fn.name[0] == '~') return true;
    if (starts_with(fn.name, "operator")) return true;
    return !fn.class_name.empty() && fn.name == fn.class_name;
}

}  // namespace

std::vector<FocalMethod> enumerate_focal_methods(const RepoIndex& index,
                                                 const FocalFilters& filters,
                                                 const syntax::SyntaxBackend& backend) {
    std::vector<FocalMethod> out;
    for (const fs::path& file : index.source_files) {
        if (index.under_test_dir(file)) continue;
        auto source = read_file(file);
        if (!source) continue;
        syntax::FileSyntax parsed = backend.parse(*source);
        if (!parsed.parse_ok) continue;

        std::vector<const syntax::FunctionInfo*> defs;
        for (const auto& fn : parsed.functions)
            if (fn.is_definition) defs.push_back(&fn);
        std::sort(defs.begin(), defs.end(),
                  [](auto* a, auto* b) { return a->decl_line < b->decl_line; });

        for (const auto* fn : defs) {
            if (!filters.include_special_members && is_special_member(*fn)) continue;
            if (body_content_lines(*source, *fn) < filters.min_body_lines) continue;
            bool excluded = false;
            for (const auto& glob : filters.exclude_name_globs)
                if (glob_match(glob, fn->name)) excluded = true;
            if (excluded) continue;

            FocalMethod m;
            m.name = fn->name;
            m.class_name = fn->class_name;
            m.return_type = fn->return_type;
            m.param_types = fn->param_types;
            m.file = file;
            m.line_start = fn->decl_line;
            m.line_end = fn->end_line;
            m.body = slice_lines(*source, m.line_start, m.line_end);
            m.cyclomatic_complexity = cyclomatic_complexity(m.body);
            std::string rel = fs::relative(file, index.root).string();
            m.id = slugify(rel) + "__" +
                   (m.class_name.empty() ? "" : slugify(m.class_name) + "_") + slugify(m.name) +
                   "__L" + std::to_string(m.line_start);
            out.push_back(std::move(m));
        }
    }
    return out;
}

bool is_standard_header(std::string_view header) {
    static const std::unordered_set<std::string_view> kHeaders = {
        // C++ library
        "algorithm", "any", "array", "atomic", "bitset", "charconv", "chrono", "codecvt",
        "complex", "condition_variable", "deque", "exception", "execution", "filesystem",
        "forward_list", "fstream", "functional", "future", "initializer_list", "iomanip",
        "ios", "iosfwd", "iostream", "istream", "iterator", "limits", "list", "locale",
        "map", "memory", "memory_resource", "mutex", "new", "numeric", "optional",
        "ostream", "queue", "random", "ratio", "regex", "scoped_allocator", "set",
        "shared_mutex", "sstream", "stack", "stdexcept", "streambuf", "string",
        "string_view", "system_error", "thread", "tuple", "type_traits", "typeindex",
        "typeinfo", "unordered_map", "unordered_set", "utility", "valarray", "variant",
        "vector",
        // C compatibility
        "cassert", "ccomplex", "cctype", "cerrno", "cfenv", "cfloat", "cinttypes",
        "ciso646", "climits", "clocale", "cmath", "csetjmp", "csignal", "cstdalign",
        "cstdarg", "cstdbool", "cstddef", "cstdint", "cstdio", "cstdlib", "cstring",
        "ctgmath", "ctime", "cuchar", "cwchar", "cwctype",
        // C standard headers
        "assert.h", "complex.h", "ctype.h", "errno.h", "fenv.h", "float.h", "inttypes.h",
        "iso646.h", "limits.h", "locale.h", "math.h", "setjmp.h", "signal.h", "stdalign.h",
        "stdarg.h", "stdatomic.h", "stdbool.h", "stddef.h", "stdint.h", "stdio.h",
        "stdlib.h", "string.h", "tgmath.h", "threads.h", "time.h", "uchar.h", "wchar.h",
        "wctype.h",
    };
    return kHeaders.count(header) > 0;
}

fs::path paired_header(const fs::path& source, const RepoIndex& index,
                       const std::vector<fs::path>& include_roots) {
    std::string stem = source.stem().string();
    auto match = [&](const fs::path& dir) -> fs::path {
        for (const fs::path& h : index.header_files)
            if (h.parent_path() == dir && h.stem().string() == stem) return h;
        return {};
    };
    if (fs::path h = match(source.parent_path()); !h.empty()) return h;
    for (const fs::path& root : include_roots)
        if (fs::path h = match(root); !h.empty()) return h;
    for (const fs::path& h : index.header_files)
        if (h.stem().string() == stem) return h;
    return {};
}

StructuredFocalContext extract_focal_context(const FocalMethod& m, const RepoIndex& index,
                                             const syntax::SyntaxBackend& backend) {
    StructuredFocalContext ctx;
    ctx.focal = m;

    auto source = read_file(m.file);
    if (!source)
        throw FatalError(FatalError::Kind::Environment,
                         "focal file no longer readable: " + m.file.string());
    syntax::FileSyntax parsed = backend.parse(*source);
    if (!parsed.parse_ok)
        throw FatalError(FatalError::Kind::Environment,
                         "focal file no longer parseable: " + m.file.string() + ": " +
                             parsed.diagnostic);

    fs::path header = paired_header(m.file, index);
    syntax::FileSyntax header_parsed;
    std::optional<std::string> header_source;
    if (!header.empty()) {
        header_source = read_file(header);
        if (header_source) header_parsed = backend.parse(*header_source);
    }

    std::set<std::string> seen;
    auto add_include = [&](const syntax::IncludeDirective& inc) {
        if (!seen.insert(inc.raw).second) return;
        if (!inc.angled)
            ctx.user_imports.push_back(inc.raw);
        else if (is_standard_header(inc.target))
            ctx.std_imports.push_back(inc.raw);
        else
            ctx.third_party_imports.push_back(inc.raw);
    };
    for (const auto& inc : parsed.includes) add_include(inc);
    for (const auto& inc : header_parsed.includes) add_include(inc);

    // Bare names ("YAML"), usable directly in a using-directive.
    std::set<std::string> ns_seen;
    for (const auto& ns : parsed.namespaces)
        if (!ns.name.empty() && ns_seen.insert(ns.name).second)
            ctx.namespaces.push_back(ns.name);
    for (const auto& ns : header_parsed.namespaces)
        if (!ns.name.empty() && ns_seen.insert(ns.name).second)
            ctx.namespaces.push_back(ns.name);

    if (!m.class_name.empty()) {
        std::set<std::string> sig_seen;
        auto add_siblings = [&](const syntax::FileSyntax& fsx) {
            for (const auto& fn : fsx.functions) {
                if (fn.class_name != m.class_name) continue;
                if (fn.name == m.name && fn.param_types == m.param_types) continue;
                if (sig_seen.insert(fn.name + "|" + fn.signature).second)
                    ctx.sibling_signatures.push_back(fn.signature);
            }
        };
        add_siblings(parsed);
        add_siblings(header_parsed);

        std::set<std::string> field_seen;
        auto add_fields = [&](const syntax::FileSyntax& fsx) {
            for (const auto& rec : fsx.records) {
                if (rec.name != m.class_name) continue;
                for (const auto& f : rec.field_decls)
                    if (field_seen.insert(f).second) ctx.class_fields.push_back(f);
            }
        };
        add_fields(parsed);
        add_fields(header_parsed);
    }
    return ctx;
}

std::string dump_focal_methods_json(const std::vector<FocalMethod>& methods) {
    nlohmann::json arr = nlohmann::json::array();
    for (const FocalMethod& m : methods) {
        arr.push_back({
            {"id", m.id},
            {"name", m.name},
            {"class_name", m.class_name},
            {"signature", {{"return_type", m.return_type}, {"param_types", m.param_types}}},
            {"file", m.file.string()},
            {"line_span", {m.line_start, m.line_end}},
            {"body", m.body},
            {"cyclomatic_complexity", m.cyclomatic_complexity},
        });
    }
    return arr.dump(2);
}

}  // namespace citywalk
