#include "citywalk/deps.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace citywalk {

namespace {

struct CMakeCommand {
    std::string name;  // lowercased
    std::vector<std::string> args;
    int line = 0;
    std::string raw;  // whole invocation, whitespace-normalized
};

// Lexical CMake command scan; no variable expansion, comments stripped.
std::vector<CMakeCommand> scan_cmake(const std::string& text) {
    std::vector<CMakeCommand> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == '#') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            std::size_t after = i;
            while (after < n && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < n && text[after] == '(') {
                int depth = 0;
                std::size_t close = after;
                bool in_quote = false;
                for (; close < n; ++close) {
                    char q = text[close];
                    if (in_quote) {
                        if (q == '\\' && close + 1 < n) ++close;
                        else if (q == '"') in_quote = false;
                        continue;
                    }
                    if (q == '"') in_quote = true;
                    else if (q == '(') ++depth;
                    else if (q == ')') {
                        if (--depth == 0) break;
                    } else if (q == '#') {
                        while (close < n && text[close] != '\n') ++close;
                    }
                }
                CMakeCommand cmd;
                cmd.name = to_lower(text.substr(start, i - start));
                cmd.line = line_of_offset(text, start);
                cmd.raw = syntax::normalize_ws(
                    text.substr(start, std::min(close + 1, n) - start));
                // Argument split on whitespace, honoring quotes.
                std::string arg;
                bool quoted = false;
                for (std::size_t k = after + 1; k < close && k < n; ++k) {
                    char q = text[k];
                    if (quoted) {
                        if (q == '"') quoted = false;
                        else arg.push_back(q);
                        continue;
                    }
                    if (q == '"') {
                        quoted = true;
                    } else if (std::isspace(static_cast<unsigned char>(q))) {
                        if (!arg.empty()) cmd.args.push_back(std::move(arg)), arg.clear();
                    } else if (q == '#') {
                        while (k < close && text[k] != '\n') ++k;
                    } else {
                        arg.push_back(q);
                    }
                }
                if (!arg.empty()) cmd.args.push_back(std::move(arg));
                out.push_back(std::move(cmd));
                i = std::min(close + 1, n);
                continue;
            }
        }
        ++i;
    }
    return out;
}

const std::regex kVersionedName("^(.*?)-([0-9]+(?:\\.[0-9]+)+)$");
const std::regex kVersionToken("^[0-9]+(?:\\.[0-9]+)*$");

bool is_scope_keyword(const std::string& arg) {
    static const std::unordered_set<std::string> kw = {
        "PRIVATE", "PUBLIC", "INTERFACE", "LINK_PUBLIC", "LINK_PRIVATE",
        "optimized", "debug", "general",
    };
    return kw.count(arg) > 0;
}

}  // namespace

ConfigDependencies extract_config_dependencies(const RepoIndex& index) {
    ConfigDependencies deps;
    std::map<std::string, std::size_t> by_name;  // lowercase name -> index

    auto add_library = [&](const std::string& name, std::optional<std::string> version,
                           const Provenance& prov) {
        if (name.empty() || name.find("${") != std::string::npos) return;
        std::string key = to_lower(name);
        auto it = by_name.find(key);
        if (it == by_name.end()) {
            LibraryDep dep;
            dep.name = name;
            dep.version = std::move(version);
            dep.provenance.push_back(prov);
            by_name.emplace(key, deps.libraries.size());
            deps.libraries.push_back(std::move(dep));
        } else {
            LibraryDep& dep = deps.libraries[it->second];
            if (!dep.version && version) dep.version = std::move(version);
            dep.provenance.push_back(prov);
        }
    };

    // Root-level and test-dir CMakeLists first, then the rest.
    std::vector<fs::path> ordered;
    auto priority = [&](const fs::path& p) {
        if (p.parent_path() == index.root) return 0;
        if (index.under_test_dir(p)) return 1;
        return 2;
    };
    ordered = index.config_files;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [&](const fs::path& a, const fs::path& b) {
                         return priority(a) < priority(b);
                     });

    for (const fs::path& file : ordered) {
        auto content = read_file(file);
        if (!content) continue;
        for (const CMakeCommand& cmd : scan_cmake(*content)) {
            Provenance prov{file, cmd.line, cmd.raw};
            std::smatch m;
            if (cmd.name == "target_link_libraries") {
                if (cmd.args.size() < 2) continue;
                deps.provenance.push_back(prov);
                for (std::size_t i = 1; i < cmd.args.size(); ++i) {
                    const std::string& arg = cmd.args[i];
                    if (is_scope_keyword(arg)) continue;
                    if (std::regex_match(arg, m, kVersionedName))
                        add_library(m[1].str(), m[2].str(), prov);
                    else
                        add_library(arg, std::nullopt, prov);
                }
            } else if (cmd.name == "find_package") {
                if (cmd.args.empty()) continue;
                deps.provenance.push_back(prov);
                std::optional<std::string> version;
                if (cmd.args.size() > 1 && std::regex_match(cmd.args[1], kVersionToken))
                    version = cmd.args[1];
                add_library(cmd.args[0], version, prov);
            } else if (cmd.name == "add_subdirectory") {
                if (cmd.args.empty()) continue;
                std::string base = fs::path(cmd.args[0]).filename().string();
                if (std::regex_match(base, m, kVersionedName)) {
                    deps.provenance.push_back(prov);
                    add_library(m[1].str(), m[2].str(), prov);
                }
            } else if (cmd.name == "set") {
                if (cmd.args.size() >= 2 && cmd.args[0] == "CMAKE_CXX_STANDARD") {
                    deps.provenance.push_back(prov);
                    if (!deps.cxx_standard) deps.cxx_standard = cmd.args[1];
                }
            } else if (cmd.name == "set_target_properties") {
                for (std::size_t i = 0; i + 1 < cmd.args.size(); ++i) {
                    if (cmd.args[i] == "CXX_STANDARD") {
                        deps.provenance.push_back(prov);
                        if (!deps.cxx_standard) deps.cxx_standard = cmd.args[i + 1];
                    }
                }
            }
        }
    }

    for (const LibraryDep& dep : deps.libraries) {
        std::string n = to_lower(dep.name);
        if (n == "gtest" || n == "googletest") deps.gtest_available = true;
    }
    return deps;
}

namespace {

fs::path resolve_quote_include(const fs::path& includer, const std::string& target,
                               const RepoIndex& index,
                               const std::vector<fs::path>& include_roots) {
    std::vector<fs::path> candidates;
    candidates.push_back(includer.parent_path() / target);
    for (const fs::path& root : include_roots) candidates.push_back(root / target);
    candidates.push_back(index.root / target);
    for (const fs::path& c : candidates) {
        std::error_code ec;
        if (fs::is_regular_file(c, ec)) {
            fs::path canon = fs::weakly_canonical(c, ec);
            // Only headers that live under the repo become edges.
            auto rel = fs::relative(canon, index.root, ec);
            if (!ec && !rel.empty() && rel.native()[0] != '.') return canon;
        }
    }
    return {};
}

}  // namespace

std::vector<IncludeEdge> build_include_graph(const fs::path& focal_file, const RepoIndex& index,
                                             int max_depth,
                                             const std::vector<fs::path>& include_roots,
                                             std::vector<Warning>* warnings) {
    std::vector<IncludeEdge> edges;
    std::set<fs::path> visited;
    visited.insert(fs::weakly_canonical(focal_file));

    std::vector<fs::path> frontier = {focal_file};
    fs::path header = paired_header(focal_file, index, include_roots);

    const syntax::SyntaxBackend& backend = syntax::default_backend();
    for (int layer = 1; layer <= max_depth; ++layer) {
        std::vector<fs::path> next;
        for (const fs::path& from : frontier) {
            auto content = read_file(from);
            if (!content) continue;
            for (const auto& inc : backend.parse(*content).includes) {
                if (inc.angled) continue;  // only quote includes form edges
                fs::path to = resolve_quote_include(from, inc.target, index, include_roots);
                if (to.empty()) {
                    if (warnings)
                        warnings->push_back(
                            {from.string(), "dangling include: \"" + inc.target + "\""});
                    continue;
                }
                if (visited.count(to)) continue;
                visited.insert(to);
                edges.push_back({from, to, layer});
                next.push_back(to);
            }
        }
        // The paired header belongs to layer 1 even when the focal file does
        // not include it explicitly.
        if (layer == 1 && !header.empty()) {
            fs::path h = fs::weakly_canonical(header);
            if (!visited.count(h)) {
                visited.insert(h);
                edges.push_back({focal_file, h, 1});
                next.push_back(h);
            }
        }
        frontier = std::move(next);
    }
    return edges;
}

std::vector<std::string> harvest_invoked_identifiers(std::string_view body) {
    static const std::unordered_set<std::string_view> kSkip = {
        "if", "for", "while", "switch", "catch", "return", "sizeof", "new", "delete",
        "throw", "alignof", "decltype", "static_cast", "dynamic_cast", "const_cast",
        "reinterpret_cast", "assert", "std", "this", "true", "false", "nullptr",
        "int", "bool", "char", "float", "double", "void", "auto", "long", "short",
        "unsigned", "signed", "const", "constexpr", "static", "else", "do", "case",
    };
    std::vector<syntax::Token> toks;
    for (const auto& t : syntax::lex(body))
        if (t.kind != syntax::TokenKind::Comment && t.kind != syntax::TokenKind::Preprocessor)
            toks.push_back(t);

    std::set<std::string> seen;
    std::vector<std::string> out;
    auto add = [&](std::string_view name) {
        if (kSkip.count(name)) return;
        std::string s(name);
        if (seen.insert(s).second) out.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < toks.size(); ++i) {
        std::string_view t = syntax::token_text(body, toks[i]);
        if (toks[i].kind != syntax::TokenKind::Identifier) continue;
        std::string_view next =
            i + 1 < toks.size() ? syntax::token_text(body, toks[i + 1]) : std::string_view{};
        // Calls and constructor invocations: `name(...)` / `name{...}`.
        if (next == "(" || next == "{") {
            add(t);
            continue;
        }
        // Static member access or qualified call: `Class::member`.
        if (next == "::") {
            add(t);
            continue;
        }
        // Declaration with a user type: `Type var` (constructor use).
        if (i + 1 < toks.size() && toks[i + 1].kind == syntax::TokenKind::Identifier) {
            bool prev_type_ish =
                i == 0 || syntax::token_text(body, toks[i - 1]) != "::";
            if (prev_type_ish) add(t);
        }
    }
    return out;
}

CrossFileDependencies extract_cross_file_dependencies(const FocalMethod& focal,
                                                      const std::vector<IncludeEdge>& edges,
                                                      const RepoIndex& index,
                                                      const syntax::SyntaxBackend& backend) {
    (void)index;
    CrossFileDependencies out;
    std::vector<std::string> symbols = harvest_invoked_identifiers(focal.body);
    // Neither the focal method's own name nor its enclosing class counts as a
    // dependency of the method.
    std::erase(symbols, focal.name);
    if (!focal.class_name.empty()) std::erase(symbols, focal.class_name);

    std::vector<std::pair<fs::path, int>> files;  // (file, layer), layer ascending
    out.chain.push_back(focal.file);
    for (int layer = 1; layer <= 2; ++layer)
        for (const IncludeEdge& e : edges)
            if (e.layer == layer) {
                files.emplace_back(e.to, layer);
                out.chain.push_back(e.to);
            }

    struct Parsed {
        fs::path file;
        int layer;
        std::string source;
        syntax::FileSyntax fsx;
    };
    std::vector<Parsed> parsed;
    for (auto& [file, layer] : files) {
        auto content = read_file(file);
        if (!content) {
            out.warnings.push_back({file.string(), "unreadable dependency file"});
            continue;
        }
        parsed.push_back({file, layer, std::move(*content), {}});
        parsed.back().fsx = backend.parse(parsed.back().source);
    }

    std::set<std::pair<std::string, std::string>> emitted;  // (symbol, file)
    for (const std::string& symbol : symbols) {
        bool found = false;
        for (const Parsed& p : parsed) {
            if (found && p.layer > 1) break;  // layer-1 declarations win
            std::string slice;
            for (const auto& fn : p.fsx.functions) {
                if (fn.name != symbol) continue;
                slice = p.source.substr(fn.decl_begin, fn.end_offset - fn.decl_begin);
                break;
            }
            if (slice.empty()) {
                for (const auto& rec : p.fsx.records) {
                    if (rec.name != symbol) continue;
                    slice = p.source.substr(rec.decl_begin, rec.end_offset - rec.decl_begin);
                    break;
                }
            }
            if (slice.empty()) continue;
            if (emitted.emplace(symbol, p.file.string()).second) {
                out.entries.push_back({symbol, p.file, std::move(slice), p.layer});
                found = true;
            }
        }
        if (!found) out.unresolved.push_back(symbol);
    }
    return out;
}

std::string dump_dependencies_json(const ConfigDependencies& config,
                                   const CrossFileDependencies& cross) {
    nlohmann::json j;
    auto& libs = j["config"]["libraries"] = nlohmann::json::array();
    for (const auto& lib : config.libraries) {
        nlohmann::json e{{"name", lib.name}};
        e["version"] = lib.version ? nlohmann::json(*lib.version) : nlohmann::json();
        auto& prov = e["provenance"] = nlohmann::json::array();
        for (const auto& p : lib.provenance)
            prov.push_back({{"file", p.file.string()}, {"line", p.line}, {"raw", p.raw}});
        libs.push_back(std::move(e));
    }
    j["config"]["cxx_standard"] =
        config.cxx_standard ? nlohmann::json(*config.cxx_standard) : nlohmann::json();
    j["config"]["gtest_available"] = config.gtest_available;

    auto& entries = j["cross_file"]["entries"] = nlohmann::json::array();
    for (const auto& e : cross.entries)
        entries.push_back({{"symbol", e.symbol},
                           {"declaring_file", e.declaring_file.string()},
                           {"declaration_text", e.declaration_text},
                           {"layer", e.layer}});
    auto& chain = j["cross_file"]["chain"] = nlohmann::json::array();
    for (const auto& f : cross.chain) chain.push_back(f.string());
    j["cross_file"]["unresolved"] = cross.unresolved;
    return j.dump(2);
}

}  // namespace citywalk
