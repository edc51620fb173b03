#include "citywalk/postprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace citywalk {

namespace {

// ---- Phase 1 helpers -------------------------------------------------------

bool is_include_line(const std::string& line) {
    std::string t = trim(line);
    return starts_with(t, "#include");
}

std::string include_target(const std::string& line) {
    std::size_t a = line.find_first_of("<\"");
    if (a == std::string::npos) return {};
    char close = line[a] == '<' ? '>' : '"';
    std::size_t b = line.find(close, a + 1);
    if (b == std::string::npos) return {};
    return line.substr(a + 1, b - a - 1);
}

bool is_framework_include(const std::string& target) {
    return target.find("gtest") != std::string::npos ||
           target.find("gmock") != std::string::npos;
}

std::string consolidate_includes(const std::string& source,
                                 const StructuredFocalContext& ctx,
                                 const ConfigDependencies& config) {
    std::vector<std::string> block;
    std::set<std::string> seen;
    auto push = [&](const std::string& raw) {
        if (seen.insert(raw).second) block.push_back(raw);
    };
    for (const auto& raw : ctx.std_imports) push(raw);
    for (const auto& raw : ctx.third_party_imports) push(raw);
    for (const auto& raw : ctx.user_imports) push(raw);

    std::string body;
    for (const std::string& line : split_lines(source)) {
        if (is_include_line(line)) {
            // Framework includes survive only when the framework is permitted.
            if (config.gtest_available && is_framework_include(include_target(line)))
                push(syntax::normalize_ws(line));
            continue;
        }
        body += line;
        body += '\n';
    }

    std::string out;
    for (const auto& raw : block) {
        out += raw;
        out += '\n';
    }
    if (!block.empty() && !body.empty() && body.front() != '\n') out += '\n';
    out += body;
    return out;
}

std::string balance_brackets(const std::string& source) {
    std::vector<char> stack;
    for (const auto& tok : syntax::lex(source)) {
        if (tok.kind != syntax::TokenKind::Punct || tok.end - tok.begin != 1) continue;
        char c = source[tok.begin];
        if (c == '{' || c == '(' || c == '[') {
            stack.push_back(c);
        } else if (c == '}' || c == ')' || c == ']') {
            char open = c == '}' ? '{' : c == ')' ? '(' : '[';
            if (!stack.empty() && stack.back() == open) stack.pop_back();
        }
    }
    if (stack.empty()) return source;
    std::string out = source;
    if (out.empty() || out.back() != '\n') out += '\n';
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
        out += *it == '{' ? '}' : *it == '(' ? ')' : ']';
    out += '\n';
    return out;
}

std::string normalize_mains(const std::string& source, bool gtest_available,
                            const syntax::SyntaxBackend& backend,
                            std::vector<std::string>* notes) {
    syntax::FileSyntax fsx = backend.parse(source);
    std::vector<const syntax::FunctionInfo*> mains;
    for (const auto& fn : fsx.functions)
        if (fn.name == "main" && fn.class_name.empty() && fn.is_definition)
            mains.push_back(&fn);

    // Keep the first main, delete the rest (back to front byte-wise).
    std::string out = source;
    if (mains.size() > 1) {
        for (std::size_t i = mains.size(); i-- > 1;)
            out.erase(mains[i]->decl_begin, mains[i]->end_offset - mains[i]->decl_begin);
        if (notes)
            notes->push_back("removed " + std::to_string(mains.size() - 1) +
                             " extra main function(s)");
    }
    if (!gtest_available && mains.empty()) {
        // Synthesize a main that invokes every parameterless void test function.
        std::vector<std::string> calls;
        for (const auto& fn : fsx.functions)
            if (fn.is_definition && fn.class_name.empty() && fn.name != "main" &&
                syntax::normalize_ws(fn.return_type) == "void" && fn.param_types.empty())
                calls.push_back(fn.name);
        std::string synthesized = "\nint main() {\n";
        for (const auto& c : calls) synthesized += "    " + c + "();\n";
        synthesized += "    return 0;\n}\n";
        if (out.empty() || out.back() != '\n') out += '\n';
        out += synthesized;
        if (notes)
            notes->push_back("synthesized main invoking " + std::to_string(calls.size()) +
                             " test function(s)");
    }
    return out;
}

// ---- Phase 2 helpers -------------------------------------------------------

std::vector<std::string> missing_headers_in(const std::string& diagnostic) {
    std::vector<std::string> out;
    static const std::regex clang_style("'([^']+)' file not found");
    static const std::regex gcc_style("(?:fatal error|error): ([^:]+): No such file");
    std::smatch m;
    if (std::regex_search(diagnostic, m, clang_style)) out.push_back(trim(m[1].str()));
    if (std::regex_search(diagnostic, m, gcc_style)) out.push_back(trim(m[1].str()));
    return out;
}

bool resolves_in_index(const std::string& target, const RepoIndex& index) {
    if (is_standard_header(target)) return true;
    fs::path t = fs::path(target).filename();
    for (const auto& h : index.header_files)
        if (h.filename() == t) return true;
    return false;
}

// ---- Shell helpers ---------------------------------------------------------

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

struct ShellResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    double duration_seconds = 0.0;
};

ShellResult run_shell(const std::string& command) {
    fs::path dir = fs::temp_directory_path();
    static std::atomic<int> counter{0};
    int n = counter++;
    fs::path out_file = dir / ("citywalk_sh_" + std::to_string(::getpid()) + "_" +
                               std::to_string(n) + ".out");
    fs::path err_file = dir / ("citywalk_sh_" + std::to_string(::getpid()) + "_" +
                               std::to_string(n) + ".err");
    std::string full = command + " > " + shell_quote(out_file.string()) + " 2> " +
                       shell_quote(err_file.string());
    auto start = std::chrono::steady_clock::now();
    int rc = std::system(full.c_str());
    auto stop = std::chrono::steady_clock::now();

    ShellResult result;
    result.duration_seconds = std::chrono::duration<double>(stop - start).count();
    if (WIFEXITED(rc))
        result.exit_code = WEXITSTATUS(rc);
    else if (WIFSIGNALED(rc))
        result.exit_code = 128 + WTERMSIG(rc);
    result.out = read_file(out_file).value_or("");
    result.err = read_file(err_file).value_or("");
    std::error_code ec;
    fs::remove(out_file, ec);
    fs::remove(err_file, ec);
    return result;
}

}  // namespace

// ---- Phase 1 ---------------------------------------------------------------

GeneratedTestFile apply_syntax_rules(GeneratedTestFile tc,
                                     const StructuredFocalContext& focal_ctx,
                                     const ConfigDependencies& config_deps) {
    const syntax::SyntaxBackend& backend = syntax::default_backend();
    tc.source = consolidate_includes(tc.source, focal_ctx, config_deps);
    // Balance before main normalization so truncated functions parse as
    // definitions instead of swallowing a synthesized main.
    tc.source = balance_brackets(tc.source);
    tc.source = normalize_mains(tc.source, config_deps.gtest_available, backend, &tc.notes);
    if (tc.stage < TestStage::RuleFixed) tc.stage = TestStage::RuleFixed;
    tc.lineage.push_back("apply_syntax_rules");
    return tc;
}

// ---- Phase 2 ---------------------------------------------------------------

GeneratedTestFile apply_compile_rules(GeneratedTestFile tc, const CompileResult& compile,
                                      const StructuredFocalContext& focal_ctx,
                                      const RepoIndex& index,
                                      const GuidanceCatalog& catalog) {
    bool namespace_problem = false;
    std::set<std::string> missing;
    for (const std::string& diag : compile.diagnostics) {
        ErrorClassification cls = catalog.classify_error(diag);
        if (cls.pattern == ErrorPattern::Namespace) namespace_problem = true;
        for (auto& h : missing_headers_in(diag)) missing.insert(h);
    }

    std::vector<std::string> lines = split_lines(tc.source);

    // Delete includes that resolve nowhere in the repository.
    if (!missing.empty()) {
        std::vector<std::string> kept;
        for (const std::string& line : lines) {
            if (is_include_line(line)) {
                std::string target = include_target(line);
                if (missing.count(target) && !resolves_in_index(target, index)) {
                    tc.notes.push_back("deleted unresolvable include: " + target);
                    continue;
                }
            }
            kept.push_back(line);
        }
        lines = std::move(kept);
    }

    // Insert using-directives for the focal file's namespaces.
    if (namespace_problem) {
        std::set<std::string> present;
        for (const std::string& line : lines) {
            std::string t = trim(line);
            if (starts_with(t, "using namespace")) present.insert(t);
        }
        std::vector<std::string> directives;
        for (const std::string& ns : focal_ctx.namespaces) {
            if (ns.empty()) continue;
            std::string directive = "using namespace " + ns + ";";
            if (!present.count(directive)) directives.push_back(directive);
        }
        if (!directives.empty()) {
            std::size_t insert_at = 0;
            for (std::size_t i = 0; i < lines.size(); ++i)
                if (is_include_line(lines[i])) insert_at = i + 1;
            lines.insert(lines.begin() + insert_at, directives.begin(), directives.end());
            for (const auto& d : directives)
                tc.notes.push_back("inserted directive: " + d);
        }
    }

    std::string rebuilt;
    for (const auto& line : lines) {
        rebuilt += line;
        rebuilt += '\n';
    }
    tc.source = std::move(rebuilt);
    tc.lineage.push_back("apply_compile_rules");
    return tc;
}

// ---- Phase 3 ---------------------------------------------------------------

GeneratedTestFile llm_fix(GeneratedTestFile tc, const CompileResult& compile,
                          LLMProvider& provider, TranscriptRecorder* transcripts,
                          int token_budget) {
    if (std::find(tc.lineage.begin(), tc.lineage.end(), "llm_fix") != tc.lineage.end())
        throw PerMethodError("llm_fix is single-round; a prior attempt exists");

    // The prompt receives compile diagnostics only — execution output is
    // firewalled from the provider by construction.
    PromptExtras extras;
    extras.prior_source = tc.source;
    std::string diags;
    for (const auto& d : compile.diagnostics) {
        diags += d;
        diags += '\n';
    }
    extras.diagnostics = diags;
    PromptBundle bundle = assemble_prompt(PromptStep::Fix, {}, extras, token_budget);

    tc.lineage.push_back("llm_fix");
    tc.stage = TestStage::LlmFixed;
    try {
        LLMRequest request;
        request.provider_id = provider.id();
        request.messages.push_back({"user", bundle.rendered});
        LLMResponse response = provider.complete(request);
        if (transcripts) transcripts->record(tc.focal_id, "llm_fix", request, response);
        auto block = extract_first_code_block(response.text);
        if (block)
            tc.source = *block;
        else
            tc.notes.push_back("llm_fix response carried no code block; file unchanged");
    } catch (const std::exception& e) {
        tc.notes.push_back(std::string("llm_fix provider failure; file unchanged: ") +
                           e.what());
    }
    return tc;
}

// ---- Toolchains ------------------------------------------------------------

bool RealToolchain::available() const {
    return run_shell(shell_quote(compiler_) + " --version").exit_code == 0;
}

CompileResult RealToolchain::compile(const CompileJob& job) {
    std::string cmd = shell_quote(compiler_);
    if (!job.cxx_standard.empty()) cmd += " -std=c++" + job.cxx_standard;
    for (const auto& root : job.include_roots) cmd += " -I" + shell_quote(root.string());
    for (const auto& flag : job.coverage_flags) cmd += " " + flag;
    cmd += " " + shell_quote(job.test_file.string());
    for (const auto& src : job.extra_sources) cmd += " " + shell_quote(src.string());
    cmd += " -o " + shell_quote(job.output_binary.string());

    ShellResult rc = run_shell(cmd);
    CompileResult result;
    result.command = cmd;
    result.duration_seconds = rc.duration_seconds;
    result.status = rc.exit_code == 0 ? CompileStatus::Success : CompileStatus::Failure;
    for (const std::string& line : split_lines(rc.err))
        if (!trim(line).empty()) result.diagnostics.push_back(line);
    if (result.status == CompileStatus::Failure && result.diagnostics.empty())
        result.diagnostics.push_back("compilation failed with no diagnostics (exit " +
                                     std::to_string(rc.exit_code) + ")");
    if (result.status == CompileStatus::Success) result.diagnostics.clear();
    return result;
}

ExecResult RealToolchain::execute(const fs::path& binary, const ExecLimits& limits) {
    std::string cmd = "timeout " + std::to_string(limits.timeout_seconds) + "s " +
                      shell_quote(binary.string());
    ShellResult rc = run_shell(cmd);
    ExecResult result;
    result.stdout_text = rc.out;
    result.stderr_text = rc.err;
    result.duration_seconds = rc.duration_seconds;
    if (rc.exit_code == 0)
        result.status = ExecStatus::Pass;
    else if (rc.exit_code == 124)
        result.status = ExecStatus::Timeout;
    else if (rc.exit_code >= 128)
        result.status = ExecStatus::Crash;
    else
        result.status = ExecStatus::AssertionFailure;
    if (result.status == ExecStatus::Timeout &&
        result.duration_seconds < limits.timeout_seconds)
        result.duration_seconds = limits.timeout_seconds;
    return result;
}

CompileResult StubToolchain::compile(const CompileJob& job) {
    jobs.push_back(job);
    std::string source = read_file(job.test_file).value_or("");
    for (const Verdict& v : verdicts_) {
        if (!v.match.empty() && source.find(v.match) == std::string::npos) continue;
        pending_exec_ = v.exec;
        CompileResult r = v.compile;
        if (r.command.empty()) r.command = "stub-compile " + job.test_file.string();
        return r;
    }
    pending_exec_ = ExecResult{};
    CompileResult ok;
    ok.status = CompileStatus::Success;
    ok.command = "stub-compile " + job.test_file.string();
    return ok;
}

ExecResult StubToolchain::execute(const fs::path&, const ExecLimits&) {
    return pending_exec_;
}

// ---- Drivers ---------------------------------------------------------------

CompileResult compile_test(const GeneratedTestFile& tc, const RepoIndex& index,
                           const ConfigDependencies& config_deps, Toolchain& toolchain,
                           const fs::path& scratch_dir,
                           const std::vector<std::string>& coverage_flags,
                           fs::path* binary_out, fs::path* test_file_out) {
    fs::create_directories(scratch_dir);
    fs::path test_dir = index.test_dir.empty() ? scratch_dir : index.test_dir;
    fs::create_directories(test_dir);
    fs::path test_file = test_dir / ("citywalk_test_" + slugify(tc.focal_id) + ".cpp");
    write_file(test_file, tc.source);
    if (test_file_out) *test_file_out = test_file;

    CompileJob job;
    job.test_file = test_file;
    job.output_binary = scratch_dir / ("citywalk_test_" + slugify(tc.focal_id) + ".bin");
    job.cxx_standard = config_deps.cxx_standard.value_or("");
    job.coverage_flags = coverage_flags;

    std::set<fs::path> roots;
    roots.insert(index.root);
    for (const auto& h : index.header_files) roots.insert(h.parent_path());
    job.include_roots.assign(roots.begin(), roots.end());

    for (const auto& src : index.source_files)
        if (!index.under_test_dir(src)) job.extra_sources.push_back(src);

    if (binary_out) *binary_out = job.output_binary;
    return toolchain.compile(job);
}

ExecResult execute_test(Toolchain& toolchain, const fs::path& binary,
                        const ExecLimits& limits) {
    return toolchain.execute(binary, limits);
}

}  // namespace citywalk
