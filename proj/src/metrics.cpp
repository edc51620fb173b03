#include "citywalk/metrics.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace citywalk {

namespace {

struct Segment {
    int line = 0;
    int col = 0;
    long long count = 0;
    bool has_count = false;
    bool is_gap = false;
};

double percent(double num, double den) { return den == 0 ? 0.0 : 100.0 * num / den; }

std::string format_percent(std::optional<double> v) {
    if (!v) return "n/a";
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << *v << "%";
    return out.str();
}

}  // namespace

Correctness compute_correctness(const std::vector<TestCaseResult>& results) {
    Correctness c;
    c.generated = static_cast<int>(results.size());
    for (const auto& r : results) {
        if (r.compiled) ++c.compiled;
        if (r.passed) ++c.passed;
    }
    if (c.generated == 0) {
        c.empty_run = true;
        return c;
    }
    c.csr = static_cast<double>(c.compiled) / c.generated;
    c.epr = static_cast<double>(c.passed) / c.generated;
    return c;
}

std::optional<CoverageRecord> parse_coverage(const std::string& export_json,
                                             const FocalMethod& focal) {
    nlohmann::json j = nlohmann::json::parse(export_json, nullptr, false);
    if (j.is_discarded() || !j.contains("data") || !j["data"].is_array())
        return std::nullopt;

    CoverageRecord rec;
    rec.focal_id = focal.id;
    rec.lines_total = focal.line_end - focal.line_start + 1;

    std::string focal_name = focal.file.filename().string();
    std::vector<Segment> segments;
    std::vector<std::array<long long, 6>> branches;  // LineStart..ColEnd,Exec,False
    try {
        for (const auto& datum : j["data"]) {
            for (const auto& file : datum.at("files")) {
                std::string filename = file.at("filename").get<std::string>();
                if (fs::path(filename).filename().string() != focal_name &&
                    filename != focal.file.string())
                    continue;
                for (const auto& s : file.value("segments", nlohmann::json::array())) {
                    Segment seg;
                    seg.line = s.at(0).get<int>();
                    seg.col = s.at(1).get<int>();
                    seg.count = s.at(2).get<long long>();
                    seg.has_count = s.at(3).get<bool>();
                    seg.is_gap = s.size() > 5 && s.at(5).get<bool>();
                    segments.push_back(seg);
                }
                for (const auto& b : file.value("branches", nlohmann::json::array())) {
                    branches.push_back({b.at(0).get<long long>(), b.at(1).get<long long>(),
                                        b.at(2).get<long long>(), b.at(3).get<long long>(),
                                        b.at(4).get<long long>(), b.at(5).get<long long>()});
                }
            }
        }
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }

    std::stable_sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
        return a.line != b.line ? a.line < b.line : a.col < b.col;
    });

    // Per-line state: a line is instrumented when a counted, non-gap segment
    // covers part of it; its count is the max of segments starting on the
    // line, else the wrapped (preceding) segment's count.
    int instrumented = 0, covered = 0;
    std::size_t next = 0;
    Segment wrap;  // state carried over from the previous lines
    bool have_wrap = false;
    for (int line = 1; line <= focal.line_end; ++line) {
        bool in_span = line >= focal.line_start;
        bool line_instrumented = false;
        long long line_count = 0;
        if (have_wrap && wrap.has_count && !wrap.is_gap) {
            line_instrumented = true;
            line_count = wrap.count;
        }
        bool starts_here = false;
        long long start_max = 0;
        while (next < segments.size() && segments[next].line == line) {
            const Segment& s = segments[next];
            if (s.has_count && !s.is_gap) {
                line_instrumented = true;
                if (!starts_here || s.count > start_max) start_max = s.count;
                starts_here = true;
            }
            wrap = s;
            have_wrap = true;
            ++next;
        }
        if (starts_here) line_count = start_max;
        if (in_span && line_instrumented && line_count > 0) ++covered;
        if (in_span && line_instrumented) ++instrumented;
    }
    (void)instrumented;
    rec.lines_covered = covered;
    if (rec.lines_covered > rec.lines_total) rec.lines_covered = rec.lines_total;

    for (const auto& b : branches) {
        if (b[0] < focal.line_start || b[0] > focal.line_end) continue;
        rec.branches_total += 2;
        if (b[4] > 0) ++rec.branches_covered;  // true side executed
        if (b[5] > 0) ++rec.branches_covered;  // false side executed
    }
    return rec;
}

MetricsReport aggregate_report(const std::vector<MethodRecord>& records,
                               const GuidanceCatalog& catalog) {
    MetricsReport report;
    report.records = records;
    std::sort(report.records.begin(), report.records.end(),
              [](const MethodRecord& a, const MethodRecord& b) {
                  return a.focal_id < b.focal_id;
              });

    std::vector<TestCaseResult> cases;
    long long lines_cov = 0, lines_tot = 0, branches_cov = 0, branches_tot = 0;
    bool any_coverage = false;
    for (const MethodRecord& r : report.records) {
        for (int i = 0; i < r.test_cases_generated; ++i) {
            TestCaseResult tc;
            tc.focal_id = r.focal_id;
            tc.compiled = i < r.test_cases_compiled;
            tc.passed = i < r.test_cases_passed;
            cases.push_back(tc);
        }
        if (r.removed) ++report.removed;
        for (const std::string& diag : r.failure_diagnostics) {
            ErrorClassification cls = catalog.classify_error(diag);
            ++report.error_breakdown[std::string(pattern_name(cls.pattern))];
        }
        if (r.coverage) {
            any_coverage = true;
            lines_cov += r.coverage->lines_covered;
            lines_tot += r.coverage->lines_total;
            branches_cov += r.coverage->branches_covered;
            branches_tot += r.coverage->branches_total;
        }
    }
    report.correctness = compute_correctness(cases);
    if (any_coverage) {
        report.cov_l = percent(double(lines_cov), double(lines_tot));
        if (branches_tot > 0)
            report.cov_b = percent(double(branches_cov), double(branches_tot));
    }
    return report;
}

std::string render_report_json(const MetricsReport& report) {
    nlohmann::json j;
    j["schema"] = "citywalk-report";
    j["version"] = 1;
    j["metadata"]["aggregation"] = "ratio-of-sums";
    j["metrics"]["csr_percent"] = 100.0 * report.correctness.csr;
    j["metrics"]["epr_percent"] = 100.0 * report.correctness.epr;
    j["metrics"]["cov_l_percent"] =
        report.cov_l ? nlohmann::json(*report.cov_l) : nlohmann::json();
    j["metrics"]["cov_b_percent"] =
        report.cov_b ? nlohmann::json(*report.cov_b) : nlohmann::json();
    j["counts"]["generated"] = report.correctness.generated;
    j["counts"]["compiled"] = report.correctness.compiled;
    j["counts"]["passed"] = report.correctness.passed;
    j["counts"]["removed"] = report.removed;
    j["counts"]["empty_run"] = report.correctness.empty_run;
    j["error_breakdown"] = nlohmann::json::object();
    for (const auto& [name, count] : report.error_breakdown)
        j["error_breakdown"][name] = count;
    auto& methods = j["methods"] = nlohmann::json::array();
    for (const MethodRecord& r : report.records) {
        nlohmann::json m;
        m["focal_id"] = r.focal_id;
        m["test_cases"]["generated"] = r.test_cases_generated;
        m["test_cases"]["compiled"] = r.test_cases_compiled;
        m["test_cases"]["passed"] = r.test_cases_passed;
        m["removed"] = r.removed;
        if (r.coverage) {
            m["coverage"]["lines_covered"] = r.coverage->lines_covered;
            m["coverage"]["lines_total"] = r.coverage->lines_total;
            m["coverage"]["branches_covered"] = r.coverage->branches_covered;
            m["coverage"]["branches_total"] = r.coverage->branches_total;
        } else {
            m["coverage"] = nullptr;
        }
        m["notes"] = r.notes;
        methods.push_back(std::move(m));
    }
    return j.dump(2) + "\n";
}

std::string render_report_table(const MetricsReport& report) {
    std::ostringstream out;
    out << "Metric  Value\n";
    out << "CSR     " << format_percent(100.0 * report.correctness.csr) << "\n";
    out << "EPR     " << format_percent(100.0 * report.correctness.epr) << "\n";
    out << "Cov_L   " << format_percent(report.cov_l) << "\n";
    out << "Cov_B   " << format_percent(report.cov_b) << "\n";
    out << "Counts  generated=" << report.correctness.generated
        << " compiled=" << report.correctness.compiled
        << " passed=" << report.correctness.passed << " removed=" << report.removed << "\n";
    if (!report.error_breakdown.empty()) {
        out << "Errors\n";
        for (const auto& [name, count] : report.error_breakdown)
            out << "  " << name << "  " << count << "\n";
    }
    return out.str();
}

int count_test_cases(const std::string& source) {
    auto tokens = syntax::lex(source);
    int macros = 0;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].kind != syntax::TokenKind::Identifier) continue;
        std::string_view name = syntax::token_text(source, tokens[i]);
        if ((name == "TEST" || name == "TEST_F" || name == "TEST_P") &&
            syntax::token_text(source, tokens[i + 1]) == "(")
            ++macros;
    }
    if (macros > 0) return macros;

    syntax::FileSyntax fsx = syntax::default_backend().parse(source);
    int fns = 0;
    for (const auto& fn : fsx.functions)
        if (fn.is_definition && fn.class_name.empty() && fn.name != "main" &&
            syntax::normalize_ws(fn.return_type) == "void" && fn.param_types.empty())
            ++fns;
    if (fns > 0) return fns;
    return trim(source).empty() ? 0 : 1;
}

}  // namespace citywalk
