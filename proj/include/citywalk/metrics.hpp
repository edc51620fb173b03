#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citywalk/guidance.hpp"
#include "citywalk/repo_model.hpp"

namespace citywalk {

struct CoverageRecord {
    std::string focal_id;
    int lines_covered = 0;
    int lines_total = 0;
    int branches_covered = 0;
    int branches_total = 0;
};

struct Correctness {
    double csr = 0.0;  // compiled / generated, as a fraction
    double epr = 0.0;  // passed / generated
    int generated = 0;
    int compiled = 0;
    int passed = 0;
    bool empty_run = false;  // generated == 0
};

// One test case = one test function (framework macro or a function invoked
// from the synthesized main).
struct TestCaseResult {
    std::string focal_id;
    std::string test_name;
    bool compiled = false;
    bool passed = false;
};

// Per-focal-method pipeline outcome feeding the report.
struct MethodRecord {
    std::string focal_id;
    int test_cases_generated = 0;
    int test_cases_compiled = 0;
    int test_cases_passed = 0;
    bool removed = false;  // pruned after a still-failing compile
    std::vector<std::string> failure_diagnostics;
    std::optional<CoverageRecord> coverage;  // null on coverage errors
    std::vector<std::string> notes;
};

struct MetricsReport {
    Correctness correctness;
    // Ratio-of-sums project coverage; nullopt when no method has coverage.
    std::optional<double> cov_l;
    std::optional<double> cov_b;
    int removed = 0;
    std::map<std::string, int> error_breakdown;  // pattern name -> count
    std::vector<MethodRecord> records;
};

Correctness compute_correctness(const std::vector<TestCaseResult>& results);

// Parses an LLVM coverage-export JSON document, restricting counts to the
// focal method's file and line span. Malformed input -> nullopt.
std::optional<CoverageRecord> parse_coverage(const std::string& export_json,
                                             const FocalMethod& focal);

MetricsReport aggregate_report(const std::vector<MethodRecord>& records,
                               const GuidanceCatalog& catalog = GuidanceCatalog::builtin());

// Deterministic serializations. JSON is schema-versioned with sorted keys;
// the table is the human-facing rendering.
std::string render_report_json(const MetricsReport& report);
std::string render_report_table(const MetricsReport& report);

// Counts test cases in a generated file: framework TEST/TEST_F macros when
// present, otherwise parameterless void test functions; a nonempty file with
// neither counts as one case.
int count_test_cases(const std::string& source);

}  // namespace citywalk
