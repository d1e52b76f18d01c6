#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riskreg/diagnostics.hpp"

namespace riskreg {

inline constexpr const char* kSoftwareName = "riskreg";
inline constexpr const char* kSoftwareVersion = "0.1.0";

struct TermReport {
    std::string term;
    double beta = 0.0;          // original scale
    std::string measure;        // RR / RD / OR / baseline
    double estimate = 0.0;      // effect scale
    std::optional<double> beta_lower, beta_upper;
    std::optional<double> est_lower, est_upper;
};

struct BootstrapSummary {
    int replicates = 0;
    int successes = 0;
    int failures = 0;
    std::map<std::string, int> failure_reasons;
};

struct AnalysisReport {
    std::string family;
    std::string penalty;       // none / ridge / lasso / elastic-net
    std::string method;        // quasi-ML / ridge / lasso / elastic-net / ML
    std::string ci_method;     // wald / bootstrap-percentile / none
    std::uint64_t seed = 0;
    double level = 0.95;

    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t events = 0;
    std::size_t dropped_rows = 0;

    std::optional<double> lambda, alpha, lambda_1se;
    bool converged = true;
    int iterations = 0;
    std::string message;

    TermReport intercept;            // measure "baseline"
    std::vector<TermReport> terms;   // every encoded term exactly once

    DiagnosticsReport diagnostics;
    std::optional<BootstrapSummary> bootstrap;
};

// Shortest round-trip decimal form; preserves every significant digit.
std::string format_number(double v);

std::string report_to_json(const AnalysisReport& report);
void write_report(const AnalysisReport& report, const std::string& path);

// Tab-separated forest-plot data: header
// term\tmeasure\testimate\tlower\tupper\tmethod
// one row per design term (intercept excluded), empty CI fields when no
// interval was computed.
std::string forest_data(const AnalysisReport& report);
void emit_forest_data(const AnalysisReport& report, const std::string& path);

// Machine-readable failure block mirrored on stderr by the CLI.
std::string error_block_json(const std::string& module, const std::string& kind,
                             const std::string& message);

}  // namespace riskreg
