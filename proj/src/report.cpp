#include "riskreg/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "riskreg/error.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "cli_reporting";
using ordered_json = nlohmann::ordered_json;

ordered_json json_number(double v) {
    // infinities are not representable in JSON; VIF uses them as flags
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

ordered_json term_json(const TermReport& t) {
    ordered_json j;
    j["term"] = t.term;
    j["beta"] = t.beta;
    j["measure"] = t.measure;
    j["estimate"] = t.estimate;
    if (t.beta_lower) {
        j["beta_lower"] = *t.beta_lower;
        j["beta_upper"] = *t.beta_upper;
        j["lower"] = *t.est_lower;
        j["upper"] = *t.est_upper;
    }
    return j;
}
}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string report_to_json(const AnalysisReport& r) {
    ordered_json j;
    j["software"] = {{"name", kSoftwareName}, {"version", kSoftwareVersion}};
    j["config"] = ordered_json{{"family", r.family},
                               {"penalty", r.penalty},
                               {"method", r.method},
                               {"ci_method", r.ci_method},
                               {"seed", r.seed},
                               {"level", r.level}};
    j["data"] = ordered_json{{"n", r.n},
                             {"p", r.p},
                             {"events", r.events},
                             {"dropped_rows", r.dropped_rows}};

    ordered_json sel;
    if (r.lambda) sel["lambda"] = *r.lambda;
    if (r.lambda_1se) sel["lambda_1se"] = *r.lambda_1se;
    if (r.alpha) sel["alpha"] = *r.alpha;
    if (!sel.empty()) j["selection"] = sel;

    j["fit"] = ordered_json{{"converged", r.converged},
                            {"iterations", r.iterations},
                            {"message", r.message}};

    j["intercept"] = term_json(r.intercept);
    j["terms"] = ordered_json::array();
    for (const auto& t : r.terms) j["terms"].push_back(term_json(t));

    ordered_json diag;
    diag["events"] = r.diagnostics.events;
    diag["p"] = r.diagnostics.p;
    diag["epv"] = r.diagnostics.epv;
    diag["epv_printed"] = r.diagnostics.epv_printed;
    if (!r.diagnostics.vif.empty()) {
        ordered_json v = ordered_json::array();
        for (double x : r.diagnostics.vif) v.push_back(json_number(x));
        diag["vif"] = v;
    }
    ordered_json sep = ordered_json::array();
    for (const auto& s : r.diagnostics.separated)
        sep.push_back(ordered_json{{"term", s.term},
                                   {"empty_cell", {{"x", s.cell_x}, {"y", s.cell_y}}}});
    diag["separated_terms"] = sep;
    diag["fitted_out_of_range"] = r.diagnostics.fitted_out_of_range;
    j["diagnostics"] = diag;

    if (r.bootstrap) {
        ordered_json b;
        b["replicates"] = r.bootstrap->replicates;
        b["successes"] = r.bootstrap->successes;
        b["failures"] = r.bootstrap->failures;
        ordered_json reasons = ordered_json::array();
        for (const auto& [msg, count] : r.bootstrap->failure_reasons)
            reasons.push_back(ordered_json{{"count", count}, {"reason", msg}});
        b["failure_reasons"] = reasons;
        j["bootstrap"] = b;
    }
    return j.dump(2) + "\n";
}

void write_report(const AnalysisReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail_validation(kModule, "cannot write report to '" + path + "'");
    out << report_to_json(report);
    if (!out) fail_validation(kModule, "write failed for '" + path + "'");
}

std::string forest_data(const AnalysisReport& r) {
    std::string out = "term\tmeasure\testimate\tlower\tupper\tmethod\n";
    for (const auto& t : r.terms) {
        out += t.term;
        out += '\t';
        out += t.measure;
        out += '\t';
        out += format_number(t.estimate);
        out += '\t';
        out += t.est_lower ? format_number(*t.est_lower) : "";
        out += '\t';
        out += t.est_upper ? format_number(*t.est_upper) : "";
        out += '\t';
        out += r.method;
        out += '\n';
    }
    return out;
}

void emit_forest_data(const AnalysisReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail_validation(kModule, "cannot write forest data to '" + path + "'");
    out << forest_data(report);
    if (!out) fail_validation(kModule, "write failed for '" + path + "'");
}

std::string error_block_json(const std::string& module, const std::string& kind,
                             const std::string& message) {
    ordered_json j;
    j["error"] = ordered_json{{"module", module}, {"kind", kind}, {"message", message}};
    return j.dump(2) + "\n";
}

}  // namespace riskreg
