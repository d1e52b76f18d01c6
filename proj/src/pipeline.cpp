#include "riskreg/pipeline.hpp"

#include <cmath>
#include <json.hpp>

#include "riskreg/diagnostics.hpp"
#include "riskreg/error.hpp"
#include "riskreg/fit_engine.hpp"
#include "riskreg/parallel.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "cli_reporting";
using ordered_json = nlohmann::ordered_json;

double to_effect(const Family& fam, double beta) {
    return fam.effect_is_exp() ? std::exp(beta) : beta;
}

TermReport make_term(const Family& fam, const std::string& name, double beta,
                     bool intercept) {
    TermReport t;
    t.term = name;
    t.beta = beta;
    t.measure = intercept ? "baseline" : fam.measure_code();
    t.estimate = to_effect(fam, beta);
    return t;
}

void attach_ci(TermReport& t, const Family& fam, double lower, double upper) {
    t.beta_lower = lower;
    t.beta_upper = upper;
    t.est_lower = to_effect(fam, lower);
    t.est_upper = to_effect(fam, upper);
}
}  // namespace

void RunConfig::normalize() {
    switch (mode.penalty) {
        case Penalty::Ridge: mode.alpha = 0.0; break;
        case Penalty::Lasso: mode.alpha = 1.0; break;
        case Penalty::None:
            mode.alpha.reset();
            mode.lambda.reset();
            break;
        case Penalty::ElasticNet: break;
    }
    if (mode.alpha && !(*mode.alpha >= 0.0 && *mode.alpha <= 1.0))
        fail_validation(kModule, "alpha must lie in [0, 1]");
    if (mode.lambda && !(*mode.lambda >= 0.0))
        fail_validation(kModule, "lambda must be >= 0");
    if (!(level > 0.0 && level < 1.0))
        fail_validation(kModule, "confidence level must lie in (0, 1)");
    if (cv_folds < 2) fail_validation(kModule, "cv folds must be >= 2");
    if (plan.outcome.empty()) fail_validation(kModule, "no outcome column configured");
    if (plan.predictors.empty()) fail_validation(kModule, "no predictors configured");
}

AnalysisReport run_fit_command(const RunConfig& cfg_in, const RawTable& table,
                               std::size_t dropped_rows) {
    RunConfig cfg = cfg_in;
    cfg.normalize();
    const Family fam{cfg.family};

    const DesignMatrix dm = encode(table, cfg.plan);

    SelectionOptions sel;
    sel.cv_folds = cfg.cv_folds;
    sel.seed = cfg.seed;
    sel.stratified = cfg.stratified;
    sel.workers = resolve_worker_count(cfg.workers);
    sel.lambda_count = cfg.lambda_count;
    const SelectedFit fit = fit_with_selection(dm, fam, cfg.mode, sel);
    if (!fit.converged)
        throw Error(ErrorKind::Numeric, "quasi_glm", fit.message);

    AnalysisReport report;
    report.family = fam.name();
    report.penalty = cfg.mode.penalty == Penalty::None
                         ? "none"
                         : cfg.mode.method_name(fam.kind);
    report.method = cfg.mode.method_name(fam.kind);
    report.seed = cfg.seed;
    report.level = cfg.level;
    report.n = dm.n();
    report.p = dm.p();
    report.events = dm.events();
    report.dropped_rows = dropped_rows;
    report.converged = fit.converged;
    report.iterations = fit.iterations;
    report.message = fit.message;
    if (cfg.mode.penalized()) {
        report.lambda = fit.lambda;
        report.alpha = fit.alpha;
        if (fit.cv_ran) report.lambda_1se = fit.cv.lambda_1se;
    }

    report.intercept = make_term(fam, "(intercept)", fit.beta_orig(0), true);
    const auto names = dm.term_names();
    for (std::size_t j = 0; j < names.size(); ++j)
        report.terms.push_back(make_term(
            fam, names[j], fit.beta_orig(static_cast<Eigen::Index>(j) + 1), false));

    FitResult range_probe;
    range_probe.family = fam.kind;
    range_probe.mu = fit.mu;
    report.diagnostics = diagnose(dm, &range_probe);

    if (cfg.run_bootstrap) {
        BootstrapConfig bcfg;
        bcfg.replicates = cfg.bootstrap_replicates;
        bcfg.level = cfg.level;
        bcfg.seed = cfg.seed;
        bcfg.reselect_lambda = cfg.reselect_lambda;
        bcfg.reselect_alpha = cfg.reselect_alpha;
        bcfg.workers = cfg.workers;
        bcfg.cv_folds = cfg.cv_folds;
        bcfg.stratified = cfg.stratified;
        bcfg.lambda_count = cfg.lambda_count;
        const BootstrapResult boot = bootstrap_pipeline(dm, fam, cfg.mode, bcfg);

        report.ci_method = "bootstrap-percentile";
        attach_ci(report.intercept, fam, boot.coef_ci[0].lower, boot.coef_ci[0].upper);
        for (std::size_t j = 0; j < report.terms.size(); ++j)
            attach_ci(report.terms[j], fam, boot.coef_ci[j + 1].lower,
                      boot.coef_ci[j + 1].upper);

        BootstrapSummary summary;
        summary.replicates = boot.attempted;
        summary.successes = boot.attempted - boot.failures;
        summary.failures = boot.failures;
        summary.failure_reasons = boot.failure_reasons;
        report.bootstrap = summary;
    } else if (!cfg.mode.penalized()) {
        // Wald intervals from the sandwich covariance.
        report.ci_method = "wald";
        const double z = normal_quantile(1.0 - (1.0 - cfg.level) / 2.0);
        auto wald = [&](TermReport& t, Eigen::Index j) {
            const double se = std::sqrt(fit.cov_orig(j, j));
            attach_ci(t, fam, fit.beta_orig(j) - z * se, fit.beta_orig(j) + z * se);
        };
        wald(report.intercept, 0);
        for (std::size_t j = 0; j < report.terms.size(); ++j)
            wald(report.terms[j], static_cast<Eigen::Index>(j) + 1);
    } else {
        report.ci_method = "none";
    }

    return report;
}

AnalysisReport run_fit_command(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.normalize();
    const CsvLoadResult loaded = load_csv(cfg.input_path, cfg.plan);
    return run_fit_command(cfg, loaded.table, loaded.dropped_rows);
}

std::string run_cv_command(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.normalize();
    if (!cfg.mode.penalized())
        fail_validation(kModule, "cross-validation requires a penalty");
    const Family fam{cfg.family};
    const CsvLoadResult loaded = load_csv(cfg.input_path, cfg.plan);
    const DesignMatrix dm = encode(loaded.table, cfg.plan);

    CvOptions opts;
    opts.k = cfg.cv_folds;
    opts.seed = cfg.seed;
    opts.stratified = cfg.stratified;
    opts.workers = resolve_worker_count(cfg.workers);
    opts.lambda_count = cfg.lambda_count;

    double alpha;
    CVResult cv;
    const std::optional<double> fixed_alpha = cfg.mode.fixed_alpha();
    if (fixed_alpha) {
        alpha = *fixed_alpha;
        cv = cross_validate(dm, fam, alpha, opts);
    } else {
        std::tie(alpha, cv) = select_alpha(dm, fam, default_alpha_grid(), opts);
    }

    ordered_json j;
    j["software"] = {{"name", kSoftwareName}, {"version", kSoftwareVersion}};
    j["family"] = fam.name();
    j["alpha"] = alpha;
    j["lambda_min"] = cv.lambda_min;
    j["lambda_1se"] = cv.lambda_1se;
    j["failed_folds"] = cv.failed_folds;
    j["lambdas"] = cv.lambdas;
    j["mean_loss"] = cv.mean_loss;
    j["se_loss"] = cv.se_loss;
    return j.dump(2) + "\n";
}

std::string diagnostics_to_json(const DiagnosticsReport& report) {
    ordered_json j;
    j["events"] = report.events;
    j["p"] = report.p;
    j["epv"] = report.epv;
    j["epv_printed"] = report.epv_printed;
    ordered_json v = ordered_json::array();
    for (double x : report.vif)
        v.push_back(std::isinf(x) ? ordered_json("inf") : ordered_json(x));
    j["vif"] = v;
    ordered_json sep = ordered_json::array();
    for (const auto& s : report.separated)
        sep.push_back(ordered_json{{"term", s.term},
                                   {"empty_cell", {{"x", s.cell_x}, {"y", s.cell_y}}}});
    j["separated_terms"] = sep;
    return j.dump(2) + "\n";
}

std::string run_diagnose_command(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.normalize();
    const CsvLoadResult loaded = load_csv(cfg.input_path, cfg.plan);
    const DesignMatrix dm = encode(loaded.table, cfg.plan);
    return diagnostics_to_json(diagnose(dm));
}

}  // namespace riskreg
