#pragma once

#include <cstdint>
#include <string>

#include "riskreg/bootstrap_infer.hpp"
#include "riskreg/csv.hpp"
#include "riskreg/data_model.hpp"
#include "riskreg/family.hpp"
#include "riskreg/model_selection.hpp"
#include "riskreg/report.hpp"

namespace riskreg {

struct RunConfig {
    std::string input_path;
    EncodingPlan plan;
    FamilyKind family = FamilyKind::PoissonLog;
    PenaltyMode mode;               // unset lambda/alpha means "select by CV"
    int cv_folds = 10;
    bool stratified = false;
    int lambda_count = 100;

    bool run_bootstrap = false;
    int bootstrap_replicates = 1000;
    bool reselect_lambda = true;
    bool reselect_alpha = false;

    double level = 0.95;
    std::uint64_t seed = 0;
    std::size_t workers = 0;        // 0: RISKREG_THREADS / hardware

    std::string report_path;
    std::string forest_path;

    // Applies the penalty invariants (ridge -> alpha 0, lasso -> alpha 1,
    // none ignores lambda/alpha) and validates ranges.
    void normalize();
};

// encode -> standardize -> (penalized fit with CV selection | IRLS with
// sandwich variance) -> destandardize -> diagnostics -> report. Unpenalized
// fits carry Wald intervals from the sandwich covariance; bootstrap runs
// attach percentile intervals. Non-convergence of an unpenalized fit is an
// error (numeric, module quasi_glm).
AnalysisReport run_fit_command(const RunConfig& cfg, const RawTable& table,
                               std::size_t dropped_rows = 0);
AnalysisReport run_fit_command(const RunConfig& cfg);

// Cross-validation curve (and alpha grid search when alpha is unset).
std::string run_cv_command(const RunConfig& cfg);

// Encoding + diagnostics only; no model fit.
std::string run_diagnose_command(const RunConfig& cfg);

std::string diagnostics_to_json(const DiagnosticsReport& report);

}  // namespace riskreg
