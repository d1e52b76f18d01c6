#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskreg/data_model.hpp"
#include "riskreg/family.hpp"
#include "riskreg/model_selection.hpp"
#include "riskreg/quasi_glm.hpp"
#include "riskreg/regularized_path.hpp"

namespace riskreg {

struct SelectionOptions {
    int cv_folds = 10;
    std::uint64_t seed = 0;
    bool stratified = false;
    std::size_t workers = 1;
    std::vector<double> alpha_grid;  // empty: 0.00..1.00 step 0.01
    int lambda_count = 100;
};

// Outcome of one standardize -> select -> fit -> destandardize pass.
struct SelectedFit {
    Eigen::VectorXd beta_std;
    Eigen::VectorXd beta_orig;
    Eigen::VectorXd mu;
    double lambda = 0.0;
    double alpha = 0.0;
    bool cv_ran = false;
    CVResult cv;                 // populated when cv_ran
    bool converged = true;
    int iterations = 0;
    std::string message;
    Eigen::MatrixXd cov_orig;    // sandwich covariance; unpenalized fits only
};

// The estimation pipeline shared by the fit command and every bootstrap
// replicate: standardize, resolve (lambda, alpha) per the penalty mode
// (fixed values or cross-validation), fit, and map back to the original
// scale. Unpenalized fits go through IRLS with the sandwich covariance;
// non-convergence is reported via `converged`, not thrown.
SelectedFit fit_with_selection(const DesignMatrix& dm, const Family& fam,
                               const PenaltyMode& mode, const SelectionOptions& opts);

}  // namespace riskreg
