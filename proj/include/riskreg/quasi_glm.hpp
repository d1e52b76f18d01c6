#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "riskreg/family.hpp"

namespace riskreg {

struct FitResult {
    // Coefficients on the scale the model was fit on (typically standardized)
    // and on the original scale, intercept first. When fitting raw data the
    // two coincide.
    Eigen::VectorXd beta_std;
    Eigen::VectorXd beta_orig;
    Eigen::VectorXd mu;          // fitted means per row
    int iterations = 0;
    bool converged = false;
    std::string message;
    Eigen::MatrixXd cov_orig;    // sandwich covariance, original scale
    FamilyKind family = FamilyKind::PoissonLog;
};

struct IrlsOptions {
    int max_iter = 100;
    double tol = 1e-8;
};

// Quasi-score U(beta) = sum_i D_i^T V_i^{-1} (y_i - mu_i). X carries the
// intercept column. For the canonical links used here this reduces to
// sum_i x_i (y_i - mu_i).
Eigen::VectorXd quasi_score(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y, const Family& fam);

// Unpenalized quasi-ML fit by iteratively reweighted least squares.
// Non-convergence (iteration cap, or the linear-predictor overflow cap still
// active at the final iterate) is reported through `converged`/`message`
// rather than thrown; a singular weighted Gram matrix throws.
FitResult fit_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Family& fam,
                   const IrlsOptions& opts = {});

// A^{-1} B A^{-1} with A = sum D_i^T V_i^{-1} D_i and
// B = sum D_i^T V_i^{-1} (y_i - mu_i)^2 V_i^{-1} D_i.
Eigen::MatrixXd sandwich_cov(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, const Family& fam);

struct EffectEstimate {
    std::string term;
    std::string label;   // "risk ratio" / "risk difference" / "odds ratio" / "baseline"
    double value = 0.0;  // effect scale
};

// Per-term point estimates on the family's effect scale, from the
// original-scale coefficients. Term names default to (intercept), x1..xp.
std::vector<EffectEstimate> effect_measures(const FitResult& fit,
                                            const std::vector<std::string>& term_names = {});

}  // namespace riskreg
