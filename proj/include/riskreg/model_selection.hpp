#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "riskreg/data_model.hpp"
#include "riskreg/family.hpp"
#include "riskreg/regularized_path.hpp"

namespace riskreg {

struct FoldAssignment {
    std::vector<int> fold;   // per-row fold index in [0, k)
    int k = 0;
    std::uint64_t seed = 0;
    bool stratified = false;
};

// Deterministic fold split; fold sizes differ by at most one. When
// stratify_on is given (a 0/1 outcome), per-fold event counts also differ by
// at most one.
FoldAssignment make_folds(std::size_t n, int k, std::uint64_t seed,
                          const Eigen::VectorXd* stratify_on = nullptr);

// Held-out loss: Poisson deviance 2*sum[y log(y/mu) - (y - mu)] (0 log 0 = 0),
// Gaussian mean squared error, binomial deviance with mu clipped away from
// {0, 1}.
double cv_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, const Family& fam);

struct CVResult {
    std::vector<double> lambdas;
    std::vector<double> mean_loss;
    std::vector<double> se_loss;
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
    int lambda_min_index = 0;
    int lambda_1se_index = 0;
    double alpha = 1.0;          // alpha the CV ran at
    int failed_folds = 0;
    std::vector<std::string> fold_errors;
};

struct CvOptions {
    int k = 10;
    std::uint64_t seed = 0;
    bool stratified = false;
    std::size_t workers = 1;
    std::vector<double> lambdas;       // empty: computed on the full data
    const FoldAssignment* folds = nullptr;  // overrides k/seed/stratified
    int lambda_count = 100;
    CdOptions cd;
};

// K-fold cross-validation of the regularized path at a fixed alpha. Each
// training split is re-standardized; held-out rows are scored on the
// original scale. Folds whose training split has a single outcome class or
// a constant column are excluded; more than two such folds is an error.
CVResult cross_validate(const DesignMatrix& dm, const Family& fam, double alpha,
                        const CvOptions& opts);

// Grid search over alpha sharing one fold assignment; returns the alpha
// whose lambda_min loss is smallest, ties broken toward the larger (sparser)
// alpha.
std::pair<double, CVResult> select_alpha(const DesignMatrix& dm, const Family& fam,
                                         const std::vector<double>& alpha_grid,
                                         const CvOptions& opts);

std::vector<double> default_alpha_grid();  // 0.00 .. 1.00 step 0.01

}  // namespace riskreg
