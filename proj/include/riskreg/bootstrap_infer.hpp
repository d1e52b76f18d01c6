#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "riskreg/data_model.hpp"
#include "riskreg/family.hpp"
#include "riskreg/regularized_path.hpp"

namespace riskreg {

struct BootstrapConfig {
    int replicates = 1000;            // B
    double level = 0.95;
    std::uint64_t seed = 0;           // master seed
    bool reselect_lambda = true;      // re-run CV for lambda per replicate
    bool reselect_alpha = false;      // re-run the alpha grid per replicate
    std::size_t workers = 0;          // 0: RISKREG_THREADS / hardware
    double failure_tolerance = 0.05;  // fraction of B
    int cv_folds = 10;
    bool stratified = false;
    std::vector<double> alpha_grid;   // used when reselect_alpha
    int lambda_count = 100;

    void validate() const;
};

struct TermCI {
    double lower = 0.0;
    double upper = 0.0;
};

struct BootstrapResult {
    Eigen::MatrixXd replicate_coefs;      // B_success x (p+1), original scale
    std::vector<TermCI> coef_ci;          // per term, coefficient scale
    std::vector<TermCI> effect_ci;        // monotone transform of coef_ci
    int attempted = 0;
    int failures = 0;
    std::map<std::string, int> failure_reasons;
    Eigen::VectorXd point_estimate;       // full-data fit, original scale
    double selected_lambda = 0.0;         // full-data selection
    double selected_alpha = 0.0;
};

// n indices drawn with replacement from [0, n). A pure function of
// (master_seed, b): execution order and worker count cannot change it.
std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t master_seed,
                                          std::uint64_t b);

// Empirical interval from order statistics with linear interpolation at
// position 1 + (m-1)q. Non-finite inputs are ignored; at least two finite
// values are required.
std::pair<double, double> percentile_ci(const std::vector<double>& values, double level);

// Inverse standard-normal CDF (Acklam's rational approximation), used for
// the Wald intervals of unpenalized fits.
double normal_quantile(double p);

// Nonparametric bootstrap over individuals: every replicate resamples rows,
// re-encodes against the full-table template, re-standardizes, re-selects
// the tuning parameters per the config, fits, and records original-scale
// coefficients. Failed replicates (single outcome class, constant column,
// non-convergence) are excluded and counted; exceeding the failure tolerance
// is an error.
BootstrapResult bootstrap_pipeline(const RawTable& table, const EncodingPlan& plan,
                                   const Family& fam, const PenaltyMode& mode,
                                   const BootstrapConfig& cfg);

// Same resampling pipeline starting from an already encoded design.
BootstrapResult bootstrap_pipeline(const DesignMatrix& dm, const Family& fam,
                                   const PenaltyMode& mode, const BootstrapConfig& cfg);

}  // namespace riskreg
