#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "riskreg/data_model.hpp"
#include "riskreg/family.hpp"

namespace riskreg {

// Elastic-net penalty: lambda * [ (1-alpha)/2 * sum b_j^2 + alpha * sum |b_j| ]
// over slope coefficients; the intercept carries penalty factor 0.
struct PenaltySpec {
    double lambda = 0.0;
    double alpha = 1.0;

    void validate() const;
};

enum class Penalty { None, Ridge, Lasso, ElasticNet };

// Run-level penalty request. Ridge forces alpha = 0, lasso alpha = 1;
// elastic-net takes a fixed alpha or leaves it to cross-validation.
// Unset lambda means "select by cross-validation".
struct PenaltyMode {
    Penalty penalty = Penalty::None;
    std::optional<double> alpha;
    std::optional<double> lambda;

    bool penalized() const { return penalty != Penalty::None; }
    // Fixed alpha implied by the penalty kind, if any.
    std::optional<double> fixed_alpha() const {
        if (penalty == Penalty::Ridge) return 0.0;
        if (penalty == Penalty::Lasso) return 1.0;
        return alpha;
    }
    const char* method_name(FamilyKind fam) const;
};

struct CdOptions {
    double inner_tol = 1e-9;   // max coefficient change within the weighted inner loop
    double outer_tol = 1e-7;   // max coefficient change across outer reweighting steps
    int max_outer = 100;
    long max_sweeps = 100000;
    // When set, receives the penalized objective after every full sweep
    // (Gaussian) or outer iteration (iterative families).
    std::vector<double>* objective_trace = nullptr;
};

double soft_threshold(double z, double gamma);

// Quasi-log-likelihood used by the penalized objectives, up to additive
// constants: Poisson sum(y*eta - exp(eta)); Gaussian -(1/2) sum (y-eta)^2
// with sigma^2 = 1; logit sum(y*eta - log(1+exp(eta))).
double quasi_loglik(const Family& fam, const Eigen::VectorXd& eta, const Eigen::VectorXd& y);

// f(beta) = -(1/n) loglik + penalty. beta is (intercept, slopes); Xstd holds
// the slope columns only.
double penalized_objective(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Xstd,
                           const Eigen::VectorXd& y, const Family& fam,
                           const PenaltySpec& pen);

// Gradient of -(1/n) loglik at beta, length p+1 (index 0 = intercept).
Eigen::VectorXd score_gradient(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Xstd,
                               const Eigen::VectorXd& y, const Family& fam);

// Cyclic coordinate descent minimizer of penalized_objective on standardized
// predictors. Gaussian solves directly; Poisson/logit run an outer IRLS loop
// around a penalized weighted inner loop. Active-set cycling after each full
// sweep. Throws when the iteration caps are exceeded.
Eigen::VectorXd cd_fit(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& y,
                       const Family& fam, const PenaltySpec& pen,
                       const Eigen::VectorXd* warm = nullptr, const CdOptions& opts = {});

// Log-spaced lambda grid from lambda_max (the smallest lambda zeroing all
// slopes) down to eps*lambda_max. eps = 0 selects 1e-4 when n > p, 1e-2
// otherwise.
std::vector<double> lambda_sequence(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& y,
                                    const Family& fam, double alpha, int count = 100,
                                    double eps = 0.0);

struct PathResult {
    std::vector<double> lambdas;                // strictly decreasing
    std::vector<Eigen::VectorXd> beta_std;      // per lambda, intercept first
    std::vector<Eigen::VectorXd> beta_orig;     // destandardized view
    std::vector<int> nonzero;                   // slope nonzero counts
    std::vector<char> converged;                // per-lambda flag
};

// Warm-started path over a decreasing lambda sequence; the first lambda
// starts from the null model.
PathResult fit_path(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& y, const Family& fam,
                    double alpha, const std::vector<double>& lambdas,
                    const Standardizer& std_, const CdOptions& opts = {});

struct KktViolation {
    int index = 0;       // 0 = intercept, j >= 1 = slope j
    double magnitude = 0.0;
};

// Subgradient optimality certificate for a cd_fit solution; empty when the
// stationarity conditions hold within tol.
std::vector<KktViolation> kkt_check(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Xstd,
                                    const Eigen::VectorXd& y, const Family& fam,
                                    const PenaltySpec& pen, double tol = 1e-4);

}  // namespace riskreg
