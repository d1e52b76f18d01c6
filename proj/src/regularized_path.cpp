#include "riskreg/regularized_path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riskreg/error.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "regularized_path";

double log1pexp(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
}  // namespace

void PenaltySpec::validate() const {
    if (!(lambda >= 0.0)) fail_validation(kModule, "lambda must be >= 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail_validation(kModule, "alpha must lie in [0, 1]");
}

const char* PenaltyMode::method_name(FamilyKind fam) const {
    switch (penalty) {
        case Penalty::Ridge: return "ridge";
        case Penalty::Lasso: return "lasso";
        case Penalty::ElasticNet: return "elastic-net";
        case Penalty::None: break;
    }
    return fam == FamilyKind::BinomialLogit ? "ML" : "quasi-ML";
}

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

double quasi_loglik(const Family& fam, const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    double ll = 0.0;
    switch (fam.kind) {
        case FamilyKind::PoissonLog:
            for (Eigen::Index i = 0; i < y.size(); ++i)
                ll += y(i) * eta(i) - std::exp(eta(i));
            break;
        case FamilyKind::GaussianIdentity:
            ll = -0.5 * (y - eta).squaredNorm() / fam.sigma2;
            break;
        case FamilyKind::BinomialLogit:
            for (Eigen::Index i = 0; i < y.size(); ++i)
                ll += y(i) * eta(i) - log1pexp(eta(i));
            break;
    }
    return ll;
}

double penalized_objective(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Xstd,
                           const Eigen::VectorXd& y, const Family& fam,
                           const PenaltySpec& pen) {
    pen.validate();
    if (beta.size() != Xstd.cols() + 1 || Xstd.rows() != y.size())
        fail_validation(kModule, "dimension mismatch in penalized_objective");
    const double n = static_cast<double>(y.size());
    const Eigen::VectorXd eta =
        (Xstd * beta.tail(Xstd.cols())).array() + beta(0);
    const double ll = quasi_loglik(fam, eta, y);
    if (!std::isfinite(ll)) fail_numeric(kModule, "non-finite quasi-log-likelihood");
    double l1 = 0.0, l2 = 0.0;
    for (Eigen::Index j = 1; j < beta.size(); ++j) {
        l1 += std::abs(beta(j));
        l2 += beta(j) * beta(j);
    }
    return -ll / n + pen.lambda * ((1.0 - pen.alpha) / 2.0 * l2 + pen.alpha * l1);
}

Eigen::VectorXd score_gradient(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Xstd,
                               const Eigen::VectorXd& y, const Family& fam) {
    const double n = static_cast<double>(y.size());
    const Eigen::VectorXd eta =
        (Xstd * beta.tail(Xstd.cols())).array() + beta(0);
    Eigen::VectorXd resid(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        resid(i) = y(i) - fam.mean(eta(i));
    Eigen::VectorXd g(beta.size());
    g(0) = -resid.sum() / n;
    g.tail(Xstd.cols()) = -(Xstd.transpose() * resid) / n;
    return g;
}

namespace {

struct CdState {
    Eigen::VectorXd beta;    // intercept first
    long sweeps = 0;
};

// One penalized weighted-least-squares pass. r holds the working residual
// premultiplied by the weights, r_i = w_i (z_i - eta_i), so the Poisson case
// stays bounded even where the weights vanish. wx2 = (1/n) sum w x_j^2.
// Returns the max absolute coefficient change.
double weighted_sweep(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& w,
                      const Eigen::VectorXd& wx2, double w_mean, double n,
                      const PenaltySpec& pen, const std::vector<int>& cols,
                      Eigen::VectorXd& beta, Eigen::VectorXd& r) {
    double max_delta = 0.0;

    // intercept (unpenalized)
    {
        const double delta0 = r.sum() / (w_mean * n);
        if (delta0 != 0.0) {
            beta(0) += delta0;
            r -= delta0 * w;
            max_delta = std::abs(delta0);
        }
    }

    const double denom_ridge = pen.lambda * (1.0 - pen.alpha);
    const double thresh = pen.lambda * pen.alpha;
    for (int j : cols) {
        const double bj = beta(j + 1);
        const double rho = Xstd.col(j).dot(r) / n + wx2(j) * bj;
        const double bj_new = soft_threshold(rho, thresh) / (wx2(j) + denom_ridge);
        const double delta = bj_new - bj;
        if (delta != 0.0) {
            beta(j + 1) = bj_new;
            r -= delta * w.cwiseProduct(Xstd.col(j));
            max_delta = std::max(max_delta, std::abs(delta));
        }
    }
    return max_delta;
}

// Inner coordinate-descent solve of the penalized weighted problem: full
// sweep, then active-set cycling, then a full-sweep recheck before accepting.
void inner_solve(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& w,
                 const Eigen::VectorXd& wx2, double w_mean, double n,
                 const PenaltySpec& pen, const CdOptions& opts, CdState& st,
                 Eigen::VectorXd& r) {
    const int p = static_cast<int>(Xstd.cols());
    std::vector<int> all_cols(p);
    for (int j = 0; j < p; ++j) all_cols[j] = j;

    for (;;) {
        const double delta_full =
            weighted_sweep(Xstd, w, wx2, w_mean, n, pen, all_cols, st.beta, r);
        if (++st.sweeps > opts.max_sweeps)
            fail_numeric(kModule, "coordinate descent sweep cap exceeded");
        if (delta_full < opts.inner_tol) return;

        std::vector<int> active;
        for (int j = 0; j < p; ++j)
            if (st.beta(j + 1) != 0.0) active.push_back(j);

        for (;;) {
            const double delta_active =
                weighted_sweep(Xstd, w, wx2, w_mean, n, pen, active, st.beta, r);
            if (++st.sweeps > opts.max_sweeps)
                fail_numeric(kModule, "coordinate descent sweep cap exceeded");
            if (delta_active < opts.inner_tol) break;
        }
    }
}

}  // namespace

Eigen::VectorXd cd_fit(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& y,
                       const Family& fam, const PenaltySpec& pen,
                       const Eigen::VectorXd* warm, const CdOptions& opts) {
    pen.validate();
    if (Xstd.rows() != y.size()) fail_validation(kModule, "X and y row counts differ");
    const Eigen::Index p = Xstd.cols();
    const double n = static_cast<double>(y.size());

    CdState st;
    if (warm) {
        if (warm->size() != p + 1)
            fail_validation(kModule, "warm start has wrong length");
        st.beta = *warm;
    } else {
        st.beta = Eigen::VectorXd::Zero(p + 1);
        st.beta(0) = fam.link(y.mean());
    }

    if (fam.kind == FamilyKind::GaussianIdentity) {
        // Direct coordinate descent on the squared-error objective.
        const Eigen::VectorXd w = Eigen::VectorXd::Ones(y.size());
        Eigen::VectorXd wx2(p);
        for (Eigen::Index j = 0; j < p; ++j) wx2(j) = Xstd.col(j).squaredNorm() / n;
        Eigen::VectorXd r = y - Eigen::VectorXd::Constant(y.size(), st.beta(0)) -
                            Xstd * st.beta.tail(p);

        std::vector<int> all_cols(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j) all_cols[static_cast<std::size_t>(j)] = j;
        for (;;) {
            const double delta =
                weighted_sweep(Xstd, w, wx2, 1.0, n, pen, all_cols, st.beta, r);
            if (opts.objective_trace)
                opts.objective_trace->push_back(
                    penalized_objective(st.beta, Xstd, y, fam, pen));
            if (++st.sweeps > opts.max_sweeps)
                fail_numeric(kModule, "coordinate descent sweep cap exceeded");
            if (delta < opts.inner_tol) break;

            std::vector<int> active;
            for (int j = 0; j < p; ++j)
                if (st.beta(j + 1) != 0.0) active.push_back(j);
            for (;;) {
                const double delta_active =
                    weighted_sweep(Xstd, w, wx2, 1.0, n, pen, active, st.beta, r);
                if (++st.sweeps > opts.max_sweeps)
                    fail_numeric(kModule, "coordinate descent sweep cap exceeded");
                if (delta_active < opts.inner_tol) break;
            }
        }
        return st.beta;
    }

    // Poisson / logit: outer reweighting loop around the penalized weighted
    // inner loop, with step halving if a quadratic step overshoots.
    const double cap = fam.eta_cap();
    double obj_prev = penalized_objective(st.beta, Xstd, y, fam, pen);
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        const Eigen::VectorXd beta_prev = st.beta;

        Eigen::VectorXd eta = (Xstd * st.beta.tail(p)).array() + st.beta(0);
        Eigen::VectorXd w(y.size()), r(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double e = std::clamp(eta(i), -cap, cap);
            const double mu = fam.mean(e);
            w(i) = fam.kind == FamilyKind::PoissonLog ? mu : mu * (1.0 - mu);
            r(i) = y(i) - mu;  // w * (z - eta) at the linearization point
        }
        const double w_mean = w.mean();
        if (!(w_mean > 0.0)) fail_numeric(kModule, "degenerate weights in reweighting step");
        Eigen::VectorXd wx2(p);
        for (Eigen::Index j = 0; j < p; ++j)
            wx2(j) = Xstd.col(j).cwiseAbs2().dot(w) / n;

        inner_solve(Xstd, w, wx2, w_mean, n, pen, opts, st, r);

        double obj = penalized_objective(st.beta, Xstd, y, fam, pen);
        for (int halving = 0; obj > obj_prev + 1e-12 && halving < 16; ++halving) {
            st.beta = 0.5 * (st.beta + beta_prev);
            obj = penalized_objective(st.beta, Xstd, y, fam, pen);
        }
        if (opts.objective_trace) opts.objective_trace->push_back(obj);
        obj_prev = obj;

        const double outer_delta = (st.beta - beta_prev).cwiseAbs().maxCoeff();
        if (outer_delta < opts.outer_tol) return st.beta;
    }
    fail_numeric(kModule, "outer iteration cap exceeded (" +
                              std::to_string(opts.max_outer) + ")");
}

std::vector<double> lambda_sequence(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& y,
                                    const Family& fam, double alpha, int count, double eps) {
    (void)fam;  // the null-model score is identical across the fitted families
    if (count < 1) fail_validation(kModule, "lambda count must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail_validation(kModule, "alpha must lie in [0, 1]");
    const double n = static_cast<double>(y.size());
    const double ybar = y.mean();
    double gmax = 0.0;
    for (Eigen::Index j = 0; j < Xstd.cols(); ++j)
        gmax = std::max(gmax,
                        std::abs(Xstd.col(j).dot((y.array() - ybar).matrix()) / n));
    if (gmax == 0.0)
        fail_validation(kModule,
                        "outcome is orthogonal to every predictor; fit unpenalized "
                        "(penalty = none) instead");
    // The 1e-12 margin keeps lambda_max * alpha >= gmax under round-off, so
    // the soft-threshold zeroes every slope exactly at the path boundary.
    const double lambda_max = gmax / std::max(alpha, 0.001) * (1.0 + 1e-12);
    if (eps <= 0.0) eps = Xstd.rows() > Xstd.cols() ? 1e-4 : 1e-2;

    std::vector<double> lambdas(static_cast<std::size_t>(count));
    if (count == 1) {
        lambdas[0] = lambda_max;
        return lambdas;
    }
    const double log_max = std::log(lambda_max);
    const double log_min = std::log(eps * lambda_max);
    for (int k = 0; k < count; ++k)
        lambdas[static_cast<std::size_t>(k)] =
            std::exp(log_max + (log_min - log_max) * k / (count - 1));
    lambdas.front() = lambda_max;  // exact at the boundary
    return lambdas;
}

PathResult fit_path(const Eigen::MatrixXd& Xstd, const Eigen::VectorXd& y, const Family& fam,
                    double alpha, const std::vector<double>& lambdas,
                    const Standardizer& std_, const CdOptions& opts) {
    for (std::size_t k = 1; k < lambdas.size(); ++k)
        if (!(lambdas[k] < lambdas[k - 1]))
            fail_validation(kModule, "lambda sequence must be strictly decreasing");

    PathResult path;
    path.lambdas = lambdas;
    path.beta_std.reserve(lambdas.size());
    path.beta_orig.reserve(lambdas.size());

    Eigen::VectorXd warm;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        PenaltySpec pen{lambdas[k], alpha};
        try {
            warm = cd_fit(Xstd, y, fam, pen, k == 0 ? nullptr : &warm, opts);
        } catch (const Error& e) {
            throw Error(e.kind(), e.module(),
                        "path fit failed at lambda index " + std::to_string(k) + " (" +
                            std::to_string(lambdas[k]) + "): " + e.what());
        }
        path.beta_std.push_back(warm);
        path.beta_orig.push_back(destandardize(warm, std_));
        int nz = 0;
        for (Eigen::Index j = 1; j < warm.size(); ++j)
            if (warm(j) != 0.0) ++nz;
        path.nonzero.push_back(nz);
        path.converged.push_back(1);
    }
    return path;
}

std::vector<KktViolation> kkt_check(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Xstd,
                                    const Eigen::VectorXd& y, const Family& fam,
                                    const PenaltySpec& pen, double tol) {
    pen.validate();
    const Eigen::VectorXd g = score_gradient(beta, Xstd, y, fam);
    std::vector<KktViolation> violations;
    if (std::abs(g(0)) > tol)
        violations.push_back({0, std::abs(g(0)) - tol});
    for (Eigen::Index j = 1; j < beta.size(); ++j) {
        double excess;
        if (beta(j) == 0.0) {
            excess = std::abs(g(j)) - pen.lambda * pen.alpha - tol;
        } else {
            const double sign = beta(j) > 0.0 ? 1.0 : -1.0;
            const double resid =
                g(j) + pen.lambda * (1.0 - pen.alpha) * beta(j) + pen.lambda * pen.alpha * sign;
            excess = std::abs(resid) - tol;
        }
        if (excess > 0.0)
            violations.push_back({static_cast<int>(j), excess});
    }
    return violations;
}

}  // namespace riskreg
