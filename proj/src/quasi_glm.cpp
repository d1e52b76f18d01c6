#include "riskreg/quasi_glm.hpp"

#include <algorithm>
#include <cmath>

#include "riskreg/error.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "quasi_glm";

void check_dims(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                const Eigen::VectorXd& y) {
    if (X.rows() != y.size() || X.cols() != beta.size())
        fail_validation(kModule, "dimension mismatch: X is " + std::to_string(X.rows()) +
                                     "x" + std::to_string(X.cols()) + ", y has " +
                                     std::to_string(y.size()) + ", beta has " +
                                     std::to_string(beta.size()));
}
}  // namespace

Eigen::VectorXd quasi_score(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y, const Family& fam) {
    check_dims(beta, X, y);
    const Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(beta.size());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double mu = fam.mean(eta(i));
        if (!std::isfinite(mu))
            fail_numeric(kModule, "non-finite mean at row " + std::to_string(i));
        const double d = fam.mean_derivative(eta(i));
        const double v = fam.variance(mu);
        u += X.row(i).transpose() * (d / v * (y(i) - mu));
    }
    return u;
}

FitResult fit_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Family& fam,
                   const IrlsOptions& opts) {
    if (X.rows() != y.size())
        fail_validation(kModule, "X and y row counts differ");
    const Eigen::Index n = X.rows();
    const Eigen::Index q = X.cols();
    const double cap = fam.eta_cap();

    // Start at the null model: intercept = link(ybar), slopes 0. Assumes the
    // first column of X is the intercept.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
    beta(0) = fam.link(y.mean());

    FitResult fit;
    fit.family = fam.kind;

    Eigen::VectorXd eta(n), mu(n), w(n), z(n);
    bool cap_active = false;
    bool met_tolerance = false;
    int iter = 0;
    while (iter < opts.max_iter) {
        eta = X * beta;
        cap_active = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(eta(i)) > cap) {
                eta(i) = std::clamp(eta(i), -cap, cap);
                cap_active = true;
            }
            const double m = fam.mean(eta(i));
            const double d = fam.mean_derivative(eta(i));
            const double v = fam.variance(m);
            mu(i) = m;
            w(i) = d * d / v;
            z(i) = eta(i) + (y(i) - m) / d;
        }

        // Weighted least squares via QR of sqrt(W) X.
        const Eigen::VectorXd sw = w.array().sqrt();
        Eigen::MatrixXd Xw = sw.asDiagonal() * X;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
        if (qr.rank() < q)
            fail_numeric(kModule, "singular weighted Gram matrix at iteration " +
                                      std::to_string(iter + 1));
        const Eigen::VectorXd beta_new = qr.solve(sw.cwiseProduct(z));

        const double delta = (beta_new - beta).cwiseAbs().maxCoeff();
        beta = beta_new;
        ++iter;
        if (delta < opts.tol) {
            met_tolerance = true;
            break;
        }
    }

    fit.beta_std = beta;
    fit.beta_orig = beta;
    fit.iterations = iter;
    fit.mu = (X * beta).unaryExpr([&fam](double e) { return fam.mean(e); });

    if (!met_tolerance) {
        fit.converged = false;
        fit.message = "did not converge in " + std::to_string(opts.max_iter) +
                      " iterations: possible separation";
    } else if (cap_active) {
        fit.converged = false;
        fit.message = "linear predictor capped at |eta| = " + std::to_string(fam.eta_cap()) +
                      ": possible separation";
    } else {
        fit.converged = true;
    }

    if (fit.converged) fit.cov_orig = sandwich_cov(beta, X, y, fam);
    return fit;
}

Eigen::MatrixXd sandwich_cov(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, const Family& fam) {
    check_dims(beta, X, y);
    const Eigen::Index q = X.cols();
    const Eigen::VectorXd eta = X * beta;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(q, q);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double mu = fam.mean(eta(i));
        const double d = fam.mean_derivative(eta(i));
        const double v = fam.variance(mu);
        const Eigen::VectorXd xi = X.row(i).transpose();
        a.noalias() += (d * d / v) * xi * xi.transpose();
        const double s = d * (y(i) - mu) / v;
        b.noalias() += (s * s) * xi * xi.transpose();
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array().abs() < 1e-300).any())
        fail_numeric(kModule, "singular bread matrix in sandwich covariance");
    const Eigen::MatrixXd a_inv = ldlt.solve(Eigen::MatrixXd::Identity(q, q));
    Eigen::MatrixXd cov = a_inv * b * a_inv;
    return 0.5 * (cov + cov.transpose());
}

std::vector<EffectEstimate> effect_measures(const FitResult& fit,
                                            const std::vector<std::string>& term_names) {
    const Family fam{fit.family};
    const auto q = static_cast<std::size_t>(fit.beta_orig.size());
    std::vector<EffectEstimate> out;
    out.reserve(q);
    for (std::size_t j = 0; j < q; ++j) {
        EffectEstimate e;
        if (j == 0) {
            e.term = "(intercept)";
            e.label = "baseline";
        } else {
            e.term = j - 1 < term_names.size() ? term_names[j - 1] : "x" + std::to_string(j);
            e.label = fam.measure_label();
        }
        const double b = fit.beta_orig(static_cast<Eigen::Index>(j));
        e.value = fam.effect_is_exp() ? std::exp(b) : b;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace riskreg
