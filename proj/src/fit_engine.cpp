#include "riskreg/fit_engine.hpp"

#include "riskreg/error.hpp"

namespace riskreg {

SelectedFit fit_with_selection(const DesignMatrix& dm, const Family& fam,
                               const PenaltyMode& mode, const SelectionOptions& opts) {
    SelectedFit out;
    auto [xs, std_] = standardize(dm);

    if (!mode.penalized()) {
        const Eigen::MatrixXd x1 = with_intercept(xs);
        const FitResult fit = fit_irls(x1, dm.y, fam);
        out.beta_std = fit.beta_std;
        out.beta_orig = destandardize(fit.beta_std, std_);
        out.mu = fit.mu;
        out.converged = fit.converged;
        out.iterations = fit.iterations;
        out.message = fit.message;
        if (fit.converged)
            out.cov_orig = sandwich_cov(out.beta_orig, with_intercept(dm.X), dm.y, fam);
        return out;
    }

    CvOptions cv_opts;
    cv_opts.k = opts.cv_folds;
    cv_opts.seed = opts.seed;
    cv_opts.stratified = opts.stratified;
    cv_opts.workers = opts.workers;
    cv_opts.lambda_count = opts.lambda_count;

    const std::optional<double> fixed_alpha = mode.fixed_alpha();
    if (fixed_alpha) {
        out.alpha = *fixed_alpha;
        if (mode.lambda) {
            out.lambda = *mode.lambda;
        } else {
            out.cv = cross_validate(dm, fam, out.alpha, cv_opts);
            out.cv_ran = true;
            out.lambda = out.cv.lambda_min;
        }
    } else {
        const std::vector<double> grid =
            opts.alpha_grid.empty() ? default_alpha_grid() : opts.alpha_grid;
        auto [alpha_star, cv] = select_alpha(dm, fam, grid, cv_opts);
        out.alpha = alpha_star;
        out.cv = std::move(cv);
        out.cv_ran = true;
        out.lambda = mode.lambda ? *mode.lambda : out.cv.lambda_min;
    }

    const PenaltySpec pen{out.lambda, out.alpha};
    out.beta_std = cd_fit(xs, dm.y, fam, pen);
    out.beta_orig = destandardize(out.beta_std, std_);
    const Eigen::VectorXd eta =
        (dm.X * out.beta_orig.tail(dm.X.cols())).array() + out.beta_orig(0);
    out.mu = eta.unaryExpr([&](double e) { return fam.mean(e); });
    return out;
}

}  // namespace riskreg
