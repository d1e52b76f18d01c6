#include "riskreg/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "riskreg/error.hpp"
#include "riskreg/parallel.hpp"
#include "riskreg/rng.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "model_selection";
constexpr std::uint64_t kFoldStream = 0x464f4c44ULL;  // domain separation tag

std::vector<std::size_t> shuffled_indices(const std::vector<std::size_t>& idx, Rng& rng) {
    std::vector<std::size_t> out = idx;
    for (std::size_t i = out.size(); i > 1; --i)
        std::swap(out[i - 1], out[rng.next_below(i)]);
    return out;
}
}  // namespace

FoldAssignment make_folds(std::size_t n, int k, std::uint64_t seed,
                          const Eigen::VectorXd* stratify_on) {
    if (k < 2) fail_validation(kModule, "fold count must be >= 2");
    if (static_cast<std::size_t>(k) > n)
        fail_validation(kModule, "fold count " + std::to_string(k) + " exceeds n = " +
                                     std::to_string(n));
    if (stratify_on && static_cast<std::size_t>(stratify_on->size()) != n)
        fail_validation(kModule, "stratification vector length mismatch");

    FoldAssignment fa;
    fa.fold.assign(n, 0);
    fa.k = k;
    fa.seed = seed;
    fa.stratified = stratify_on != nullptr;

    Rng rng(seed, kFoldStream);
    if (!stratify_on) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        const auto order = shuffled_indices(idx, rng);
        for (std::size_t i = 0; i < n; ++i)
            fa.fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    } else {
        // Round-robin each class in turn with a shared fold counter, so both
        // the class counts and the totals stay balanced within one.
        std::vector<std::size_t> ones, zeros;
        for (std::size_t i = 0; i < n; ++i)
            ((*stratify_on)(static_cast<Eigen::Index>(i)) == 1.0 ? ones : zeros).push_back(i);
        std::size_t counter = 0;
        for (const auto* cls : {&ones, &zeros}) {
            const auto order = shuffled_indices(*cls, rng);
            for (std::size_t i : order)
                fa.fold[i] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
        }
    }
    return fa;
}

double cv_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, const Family& fam) {
    if (y.size() != mu.size()) fail_validation(kModule, "y and mu lengths differ");
    if (!mu.allFinite()) fail_numeric(kModule, "non-finite fitted mean in held-out loss");
    switch (fam.kind) {
        case FamilyKind::PoissonLog: {
            double dev = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                if (!(mu(i) > 0.0))
                    fail_numeric(kModule, "non-positive mean under the Poisson loss");
                const double ylog = y(i) > 0.0 ? y(i) * std::log(y(i) / mu(i)) : 0.0;
                dev += 2.0 * (ylog - (y(i) - mu(i)));
            }
            return dev;
        }
        case FamilyKind::GaussianIdentity:
            return (y - mu).squaredNorm() / static_cast<double>(y.size());
        case FamilyKind::BinomialLogit: {
            double dev = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double m = std::clamp(mu(i), 1e-10, 1.0 - 1e-10);
                dev += -2.0 * (y(i) * std::log(m) + (1.0 - y(i)) * std::log(1.0 - m));
            }
            return dev;
        }
    }
    return 0.0;
}

CVResult cross_validate(const DesignMatrix& dm, const Family& fam, double alpha,
                        const CvOptions& opts) {
    const std::size_t n = dm.n();

    FoldAssignment local_folds;
    const FoldAssignment* folds = opts.folds;
    if (!folds) {
        local_folds = make_folds(n, opts.k, opts.seed, opts.stratified ? &dm.y : nullptr);
        folds = &local_folds;
    }
    const int k = folds->k;

    std::vector<double> lambdas = opts.lambdas;
    if (lambdas.empty()) {
        auto [xs, std_] = standardize(dm);
        lambdas = lambda_sequence(xs, dm.y, fam, alpha, opts.lambda_count);
    }
    const std::size_t n_lambda = lambdas.size();

    struct FoldOutcome {
        std::vector<double> loss;   // per lambda
        std::string error;          // nonempty when the fold failed
    };
    std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(k));

    parallel_for(static_cast<std::size_t>(k), opts.workers, [&](std::size_t f) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < n; ++i)
            (folds->fold[i] == static_cast<int>(f) ? test : train).push_back(i);
        auto& out = outcomes[f];
        try {
            const DesignMatrix sub = dm.rows(train);
            const double ybar = sub.y.mean();
            if (ybar == 0.0 || ybar == 1.0)
                fail_numeric(kModule, "training split has a single outcome class");
            auto [xs, std_] = standardize(sub);
            const PathResult path =
                fit_path(xs, sub.y, fam, alpha, lambdas, std_, opts.cd);

            const DesignMatrix held = dm.rows(test);
            const Eigen::MatrixXd x1 = with_intercept(held.X);
            out.loss.resize(n_lambda);
            for (std::size_t l = 0; l < n_lambda; ++l) {
                const Eigen::VectorXd eta = x1 * path.beta_orig[l];
                const Eigen::VectorXd mu =
                    eta.unaryExpr([&](double e) { return fam.mean(e); });
                out.loss[l] = cv_deviance(held.y, mu, fam);
            }
        } catch (const Error& e) {
            out.loss.clear();
            out.error = e.what();
        }
    });

    CVResult cv;
    cv.lambdas = lambdas;
    cv.alpha = alpha;
    std::vector<const std::vector<double>*> ok;
    for (const auto& o : outcomes) {
        if (o.error.empty()) {
            ok.push_back(&o.loss);
        } else {
            ++cv.failed_folds;
            cv.fold_errors.push_back(o.error);
        }
    }
    if (cv.failed_folds > 2)
        fail_numeric(kModule, std::to_string(cv.failed_folds) + " of " + std::to_string(k) +
                                  " folds failed; first error: " + cv.fold_errors.front());

    const double m = static_cast<double>(ok.size());
    cv.mean_loss.resize(n_lambda);
    cv.se_loss.resize(n_lambda);
    for (std::size_t l = 0; l < n_lambda; ++l) {
        double sum = 0.0;
        for (const auto* loss : ok) sum += (*loss)[l];
        const double mean = sum / m;
        double ss = 0.0;
        for (const auto* loss : ok) ss += ((*loss)[l] - mean) * ((*loss)[l] - mean);
        cv.mean_loss[l] = mean;
        cv.se_loss[l] = m > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
        if (!std::isfinite(mean)) fail_numeric(kModule, "non-finite cross-validation loss");
    }

    // lambdas decrease, so the first minimum is the largest minimizing lambda.
    cv.lambda_min_index = 0;
    for (std::size_t l = 1; l < n_lambda; ++l)
        if (cv.mean_loss[l] < cv.mean_loss[static_cast<std::size_t>(cv.lambda_min_index)])
            cv.lambda_min_index = static_cast<int>(l);
    cv.lambda_min = lambdas[static_cast<std::size_t>(cv.lambda_min_index)];

    const double bar = cv.mean_loss[static_cast<std::size_t>(cv.lambda_min_index)] +
                       cv.se_loss[static_cast<std::size_t>(cv.lambda_min_index)];
    cv.lambda_1se_index = cv.lambda_min_index;
    for (std::size_t l = 0; l < n_lambda; ++l) {
        if (cv.mean_loss[l] <= bar) {
            cv.lambda_1se_index = static_cast<int>(l);
            break;
        }
    }
    cv.lambda_1se = lambdas[static_cast<std::size_t>(cv.lambda_1se_index)];
    return cv;
}

std::pair<double, CVResult> select_alpha(const DesignMatrix& dm, const Family& fam,
                                         const std::vector<double>& alpha_grid,
                                         const CvOptions& opts) {
    if (alpha_grid.empty()) fail_validation(kModule, "alpha grid is empty");
    for (double a : alpha_grid)
        if (!(a >= 0.0 && a <= 1.0))
            fail_validation(kModule, "alpha grid value outside [0, 1]");

    FoldAssignment shared;
    CvOptions per_alpha = opts;
    if (!per_alpha.folds) {
        shared = make_folds(dm.n(), opts.k, opts.seed, opts.stratified ? &dm.y : nullptr);
        per_alpha.folds = &shared;
    }
    per_alpha.workers = 1;  // parallelism lives at the grid level

    std::vector<std::optional<CVResult>> results(alpha_grid.size());
    std::vector<std::string> errors(alpha_grid.size());
    parallel_for(alpha_grid.size(), opts.workers, [&](std::size_t a) {
        try {
            results[a] = cross_validate(dm, fam, alpha_grid[a], per_alpha);
        } catch (const Error& e) {
            errors[a] = e.what();
        }
    });

    for (std::size_t a = 0; a < alpha_grid.size(); ++a)
        if (!results[a])
            fail_numeric(kModule, "cross-validation failed at alpha = " +
                                      std::to_string(alpha_grid[a]) + ": " + errors[a]);

    std::size_t best = 0;
    for (std::size_t a = 1; a < alpha_grid.size(); ++a) {
        const double cur = results[a]->mean_loss[static_cast<std::size_t>(
            results[a]->lambda_min_index)];
        const double inc = results[best]->mean_loss[static_cast<std::size_t>(
            results[best]->lambda_min_index)];
        // ties go to the larger (sparser) alpha
        if (cur < inc || (cur == inc && alpha_grid[a] > alpha_grid[best])) best = a;
    }
    return {alpha_grid[best], std::move(*results[best])};
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    grid.reserve(101);
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
    return grid;
}

}  // namespace riskreg
