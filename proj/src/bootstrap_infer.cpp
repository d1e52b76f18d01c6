#include "riskreg/bootstrap_infer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "riskreg/error.hpp"
#include "riskreg/fit_engine.hpp"
#include "riskreg/parallel.hpp"
#include "riskreg/rng.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "bootstrap_infer";
constexpr std::uint64_t kResampleStream = 0x424f4f54ULL;
constexpr std::uint64_t kReplicateCvTag = 0x43562d42ULL;
}  // namespace

void BootstrapConfig::validate() const {
    if (replicates < 2) fail_validation(kModule, "bootstrap needs at least 2 replicates");
    if (!(level > 0.0 && level < 1.0))
        fail_validation(kModule, "confidence level must lie in (0, 1)");
    if (!(failure_tolerance >= 0.0 && failure_tolerance <= 1.0))
        fail_validation(kModule, "failure tolerance must lie in [0, 1]");
}

std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t master_seed,
                                          std::uint64_t b) {
    if (n < 1) fail_validation(kModule, "cannot resample an empty dataset");
    Rng rng(master_seed, kResampleStream ^ mix64(b));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = static_cast<std::size_t>(rng.next_below(n));
    return idx;
}

std::pair<double, double> percentile_ci(const std::vector<double>& values, double level) {
    if (!(level > 0.0 && level < 1.0))
        fail_validation(kModule, "confidence level must lie in (0, 1)");
    std::vector<double> v;
    v.reserve(values.size());
    for (double x : values)
        if (std::isfinite(x)) v.push_back(x);
    if (v.size() < 2)
        fail_validation(kModule, "percentile interval needs at least 2 finite values");
    std::sort(v.begin(), v.end());

    const double m = static_cast<double>(v.size());
    auto quantile = [&](double q) {
        const double pos = 1.0 + (m - 1.0) * q;  // 1-indexed order statistic
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - std::floor(pos);
        if (lo >= v.size()) return v.back();
        if (frac == 0.0) return v[lo - 1];
        return v[lo - 1] + frac * (v[lo] - v[lo - 1]);
    };
    const double tail = (1.0 - level) / 2.0;
    return {quantile(tail), quantile(1.0 - tail)};
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) fail_validation(kModule, "quantile argument must lie in (0, 1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

BootstrapResult bootstrap_pipeline(const RawTable& table, const EncodingPlan& plan,
                                   const Family& fam, const PenaltyMode& mode,
                                   const BootstrapConfig& cfg) {
    // Encoding the full table once fixes the term template; resampling rows
    // of the encoded design is the per-replicate re-encode against that
    // template (a level absent from a resample shows up as a constant zero
    // dummy and fails standardization, which is the intended failure mode).
    return bootstrap_pipeline(encode(table, plan), fam, mode, cfg);
}

BootstrapResult bootstrap_pipeline(const DesignMatrix& dm, const Family& fam,
                                   const PenaltyMode& mode, const BootstrapConfig& cfg) {
    cfg.validate();
    const std::size_t n = dm.n();
    const std::size_t q = dm.p() + 1;
    const int B = cfg.replicates;

    // Full-data fit establishes the point estimate and the fixed tuning
    // parameters for replicates that do not re-select them.
    SelectionOptions sel;
    sel.cv_folds = cfg.cv_folds;
    sel.stratified = cfg.stratified;
    sel.seed = cfg.seed;
    sel.workers = resolve_worker_count(cfg.workers);
    sel.alpha_grid = cfg.alpha_grid;
    sel.lambda_count = cfg.lambda_count;
    const SelectedFit full = fit_with_selection(dm, fam, mode, sel);
    if (!full.converged)
        fail_numeric(kModule, "full-data fit failed: " + full.message);

    BootstrapResult result;
    result.attempted = B;
    result.point_estimate = full.beta_orig;
    result.selected_lambda = full.lambda;
    result.selected_alpha = full.alpha;

    // Replicate penalty mode: pin whatever is not re-selected.
    PenaltyMode rep_mode = mode;
    if (mode.penalized()) {
        if (!cfg.reselect_lambda) rep_mode.lambda = full.lambda;
        if (!cfg.reselect_alpha && mode.penalty == Penalty::ElasticNet)
            rep_mode.alpha = full.alpha;
    }

    std::vector<std::optional<Eigen::VectorXd>> coefs(static_cast<std::size_t>(B));
    std::vector<std::string> reasons(static_cast<std::size_t>(B));

    parallel_for(static_cast<std::size_t>(B), resolve_worker_count(cfg.workers),
                 [&](std::size_t b) {
                     try {
                         const auto idx = resample_indices(n, cfg.seed, b);
                         const DesignMatrix sub = dm.rows(idx);
                         const double ybar = sub.y.mean();
                         if (ybar == 0.0 || ybar == 1.0)
                             fail_numeric(kModule, "resample has a single outcome class");

                         SelectionOptions rep_sel;
                         rep_sel.cv_folds = cfg.cv_folds;
                         rep_sel.stratified = cfg.stratified;
                         rep_sel.seed = mix64(cfg.seed ^ mix64(b ^ kReplicateCvTag));
                         rep_sel.workers = 1;  // parallelism lives at the replicate level
                         rep_sel.alpha_grid = cfg.alpha_grid;
                         rep_sel.lambda_count = cfg.lambda_count;
                         const SelectedFit fit = fit_with_selection(sub, fam, rep_mode, rep_sel);
                         if (!fit.converged) fail_numeric(kModule, fit.message);
                         coefs[b] = fit.beta_orig;
                     } catch (const Error& e) {
                         reasons[b] = e.what();
                     }
                 });

    std::vector<Eigen::Index> success_rows;
    for (int b = 0; b < B; ++b) {
        if (coefs[static_cast<std::size_t>(b)]) {
            success_rows.push_back(b);
        } else {
            ++result.failures;
            ++result.failure_reasons[reasons[static_cast<std::size_t>(b)]];
        }
    }
    if (static_cast<double>(result.failures) > cfg.failure_tolerance * B) {
        std::string detail;
        for (const auto& [msg, count] : result.failure_reasons)
            detail += "\n  " + std::to_string(count) + "x " + msg;
        fail_numeric(kModule, std::to_string(result.failures) + " of " + std::to_string(B) +
                                  " bootstrap replicates failed (tolerance " +
                                  std::to_string(cfg.failure_tolerance) + "):" + detail);
    }

    result.replicate_coefs.resize(static_cast<Eigen::Index>(success_rows.size()),
                                  static_cast<Eigen::Index>(q));
    for (std::size_t r = 0; r < success_rows.size(); ++r)
        result.replicate_coefs.row(static_cast<Eigen::Index>(r)) =
            coefs[static_cast<std::size_t>(success_rows[r])]->transpose();

    result.coef_ci.resize(q);
    result.effect_ci.resize(q);
    for (std::size_t j = 0; j < q; ++j) {
        std::vector<double> col(success_rows.size());
        for (std::size_t r = 0; r < success_rows.size(); ++r)
            col[r] = result.replicate_coefs(static_cast<Eigen::Index>(r),
                                            static_cast<Eigen::Index>(j));
        const auto [lo, hi] = percentile_ci(col, cfg.level);
        result.coef_ci[j] = {lo, hi};
        result.effect_ci[j] = fam.effect_is_exp()
                                  ? TermCI{std::exp(lo), std::exp(hi)}
                                  : TermCI{lo, hi};
    }
    return result;
}

}  // namespace riskreg
