#include "riskreg/diagnostics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "riskreg/error.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "diagnostics";
}

double epv(std::size_t event_count, std::size_t p) {
    if (p < 1) fail_validation(kModule, "EPV needs at least one term");
    return static_cast<double>(event_count) / static_cast<double>(p);
}

std::string epv_printed(std::size_t event_count, std::size_t p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", epv(event_count, p));
    return buf;
}

std::vector<double> vif(const DesignMatrix& dm) {
    const Eigen::Index p = dm.X.cols();
    if (p < 2) fail_validation(kModule, "VIF needs at least two terms");
    const Eigen::Index n = dm.X.rows();

    std::vector<double> out(static_cast<std::size_t>(p));
    Eigen::MatrixXd others(n, p);  // intercept + remaining columns
    others.col(0).setOnes();
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::Index c = 1;
        for (Eigen::Index l = 0; l < p; ++l)
            if (l != j) others.col(c++) = dm.X.col(l);

        const Eigen::VectorXd xj = dm.X.col(j);
        const double mean = xj.mean();
        const double sst = (xj.array() - mean).square().sum();
        if (sst == 0.0) {
            out[static_cast<std::size_t>(j)] = std::numeric_limits<double>::infinity();
            continue;
        }
        const Eigen::VectorXd coef = others.colPivHouseholderQr().solve(xj);
        const double sse = (xj - others * coef).squaredNorm();
        const double r2 = 1.0 - sse / sst;
        out[static_cast<std::size_t>(j)] =
            r2 >= 1.0 - 1e-10 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - r2);
    }
    return out;
}

std::vector<SeparatedTerm> separation_scan(const DesignMatrix& dm) {
    std::vector<SeparatedTerm> flagged;
    for (std::size_t j = 0; j < dm.terms.size(); ++j) {
        if (!dm.terms[j].is_indicator()) continue;
        std::array<std::array<long, 2>, 2> cells{{{0, 0}, {0, 0}}};
        for (Eigen::Index i = 0; i < dm.X.rows(); ++i) {
            const int x = dm.X(i, static_cast<Eigen::Index>(j)) != 0.0 ? 1 : 0;
            const int y = dm.y(i) != 0.0 ? 1 : 0;
            ++cells[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
        }
        bool done = false;
        for (int x = 0; x < 2 && !done; ++x) {
            for (int y = 0; y < 2 && !done; ++y) {
                if (cells[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] == 0) {
                    flagged.push_back({dm.terms[j].term, x, y});
                    done = true;
                }
            }
        }
    }
    return flagged;
}

std::size_t fitted_range_count(const FitResult& fit) {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < fit.mu.size(); ++i) {
        const double m = fit.mu(i);
        switch (fit.family) {
            case FamilyKind::PoissonLog:
                if (m > 1.0) ++count;
                break;
            case FamilyKind::GaussianIdentity:
                if (m < 0.0 || m > 1.0) ++count;
                break;
            case FamilyKind::BinomialLogit:
                break;
        }
    }
    return count;
}

DiagnosticsReport diagnose(const DesignMatrix& dm, const FitResult* fit) {
    DiagnosticsReport report;
    report.events = dm.events();
    report.p = dm.p();
    report.epv = epv(report.events, report.p);
    report.epv_printed = epv_printed(report.events, report.p);
    if (dm.p() >= 2) report.vif = vif(dm);
    report.separated = separation_scan(dm);
    if (fit) report.fitted_out_of_range = fitted_range_count(*fit);
    return report;
}

}  // namespace riskreg
