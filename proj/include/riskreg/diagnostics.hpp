#pragma once

#include <string>
#include <vector>

#include "riskreg/data_model.hpp"
#include "riskreg/quasi_glm.hpp"

namespace riskreg {

struct SeparatedTerm {
    std::string term;
    int cell_x = 0;  // indicator value of the empty cell
    int cell_y = 0;  // outcome value of the empty cell
};

struct DiagnosticsReport {
    std::size_t events = 0;
    std::size_t p = 0;
    double epv = 0.0;
    std::string epv_printed;
    std::vector<double> vif;                 // per term; +inf flags collinearity; empty when p < 2
    std::vector<SeparatedTerm> separated;
    std::size_t fitted_out_of_range = 0;
};

double epv(std::size_t event_count, std::size_t p);
// Printed form at 3 significant digits, matching how EPV is conventionally
// reported (e.g. 26/21 -> "1.24", 1610/18 -> "89.4").
std::string epv_printed(std::size_t event_count, std::size_t p);

// VIF_j = 1 / (1 - R^2_j) from regressing column j on the remaining columns
// plus an intercept; R^2 >= 1 - 1e-10 reports +inf.
std::vector<double> vif(const DesignMatrix& dm);

// Per-term 2x2 scan of each indicator column against the outcome; a zero
// cell flags the term.
std::vector<SeparatedTerm> separation_scan(const DesignMatrix& dm);

// Rows whose fitted mean escapes [0, 1]: mu > 1 under PoissonLog, mu outside
// [0, 1] under GaussianIdentity, never under BinomialLogit.
std::size_t fitted_range_count(const FitResult& fit);

DiagnosticsReport diagnose(const DesignMatrix& dm, const FitResult* fit = nullptr);

}  // namespace riskreg
