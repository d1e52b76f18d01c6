#include "riskreg/simulate.hpp"

#include <cmath>

#include "riskreg/error.hpp"
#include "riskreg/rng.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "cli_reporting";
constexpr std::uint64_t kSimStream = 0x53494d55ULL;
}  // namespace

RawTable simulate_cohort(std::size_t n, const SimSpec& spec, std::uint64_t seed) {
    if (n < 1) fail_validation(kModule, "cohort size must be >= 1");
    const std::size_t p = spec.predictors.size();
    if (static_cast<std::size_t>(spec.beta.size()) != p + 1)
        fail_validation(kModule, "beta length must be predictors + 1 (intercept first)");

    Rng rng(seed, kSimStream);
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<double> outcome(n);

    for (std::size_t i = 0; i < n; ++i) {
        double eta = spec.beta(0);
        for (std::size_t j = 0; j < p; ++j) {
            const auto& pr = spec.predictors[j];
            double x;
            if (pr.kind == PredictorSim::Kind::Normal) {
                x = pr.mean + pr.sd * rng.next_normal();
            } else {
                x = rng.next_bernoulli(pr.prob) ? 1.0 : 0.0;
            }
            cols[j][i] = x;
            eta += spec.beta(static_cast<Eigen::Index>(j) + 1) * x;
        }
        const double mu = spec.family.mean(eta);
        if (!(mu > 0.0 && mu < 1.0))
            fail_validation(kModule, "event probability " + std::to_string(mu) + " at row " +
                                         std::to_string(i) +
                                         " is outside (0, 1); the supplied coefficients do "
                                         "not define a risk model");
        outcome[i] = rng.next_bernoulli(mu) ? 1.0 : 0.0;
    }

    RawTable table;
    table.add_binary(spec.outcome_name, std::move(outcome));
    for (std::size_t j = 0; j < p; ++j) {
        if (spec.predictors[j].kind == PredictorSim::Kind::Normal)
            table.add_continuous(spec.predictors[j].name, std::move(cols[j]));
        else
            table.add_binary(spec.predictors[j].name, std::move(cols[j]));
    }
    return table;
}

}  // namespace riskreg
