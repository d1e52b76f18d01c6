#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "riskreg/data_model.hpp"
#include "riskreg/family.hpp"

namespace riskreg {

struct PredictorSim {
    enum class Kind { Normal, Bernoulli };
    std::string name;
    Kind kind = Kind::Normal;
    double mean = 0.0;   // Normal location
    double sd = 1.0;     // Normal scale
    double prob = 0.5;   // Bernoulli rate
};

struct SimSpec {
    Family family;
    Eigen::VectorXd beta;  // intercept first, aligned with predictors
    std::vector<PredictorSim> predictors;
    std::string outcome_name = "y";
};

// Draws a synthetic cohort under a true risk model: predictors per spec,
// outcome ~ Bernoulli(mean(eta)). Every generated row must yield a valid
// event probability in (0, 1) or the spec is rejected as misspecified.
RawTable simulate_cohort(std::size_t n, const SimSpec& spec, std::uint64_t seed);

}  // namespace riskreg
