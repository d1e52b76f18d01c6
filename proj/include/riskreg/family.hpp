#pragma once

#include <cmath>
#include <limits>

namespace riskreg {

enum class FamilyKind { PoissonLog, GaussianIdentity, BinomialLogit };

// Mean/variance/link triple for the three fitted models. PoissonLog and
// GaussianIdentity are the risk-ratio and risk-difference working models;
// BinomialLogit is carried along for odds-ratio comparison fits only.
struct Family {
    FamilyKind kind = FamilyKind::PoissonLog;
    // Gaussian nuisance scale. Fixed at 1: it rescales the quasi-likelihood
    // but not its maximizer.
    double sigma2 = 1.0;

    static Family poisson_log() { return Family{FamilyKind::PoissonLog}; }
    static Family gaussian_identity() { return Family{FamilyKind::GaussianIdentity}; }
    static Family binomial_logit() { return Family{FamilyKind::BinomialLogit}; }

    double mean(double eta) const {
        switch (kind) {
            case FamilyKind::PoissonLog: return std::exp(eta);
            case FamilyKind::GaussianIdentity: return eta;
            case FamilyKind::BinomialLogit: return 1.0 / (1.0 + std::exp(-eta));
        }
        return eta;
    }

    double variance(double mu) const {
        switch (kind) {
            case FamilyKind::PoissonLog: return mu;
            case FamilyKind::GaussianIdentity: return 1.0;
            case FamilyKind::BinomialLogit: return mu * (1.0 - mu);
        }
        return 1.0;
    }

    double mean_derivative(double eta) const {
        switch (kind) {
            case FamilyKind::PoissonLog: return std::exp(eta);
            case FamilyKind::GaussianIdentity: return 1.0;
            case FamilyKind::BinomialLogit: {
                const double mu = mean(eta);
                return mu * (1.0 - mu);
            }
        }
        return 1.0;
    }

    double link(double mu) const {
        switch (kind) {
            case FamilyKind::PoissonLog: return std::log(mu);
            case FamilyKind::GaussianIdentity: return mu;
            case FamilyKind::BinomialLogit: return std::log(mu / (1.0 - mu));
        }
        return mu;
    }

    // Linear predictor cap applied while iterating exponential-type links.
    double eta_cap() const {
        return kind == FamilyKind::GaussianIdentity
                   ? std::numeric_limits<double>::infinity()
                   : 30.0;
    }

    bool effect_is_exp() const { return kind != FamilyKind::GaussianIdentity; }

    const char* name() const {
        switch (kind) {
            case FamilyKind::PoissonLog: return "poisson-log";
            case FamilyKind::GaussianIdentity: return "gaussian-identity";
            case FamilyKind::BinomialLogit: return "binomial-logit";
        }
        return "?";
    }

    const char* measure_code() const {
        switch (kind) {
            case FamilyKind::PoissonLog: return "RR";
            case FamilyKind::GaussianIdentity: return "RD";
            case FamilyKind::BinomialLogit: return "OR";
        }
        return "?";
    }

    const char* measure_label() const {
        switch (kind) {
            case FamilyKind::PoissonLog: return "risk ratio";
            case FamilyKind::GaussianIdentity: return "risk difference";
            case FamilyKind::BinomialLogit: return "odds ratio";
        }
        return "?";
    }
};

}  // namespace riskreg
