#pragma once

#include <Eigen/Core>

#include "gmvp/rng.hpp"

namespace gmvp {

using Eigen::Index;

struct Estimate {
    double value;
    double std_error;
};

// One draw of the Mahalanobis statistic from its stochastic representation:
// (n-p)/(p-1) ((sqrt(lambda xi3) + w1)^2 + xi4) / xi2 with w1 ~ N(0,1),
// xi2 ~ chi2(n-p), xi3 ~ chi2(n-1), xi4 ~ chi2(p-2) (point mass 0 at p = 2).
double sample_tn_stochastic(double lambda, Index p, Index n, Rng& rng);

// Rank-deficient analogue: (n-q)/k ((sqrt(lambda~ xi3) + w1)^2 + xi4) / xi2
// with xi2 ~ chi2(n-q), xi3 ~ chi2(n-q+k), xi4 ~ chi2(k-1).
double sample_tn_singular_stochastic(double lambda_tilde, Index q, Index k, Index n,
                                     Rng& rng);

// Empirical power of the asymptotic Mahalanobis test over B stochastic
// draws: mean of 1{sqrt(p-1)(T-1)/sqrt(2/(1-c_n)) > z_{1-alpha}} with the
// binomial standard error.
Estimate empirical_power_stochastic(double lambda, Index p, Index n, double alpha,
                                    Index b, RngStream stream);

}  // namespace gmvp
