#pragma once

#include <cmath>
#include <cstdint>

#include "gmvp/model_core.hpp"

namespace gmvp {

// Simulation scenario: a covariance matrix of dimension p with rank q,
// eigenvalues split 1/9 : 4/9 : rest over the levels {2, 5, 10}, rotated by
// the eigenvectors of a seeded standard Wishart draw. kappa controls the
// alternative: the first m eigenvalues are inflated by (1 + 0.1 kappa)^2.
struct ScenarioSpec {
    Index p = 0;
    Index q = 0;  // q = p for the nonsingular case
    std::uint64_t seed = 0;
    double m_fraction = 0.2;  // m = round(m_fraction * q)
    int kappa = 0;            // a = 1 + 0.1 * kappa
};

// Eigenvalue multiset in construction order: floor(q/9) twos, floor(4q/9)
// fives, the remainder tens.
VectorXd scenario_eigenvalues(Index q);

// The rotation basis: theta (p x q semi-orthogonal, zero-padded outside the
// first q coordinates for q < p) and the base eigenvalues. Deterministic in
// the seed.
struct ScenarioBasis {
    Index p = 0;
    Index q = 0;
    MatrixXd theta;    // p x q
    VectorXd lambdas;  // length q, construction order
};

ScenarioBasis scenario_basis(Index p, Index q, std::uint64_t seed);

// Contaminated eigenvalues: entries [0, m) scaled by (1 + 0.1 kappa)^2.
VectorXd contaminated_eigenvalues(const VectorXd& lambdas, Index m, int kappa);

// Assemble the covariance model for a basis and contamination level.
CovarianceModel assemble_scenario(const ScenarioBasis& basis, Index m, int kappa);

// Base covariance matrix for the scenario (kappa ignored).
CovarianceModel build_scenario_sigma(const ScenarioSpec& spec);

// Alternative-hypothesis covariance at the given contamination.
CovarianceModel contaminate(const ScenarioBasis& basis, Index m, int kappa);

inline Index scenario_m(Index q, double m_fraction) {
    return static_cast<Index>(std::lround(m_fraction * static_cast<double>(q)));
}

}  // namespace gmvp
