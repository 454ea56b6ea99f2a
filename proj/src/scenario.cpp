#include "gmvp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmvp/errors.hpp"
#include "gmvp/linalg.hpp"
#include "gmvp/rng.hpp"

namespace gmvp {

VectorXd scenario_eigenvalues(Index q) {
    if (q < 1) throw InputError("scenario_eigenvalues: q must be >= 1");
    const Index n_two = q / 9;
    const Index n_five = 4 * q / 9;
    VectorXd values(q);
    Index i = 0;
    for (Index j = 0; j < n_two; ++j) values(i++) = 2.0;
    for (Index j = 0; j < n_five; ++j) values(i++) = 5.0;
    while (i < q) values(i++) = 10.0;
    return values;
}

ScenarioBasis scenario_basis(Index p, Index q, std::uint64_t seed) {
    if (q < 1 || q > p) throw InputError("scenario_basis: need 1 <= q <= p");
    // Eigenvectors of a standard Wishart draw W_q(q, I), one draw per seed.
    Rng rng(seed, 0);
    MatrixXd z(q, q);
    for (Index j = 0; j < q; ++j) {
        for (Index i = 0; i < q; ++i) z(i, j) = rng.normal();
    }
    const MatrixXd w = z * z.transpose();
    linalg::SymEigen eig = linalg::eigen_sym_descending(w);
    ScenarioBasis basis;
    basis.p = p;
    basis.q = q;
    basis.lambdas = scenario_eigenvalues(q);
    if (p == q) {
        basis.theta = eig.vectors;
    } else {
        basis.theta = MatrixXd::Zero(p, q);
        basis.theta.topRows(q) = eig.vectors;
    }
    return basis;
}

VectorXd contaminated_eigenvalues(const VectorXd& lambdas, Index m, int kappa) {
    if (m < 0 || m > lambdas.size()) {
        throw InputError("contaminated_eigenvalues: m outside [0, q]");
    }
    if (kappa < 0) throw InputError("contaminated_eigenvalues: kappa must be >= 0");
    VectorXd out = lambdas;
    if (kappa == 0) return out;
    const double a = 1.0 + 0.1 * static_cast<double>(kappa);
    for (Index i = 0; i < m; ++i) out(i) *= a * a;
    return out;
}

CovarianceModel assemble_scenario(const ScenarioBasis& basis, Index m, int kappa) {
    const VectorXd lambdas = contaminated_eigenvalues(basis.lambdas, m, kappa);
    // CovarianceModel keeps a nonincreasing spectrum; sort the construction
    // order pairs before assembly.
    std::vector<Index> order(static_cast<std::size_t>(basis.q));
    for (Index i = 0; i < basis.q; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return lambdas(a) > lambdas(b); });
    VectorXd sorted(basis.q);
    MatrixXd vectors(basis.p, basis.q);
    for (Index i = 0; i < basis.q; ++i) {
        sorted(i) = lambdas(order[static_cast<std::size_t>(i)]);
        vectors.col(i) = basis.theta.col(order[static_cast<std::size_t>(i)]);
    }
    return CovarianceModel::from_eigen(std::move(sorted), std::move(vectors),
                                       std::nullopt, basis.q);
}

CovarianceModel build_scenario_sigma(const ScenarioSpec& spec) {
    const ScenarioBasis basis = scenario_basis(spec.p, spec.q, spec.seed);
    return assemble_scenario(basis, 0, 0);
}

CovarianceModel contaminate(const ScenarioBasis& basis, Index m, int kappa) {
    return assemble_scenario(basis, m, kappa);
}

}  // namespace gmvp
