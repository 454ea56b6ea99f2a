#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gmvp/errors.hpp"
#include "gmvp/model_core.hpp"
#include "gmvp/rng.hpp"
#include "support/test_util.hpp"

using namespace gmvp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("sample covariance of a constant panel is the zero matrix") {
    MatrixXd data(6, 3);
    for (int i = 0; i < 6; ++i) data.row(i) << 1.0, -2.0, 0.5;
    const CovarianceModel cov = sample_covariance(ReturnsMatrix(data));
    CHECK(cov.matrix().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(cov.rank() == 0);
    CHECK(cov.inverse_kind() == InverseKind::MoorePenrose);
}

TEST_CASE("sample covariance matches the hand-computed 3x2 panel") {
    MatrixXd data(3, 2);
    data << 0, 0, 1, 0, 0, 1;
    const CovarianceModel cov = sample_covariance(ReturnsMatrix(data));
    CHECK(cov.matrix()(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(cov.matrix()(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(cov.matrix()(0, 1) == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("identity-covariance spectrum stays near the support bounds") {
    const Eigen::Index n = 500;
    const Eigen::Index p = 50;
    Rng rng(1234, 0);
    MatrixXd data(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) data(i, j) = rng.normal();
    }
    const CovarianceModel cov = sample_covariance(ReturnsMatrix(data));
    const double c = 0.1;
    const double lo = (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
    const double hi = (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
    const double slack = 0.25;
    CHECK(cov.eigenvalues().minCoeff() > lo - slack);
    CHECK(cov.eigenvalues().maxCoeff() < hi + slack);
    CHECK(cov.rank() == p);
}

TEST_CASE("pseudo-inverse basics") {
    SUBCASE("identity maps to identity") {
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd::Identity(4, 4));
        const CovarianceModel inv = pseudo_inverse(cov);
        CHECK((inv.matrix() - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("diagonal pseudo-inverse zeroes the null direction") {
        MatrixXd d = MatrixXd::Zero(2, 2);
        d(0, 0) = 2.0;
        const CovarianceModel cov = CovarianceModel::from_matrix(d);
        CHECK(cov.rank() == 1);
        const CovarianceModel inv = pseudo_inverse(cov);
        CHECK(inv.matrix()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(inv.matrix()(1, 1)) < 1e-14);
    }
    SUBCASE("Moore-Penrose identities on a random rank-3 matrix") {
        Rng rng(20, 0);
        MatrixXd f(5, 3);
        for (int j = 0; j < 3; ++j) {
            for (int i = 0; i < 5; ++i) f(i, j) = rng.normal();
        }
        const MatrixXd m = f * f.transpose();
        const CovarianceModel cov = CovarianceModel::from_matrix(m);
        CHECK(cov.rank() == 3);
        const MatrixXd pinv = pseudo_inverse(cov).matrix();
        CHECK((m * pinv * m - m).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((pinv * m * pinv - pinv).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(((m * pinv).transpose() - m * pinv).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(((pinv * m).transpose() - pinv * m).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("rank zero is degenerate") {
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd::Zero(3, 3));
        CHECK_THROWS_AS(pseudo_inverse(cov), DegenerateError);
    }
}

TEST_CASE("gmvp weights") {
    SUBCASE("identity covariance gives equal weights") {
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd::Identity(5, 5));
        const PortfolioWeights w = gmvp_weights(cov);
        for (int i = 0; i < 5; ++i) CHECK(w.weights(i) == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("diagonal covariance weights are inverse variances") {
        VectorXd d(3);
        d << 1, 2, 4;
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd(d.asDiagonal()));
        const PortfolioWeights w = gmvp_weights(cov);
        CHECK(w.weights(0) == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
        CHECK(w.weights(1) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
        CHECK(w.weights(2) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    }
    SUBCASE("pseudo-inverse zeroes the null direction") {
        VectorXd d(3);
        d << 1, 1, 0;
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd(d.asDiagonal()));
        const PortfolioWeights w = gmvp_weights(cov);
        CHECK(w.weights(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(w.weights(1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(w.weights(2)) < 1e-14);
        CHECK(w.source == WeightSource::SampleMoorePenrose);
    }
    SUBCASE("weights sum to one on random models") {
        Rng rng(21, 0);
        for (int trial = 0; trial < 10; ++trial) {
            const CovarianceModel cov =
                CovarianceModel::from_matrix(testing::random_spd(6, rng));
            CHECK(std::abs(gmvp_weights(cov).weights.sum() - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("q matrix") {
    SUBCASE("2x2 identity") {
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd::Identity(2, 2));
        const MatrixXd q = q_matrix(cov);
        CHECK(q(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(q(0, 1) == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(q(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("annihilates the ones vector") {
        Rng rng(22, 0);
        for (int trial = 0; trial < 5; ++trial) {
            const CovarianceModel cov =
                CovarianceModel::from_matrix(testing::random_spd(7, rng));
            const VectorXd q1 = q_matrix(cov) * VectorXd::Ones(7);
            CHECK(q1.cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("matches the definition on a diagonal model") {
        VectorXd d(3);
        d << 1, 2, 4;
        const MatrixXd sigma = d.asDiagonal();
        const CovarianceModel cov = CovarianceModel::from_matrix(sigma);
        const MatrixXd sinv = sigma.inverse();
        const VectorXd ones = VectorXd::Ones(3);
        const MatrixXd brute =
            sinv - (sinv * ones) * (ones.transpose() * sinv) / ones.dot(sinv * ones);
        CHECK((q_matrix(cov) - brute).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("lambda_dense") {
    SUBCASE("zero at the GMVP") {
        Rng rng(23, 0);
        const CovarianceModel cov = CovarianceModel::from_matrix(testing::random_spd(5, rng));
        const PortfolioWeights w = gmvp_weights(cov);
        CHECK(lambda_dense(cov, w).value == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("closed form on the 2x2 identity") {
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd::Identity(2, 2));
        VectorXd r(2);
        r << 0.3, 0.7;
        CHECK(lambda_dense(cov, PortfolioWeights(r)).value ==
              doctest::Approx(0.16).epsilon(1e-12));
    }
    SUBCASE("matches the brute-force definition") {
        Rng rng(24, 0);
        for (int trial = 0; trial < 8; ++trial) {
            const MatrixXd sigma = testing::random_spd(4, rng);
            const VectorXd r = testing::random_weights(4, rng);
            const CovarianceModel cov = CovarianceModel::from_matrix(sigma);
            const double expected = testing::oracle_lambda_dense(sigma, r);
            CHECK(lambda_dense(cov, PortfolioWeights(r)).value ==
                  doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("lambda_singular") {
    SUBCASE("zero at the Moore-Penrose GMVP") {
        VectorXd d(3);
        d << 1, 2, 0;
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd(d.asDiagonal()));
        const PortfolioWeights w = gmvp_weights(cov);
        MatrixXd l = MatrixXd::Zero(1, 3);
        l(0, 0) = 1.0;
        const VectorXd r_star = l * w.weights;
        CHECK(lambda_singular(cov, l, r_star).value == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("full-rank case reduces to lambda_dense") {
        Rng rng(25, 0);
        const MatrixXd sigma = testing::random_spd(5, rng);
        const VectorXd r = testing::random_weights(5, rng);
        const CovarianceModel cov = CovarianceModel::from_matrix(sigma);
        MatrixXd l = MatrixXd::Zero(4, 5);
        l.leftCols(4) = MatrixXd::Identity(4, 4);
        const VectorXd r_star = l * r;
        const double dense = lambda_dense(cov, PortfolioWeights(r)).value;
        CHECK(lambda_singular(cov, l, r_star).value ==
              doctest::Approx(dense).epsilon(1e-10));
    }
    SUBCASE("rank-2 diagonal matches the defining formula") {
        VectorXd d(3);
        d << 1, 2, 0;
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd(d.asDiagonal()));
        MatrixXd l = MatrixXd::Zero(1, 3);
        l(0, 0) = 1.0;
        // 1'S+1 = 1.5, w~* = 2/3, Q~* = 1 - 1/1.5 = 1/3.
        const double r_star = 0.25;
        const double expected = 1.5 * (2.0 / 3.0 - r_star) * (2.0 / 3.0 - r_star) * 3.0;
        CHECK(lambda_singular(cov, l, VectorXd::Constant(1, r_star)).value ==
              doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("k above the rank is rejected") {
        VectorXd d(3);
        d << 1, 2, 0;
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd(d.asDiagonal()));
        MatrixXd l = MatrixXd::Identity(3, 3);
        CHECK_THROWS_AS(lambda_singular(cov, l, VectorXd::Zero(3)), InputError);
    }
}

TEST_CASE("relative_loss") {
    SUBCASE("zero at the GMVP") {
        Rng rng(26, 0);
        const CovarianceModel cov = CovarianceModel::from_matrix(testing::random_spd(6, rng));
        CHECK(relative_loss(cov, gmvp_weights(cov)).value ==
              doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("single-asset target against the identity") {
        const Eigen::Index p = 7;
        const CovarianceModel cov =
            CovarianceModel::from_matrix(MatrixXd::Identity(p, p));
        VectorXd e1 = VectorXd::Zero(p);
        e1(0) = 1.0;
        CHECK(relative_loss(cov, PortfolioWeights(e1)).value ==
              doctest::Approx(6.0).epsilon(1e-12));
    }
    SUBCASE("agrees with the lambda-based identity") {
        Rng rng(27, 0);
        const MatrixXd sigma = testing::random_spd(4, rng);
        const VectorXd b = testing::random_weights(4, rng);
        const CovarianceModel cov = CovarianceModel::from_matrix(sigma);
        const double lambda = testing::oracle_lambda_dense(sigma, b);
        const VectorXd ones = VectorXd::Ones(4);
        const MatrixXd sinv = sigma.inverse();
        const double s11 = ones.dot(sinv * ones);
        const VectorXd w = sinv * ones / s11;
        const MatrixXd q = sinv - (sinv * ones) * (ones.transpose() * sinv) / s11;
        const MatrixXd q_star = q.topLeftCorner(3, 3);
        const VectorXd dd = (w - b).head(3);
        const double quad = dd.dot(q_star.inverse() * dd);
        const double via_lambda = lambda * b.dot(sigma * b) / quad - 1.0;
        CHECK(relative_loss(cov, PortfolioWeights(b)).value ==
              doctest::Approx(via_lambda).epsilon(1e-9));
    }
    SUBCASE("hand value for a singular model") {
        VectorXd d(3);
        d << 1, 1, 0;
        const CovarianceModel cov = CovarianceModel::from_matrix(MatrixXd(d.asDiagonal()));
        VectorXd b(3);
        b << 1, 0, 0;
        CHECK(relative_loss(cov, PortfolioWeights(b)).value ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("scale invariance of the core functionals") {
    Rng rng(28, 0);
    const MatrixXd sigma = testing::random_spd(5, rng);
    const VectorXd r = testing::random_weights(5, rng);
    const CovarianceModel cov = CovarianceModel::from_matrix(sigma);
    for (double s : {0.2, 3.0, 1e4}) {
        const CovarianceModel scaled = CovarianceModel::from_matrix(s * sigma);
        CHECK((gmvp_weights(scaled).weights - gmvp_weights(cov).weights)
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
        CHECK(lambda_dense(scaled, PortfolioWeights(r)).value ==
              doctest::Approx(lambda_dense(cov, PortfolioWeights(r)).value)
                  .epsilon(1e-9));
        CHECK(relative_loss(scaled, PortfolioWeights(r)).value ==
              doctest::Approx(relative_loss(cov, PortfolioWeights(r)).value)
                  .epsilon(1e-9));
    }
}

TEST_CASE("full-rank pseudo-inverse coincides with the classical inverse") {
    Rng rng(29, 0);
    const MatrixXd sigma = testing::random_spd(6, rng);
    const CovarianceModel cov = CovarianceModel::from_matrix(sigma);
    const MatrixXd direct = sigma.inverse();
    const MatrixXd mp = pseudo_inverse(cov).matrix();
    CHECK(((mp - direct).cwiseAbs().array() /
           (direct.cwiseAbs().array() + 1e-30))
              .maxCoeff() < 1e-8);
}

TEST_CASE("input validation") {
    auto make_returns = [](const MatrixXd& m) { return ReturnsMatrix(m); };
    auto make_weights = [](const VectorXd& v) { return PortfolioWeights(v); };
    CHECK_THROWS_AS(make_returns(MatrixXd::Zero(1, 3)), InputError);
    MatrixXd bad = MatrixXd::Zero(3, 3);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(make_returns(bad), InputError);
    MatrixXd asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(CovarianceModel::from_matrix(asym), InputError);
    VectorXd w(3);
    w << 0.5, 0.2, 0.2;  // sums to 0.9
    CHECK_THROWS_AS(make_weights(w), InputError);
    // Rank override wins over detection.
    VectorXd d(3);
    d << 4, 2, 1e-18;
    const CovarianceModel cov =
        CovarianceModel::from_matrix(MatrixXd(d.asDiagonal()), std::nullopt, 2);
    CHECK(cov.rank() == 2);
    CHECK(cov.detected_rank() == 2);
}
