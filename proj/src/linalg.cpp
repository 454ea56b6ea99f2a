#include "gmvp/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "gmvp/kernels/kernels.hpp"

namespace gmvp::linalg {

namespace {
constexpr double kPivotFloor = 1e-300;
}

MatrixXd gram(const MatrixXd& x) {
    const auto& ops = kernels::active_ops();
    const Index n = x.rows();
    const Index p = x.cols();
    MatrixXd s(p, p);
    ops.syrk_upper(x.data(), static_cast<std::size_t>(n), static_cast<std::size_t>(p),
                   static_cast<std::size_t>(n), s.data(), static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        for (Index i = j + 1; i < p; ++i) s(i, j) = s(j, i);
    }
    return s;
}

bool cholesky_upper_inplace(MatrixXd& a) {
    const auto& ops = kernels::active_ops();
    const Index p = a.rows();
    double* data = a.data();
    for (Index j = 0; j < p; ++j) {
        double* cj = data + j * p;
        for (Index i = 0; i < j; ++i) {
            const double* ci = data + i * p;
            cj[i] = (cj[i] - ops.dot(ci, cj, static_cast<std::size_t>(i))) / ci[i];
        }
        const double d = cj[j] - ops.dot(cj, cj, static_cast<std::size_t>(j));
        if (!(d > kPivotFloor)) return false;
        cj[j] = std::sqrt(d);
    }
    return true;
}

VectorXd solve_transposed_upper(const MatrixXd& u, const VectorXd& b) {
    const auto& ops = kernels::active_ops();
    const Index p = u.rows();
    VectorXd y(p);
    const double* data = u.data();
    for (Index i = 0; i < p; ++i) {
        const double* ci = data + i * p;
        y(i) = (b(i) - ops.dot(ci, y.data(), static_cast<std::size_t>(i))) / ci[i];
    }
    return y;
}

VectorXd solve_upper(const MatrixXd& u, const VectorXd& y) {
    const auto& ops = kernels::active_ops();
    const Index p = u.rows();
    VectorXd x = y;
    const double* data = u.data();
    for (Index k = p - 1; k >= 0; --k) {
        const double* ck = data + k * p;
        x(k) /= ck[k];
        ops.axpy(x.data(), -x(k), ck, static_cast<std::size_t>(k));
    }
    return x;
}

double quad_form(const MatrixXd& s, const VectorXd& v) {
    const auto& ops = kernels::active_ops();
    const Index p = s.rows();
    VectorXd sv = VectorXd::Zero(p);
    const double* data = s.data();
    for (Index j = 0; j < p; ++j) {
        ops.axpy(sv.data(), v(j), data + j * p, static_cast<std::size_t>(p));
    }
    return ops.dot(v.data(), sv.data(), static_cast<std::size_t>(p));
}

double inv_quad_form(const MatrixXd& u, const VectorXd& b) {
    const VectorXd y = solve_transposed_upper(u, b);
    return y.squaredNorm();
}

SymEigen eigen_sym_descending(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(m);
    const Index p = m.rows();
    SymEigen out;
    out.values.resize(p);
    out.vectors.resize(p, p);
    for (Index i = 0; i < p; ++i) {
        out.values(i) = solver.eigenvalues()(p - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(p - 1 - i);
    }
    return out;
}

MatrixXd center_columns(const MatrixXd& x) {
    return x.rowwise() - x.colwise().mean();
}

MatrixXd complete_orthonormal_basis(const MatrixXd& v) {
    const Index p = v.rows();
    const Index m = v.cols();
    if (m >= p) return v;
    if (m == 0) return MatrixXd::Identity(p, p);
    Eigen::HouseholderQR<MatrixXd> qr(v);
    MatrixXd q = qr.householderQ();
    MatrixXd out(p, p);
    out.leftCols(m) = v;
    out.rightCols(p - m) = q.rightCols(p - m);
    return out;
}

SymEigen sample_covariance_eigen(const MatrixXd& xc) {
    const Index n = xc.rows();
    const Index p = xc.cols();
    const double scale = 1.0 / static_cast<double>(n - 1);
    if (p <= n) {
        MatrixXd s = gram(xc);
        s *= scale;
        return eigen_sym_descending(s);
    }
    // Gram trick: an eigenpair (w, v) of W = Xc Xc' * scale maps to the
    // eigenpair (w, Xc'v * sqrt(scale / w)) of Xc'Xc * scale. Non-positive
    // eigenvalues (exact zeros of the rank-deficient estimate) are dropped;
    // callers pad the basis as needed.
    MatrixXd w = xc * xc.transpose() * scale;
    SymEigen small = eigen_sym_descending(w);
    Index m = 0;
    while (m < n && small.values(m) > 0.0) ++m;
    SymEigen out;
    out.values = small.values.head(m);
    out.vectors.resize(p, m);
    for (Index i = 0; i < m; ++i) {
        out.vectors.col(i) =
            xc.transpose() * small.vectors.col(i) * std::sqrt(scale / small.values(i));
    }
    return out;
}

}  // namespace gmvp::linalg
