#include "natspline/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace natspline {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Per-interval coefficients of phi_j^(order) in powers of x = t - t_i:
// row k holds the coefficient of x^k for every basis column j.
Matrix derivative_coefficients(const BasisMatrices& basis, int interval, int order) {
    const auto dim = basis.U.cols();
    Matrix a = Matrix::Zero(4, dim);
    a(0, interval + 1) = 1.0;
    a.row(1) = basis.Q.row(interval);
    a.row(2) = basis.U.row(interval) / 2.0;
    a.row(3) = basis.V.row(interval) / 6.0;
    for (int d = 0; d < order; ++d) {
        Matrix next = Matrix::Zero(4, dim);
        for (int k = 1; k < 4; ++k) next.row(k - 1) = k * a.row(k);
        a = std::move(next);
    }
    return a.topRows(4 - order);
}

}  // namespace

double spectral_threshold(const Eigen::Ref<const Vector>& eigenvalues) {
    const double largest = eigenvalues.cwiseAbs().maxCoeff();
    return static_cast<double>(eigenvalues.size()) * std::numeric_limits<double>::epsilon() *
           largest;
}

int numerical_nullity(const Eigen::Ref<const Matrix>& symmetric) {
    if (symmetric.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    const double tau = spectral_threshold(ev);
    return static_cast<int>((ev.array() <= tau).count());
}

PenaltyMatrix PenaltyMatrix::user(const Eigen::Ref<const Matrix>& m) {
    require(m.rows() == m.cols(), ErrorCode::ShapeMismatch, "penalty matrix must be square");
    require(m.allFinite(), ErrorCode::NonFiniteInput, "penalty matrix must be finite");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorCode::InvalidArgument,
            "penalty matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m), Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    require(ev.minCoeff() >= -1e-10 * std::max(ev.maxCoeff(), 0.0), ErrorCode::InvalidArgument,
            "penalty matrix is not non-negative definite");
    PenaltyMatrix p;
    p.matrix = symmetrized(m);
    p.nullspace_dim = numerical_nullity(p.matrix);
    p.kind.tag = PenaltyKind::Tag::User;
    return p;
}

LinearTrend linear_trend(const KnotGrid& grid) {
    const int m = grid.size();
    LinearTrend trend;
    trend.L.resize(m, 2);
    trend.L.col(0).setOnes();
    trend.L.col(1) = grid.knots();
    // centred form of L (L^T L)^-1 L^T, better conditioned than the raw normal equations
    const Vector centred = grid.knots().array() - grid.knots().mean();
    const double spread = centred.squaredNorm();
    trend.projector = Matrix::Constant(m, m, 1.0 / m) + centred * centred.transpose() / spread;
    return trend;
}

TrendLine unit_trend_line(const KnotGrid& grid, int i) {
    require(i >= 0 && i < grid.size(), ErrorCode::IndexOutOfRange,
            "knot index " + std::to_string(i) + " out of range");
    const double mean = grid.knots().mean();
    const double spread = (grid.knots().array() - mean).square().sum();
    const double slope = (grid.knots()[i] - mean) / spread;
    return {1.0 / grid.size() - slope * mean, slope};
}

double j2(const KnotGrid& grid, const Eigen::Ref<const Vector>& u) {
    require(u.size() == grid.size(), ErrorCode::ShapeMismatch,
            "second-derivative vector length does not match knot count");
    const Vector& h = grid.spacings();
    double total = 0.0;
    for (int i = 0; i < grid.intervals(); ++i)
        total += h[i] / 3.0 * (u[i] * u[i] + u[i] * u[i + 1] + u[i + 1] * u[i + 1]);
    return total;
}

PenaltyMatrix build_curvature(const KnotGrid& grid, const BasisMatrices& basis) {
    require(basis.U.rows() == grid.size(), ErrorCode::ShapeMismatch,
            "basis was built for a different grid");
    const int n = grid.intervals();
    const Vector& h = grid.spacings();

    // J2(u) = u^T T u with T tridiagonal, so C = U^T T U.
    Matrix weights = Matrix::Zero(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
        weights(i, i) += h[i] / 3.0;
        weights(i + 1, i + 1) += h[i] / 3.0;
        weights(i, i + 1) += h[i] / 6.0;
        weights(i + 1, i) += h[i] / 6.0;
    }

    PenaltyMatrix c;
    c.matrix = symmetrized(basis.U.transpose() * weights * basis.U);
    c.nullspace_dim = numerical_nullity(c.matrix);
    c.kind.tag = PenaltyKind::Tag::Curvature;
    return c;
}

Matrix build_gram(const KnotGrid& grid, const BasisMatrices& basis, int r, int s) {
    require(r >= 0 && r <= 2 && s >= 0 && s <= 2, ErrorCode::InvalidDerivativeOrder,
            "Gram derivative orders must be in 0..2");
    require(basis.U.rows() == grid.size(), ErrorCode::ShapeMismatch,
            "basis was built for a different grid");
    const int dim = grid.coord_dim();
    const Vector& h = grid.spacings();

    Matrix gram = Matrix::Zero(dim, dim);
    for (int i = 0; i < grid.intervals(); ++i) {
        const Matrix left = derivative_coefficients(basis, i, r);
        const Matrix right = derivative_coefficients(basis, i, s);
        // integral over [0, h] of x^(k1 + k2)
        Matrix moments(left.rows(), right.rows());
        for (Eigen::Index k1 = 0; k1 < left.rows(); ++k1)
            for (Eigen::Index k2 = 0; k2 < right.rows(); ++k2) {
                const auto p = static_cast<double>(k1 + k2 + 1);
                moments(k1, k2) = std::pow(h[i], p) / p;
            }
        gram.noalias() += left.transpose() * moments * right;
    }
    return gram;
}

PenaltyMatrix build_combined(const KnotGrid& grid, const BasisMatrices& basis, double a0, double a1,
                             double a2) {
    require(std::isfinite(a0) && std::isfinite(a1) && std::isfinite(a2), ErrorCode::NonFiniteInput,
            "penalty coefficients must be finite");
    require(a0 != 0.0 || a1 != 0.0 || a2 != 0.0, ErrorCode::AllCoefficientsZero,
            "at least one of a0, a1, a2 must be nonzero");
    const double a[3] = {a0, a1, a2};
    const int dim = grid.coord_dim();

    Matrix m = Matrix::Zero(dim, dim);
    for (int r = 0; r < 3; ++r) {
        for (int s = r; s < 3; ++s) {
            if (a[r] == 0.0 || a[s] == 0.0) continue;
            if (r == 2 && s == 2) {
                m += a2 * a2 * build_curvature(grid, basis).matrix;
            } else if (r == s) {
                m += a[r] * a[r] * build_gram(grid, basis, r, r);
            } else {
                const Matrix g = build_gram(grid, basis, r, s);
                m += a[r] * a[s] * (g + g.transpose());
            }
        }
    }

    PenaltyMatrix p;
    p.matrix = symmetrized(m);
    p.nullspace_dim = numerical_nullity(p.matrix);
    p.kind = PenaltyKind{PenaltyKind::Tag::Combined, 2, 2, a0, a1, a2};
    return p;
}

ConstrainedMinimum solve_constrained_quadratic(const Eigen::Ref<const Matrix>& M,
                                               const Eigen::Ref<const Matrix>& A,
                                               const Eigen::Ref<const Vector>& c) {
    const auto dim = M.rows();
    const auto k = A.rows();
    require(M.cols() == dim && A.cols() == dim && c.size() == k && k > 0, ErrorCode::ShapeMismatch,
            "inconsistent shapes for constrained quadratic");

    Matrix stacked(dim + k, dim);
    stacked << M, A;
    Eigen::ColPivHouseholderQR<Matrix> stacked_qr(stacked);
    stacked_qr.setThreshold(1e-12);
    require(stacked_qr.rank() == dim, ErrorCode::OverlappingNullspaces,
            "N(A) and N(M) share a nonzero vector");

    Eigen::CompleteOrthogonalDecomposition<Matrix> a_cod(A);
    const Vector particular = a_cod.solve(c);
    const double c_scale = std::max(1.0, c.norm());
    require((A * particular - c).norm() <= 1e-9 * c_scale, ErrorCode::InconsistentConstraint,
            "right-hand side is not in the range of A");

    // [M A^T; A 0] [x; -l] = [0; c]
    Matrix kkt = Matrix::Zero(dim + k, dim + k);
    kkt.topLeftCorner(dim, dim) = M;
    kkt.topRightCorner(dim, k) = A.transpose();
    kkt.bottomLeftCorner(k, dim) = A;
    Vector rhs = Vector::Zero(dim + k);
    rhs.tail(k) = c;
    const Vector sol = Eigen::CompleteOrthogonalDecomposition<Matrix>(kkt).solve(rhs);

    ConstrainedMinimum out;
    out.minimizer = sol.head(dim);
    out.multiplier = -sol.tail(k);
    require(out.minimizer.allFinite(), ErrorCode::SingularSystem, "KKT solve failed");
    return out;
}

Matrix coordinate_selector(int dim, const std::vector<int>& indices) {
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(indices.size()), dim);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        require(indices[r] >= 0 && indices[r] < dim, ErrorCode::IndexOutOfRange,
                "selector index out of range");
        a(static_cast<Eigen::Index>(r), indices[r]) = 1.0;
    }
    return a;
}

}  // namespace natspline
