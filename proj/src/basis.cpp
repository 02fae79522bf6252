#include "natspline/basis.hpp"

#include <cmath>
#include <string>

namespace natspline {

namespace {

// Thomas factorization of a tridiagonal matrix, applied to many right-hand
// sides. No pivoting: S_bordered is diagonally dominant.
class TridiagonalSolver {
public:
    TridiagonalSolver(const Vector& lower, const Vector& diag, const Vector& upper)
        : lower_(lower), upper_(upper.size()), pivot_(diag.size()) {
        const Eigen::Index m = diag.size();
        pivot_[0] = diag[0];
        check(pivot_[0]);
        if (m > 1) upper_[0] = upper[0] / pivot_[0];
        for (Eigen::Index i = 1; i < m; ++i) {
            pivot_[i] = diag[i] - lower_[i - 1] * upper_[i - 1];
            check(pivot_[i]);
            if (i < m - 1) upper_[i] = upper[i] / pivot_[i];
        }
    }

    void solve_in_place(Eigen::Ref<Matrix> rhs) const {
        const Eigen::Index m = pivot_.size();
        rhs.row(0) /= pivot_[0];
        for (Eigen::Index i = 1; i < m; ++i)
            rhs.row(i) = (rhs.row(i) - lower_[i - 1] * rhs.row(i - 1)) / pivot_[i];
        for (Eigen::Index i = m - 2; i >= 0; --i) rhs.row(i) -= upper_[i] * rhs.row(i + 1);
        require(rhs.allFinite(), ErrorCode::SingularSystem, "non-finite tridiagonal solution");
    }

private:
    static void check(double pivot) {
        require(std::isfinite(pivot) && pivot != 0.0, ErrorCode::SingularSystem,
                "zero pivot in bordered tridiagonal system");
    }

    Vector lower_;
    Vector upper_;
    Vector pivot_;
};

void check_coords(const KnotGrid& grid, const NaturalCoordinates& coords) {
    require(coords.values.size() == grid.size(), ErrorCode::ShapeMismatch,
            "coordinate values have " + std::to_string(coords.values.size()) +
                " entries, grid has " + std::to_string(grid.size()) + " knots");
}

void check_order(int order) {
    require(order >= 0 && order <= 3, ErrorCode::InvalidOrder,
            "derivative order must be in 0..3, got " + std::to_string(order));
}

}  // namespace

SystemMatrices build_system(const KnotGrid& grid) {
    const int n = grid.intervals();
    const Vector& h = grid.spacings();

    SystemMatrices sys;
    sys.q1 = Matrix::Zero(n, n + 1);
    sys.q2 = Matrix::Zero(n, n + 1);
    sys.v_tilde = Matrix::Zero(n, n + 1);
    sys.d = Matrix::Zero(n, n + 1);
    for (int i = 0; i < n; ++i) {
        sys.q1(i, i) = -1.0 / h[i];
        sys.q1(i, i + 1) = 1.0 / h[i];
        sys.q2(i, i) = -h[i] / 3.0;
        sys.q2(i, i + 1) = -h[i] / 6.0;
        sys.v_tilde(i, i) = -1.0 / h[i];
        sys.v_tilde(i, i + 1) = 1.0 / h[i];
        sys.d(i, i) = -1.0 / h[i];
        sys.d(i, i + 1) = 1.0 / h[i];
    }

    sys.s = Matrix::Zero(n - 1, n + 1);
    sys.delta = Matrix::Zero(n - 1, n + 1);
    for (int i = 0; i + 1 < n; ++i) {
        sys.s(i, i) = h[i] / 6.0;
        sys.s(i, i + 1) = (h[i] + h[i + 1]) / 3.0;
        sys.s(i, i + 2) = h[i + 1] / 6.0;
        sys.delta(i, i) = 1.0 / h[i];
        sys.delta(i, i + 1) = -(1.0 / h[i] + 1.0 / h[i + 1]);
        sys.delta(i, i + 2) = 1.0 / h[i + 1];
    }

    sys.s_bordered = Matrix::Zero(n + 1, n + 1);
    sys.s_bordered(0, 0) = 1.0;
    sys.s_bordered.middleRows(1, n - 1) = sys.s;
    sys.s_bordered(n, n) = 1.0;
    return sys;
}

BasisMatrices build_basis(const KnotGrid& grid) {
    const int n = grid.intervals();
    const Vector& h = grid.spacings();
    const SystemMatrices sys = build_system(grid);

    // Right-hand side [e_1^T; 0 Delta 0; e_{n+3}^T] of the u-system.
    Matrix rhs = Matrix::Zero(n + 1, n + 3);
    rhs(0, 0) = 1.0;
    rhs.block(1, 1, n - 1, n + 1) = sys.delta;
    rhs(n, n + 2) = 1.0;

    Vector lower = Vector::Zero(n);
    Vector diag = Vector::Ones(n + 1);
    Vector upper = Vector::Zero(n);
    for (int i = 0; i + 1 < n; ++i) {
        lower[i] = h[i] / 6.0;
        diag[i + 1] = (h[i] + h[i + 1]) / 3.0;
        upper[i + 1] = h[i + 1] / 6.0;
    }
    TridiagonalSolver(lower, diag, upper).solve_in_place(rhs);

    BasisMatrices basis;
    basis.U = std::move(rhs);
    basis.Q = sys.q2 * basis.U;
    basis.Q.middleCols(1, n + 1) += sys.q1;
    basis.V = sys.v_tilde * basis.U;
    return basis;
}

SplineCoefficients coefficients_for(const KnotGrid& grid, const BasisMatrices& basis,
                                    const NaturalCoordinates& coords) {
    check_coords(grid, coords);
    require(basis.U.rows() == grid.size(), ErrorCode::ShapeMismatch,
            "basis was built for a different grid");
    const Vector x = coords.flatten();
    SplineCoefficients c;
    c.p = coords.values;
    c.q = basis.Q * x;
    c.u = basis.U * x;
    c.v = basis.V * x;
    return c;
}

SplineCoefficients coefficients_for(const KnotGrid& grid, const NaturalCoordinates& coords) {
    return coefficients_for(grid, build_basis(grid), coords);
}

double eval(const SplineCoefficients& coeffs, const KnotGrid& grid, double t, int order) {
    check_order(order);
    require(coeffs.p.size() == grid.size() && coeffs.q.size() == grid.intervals() &&
                coeffs.u.size() == grid.size() && coeffs.v.size() == grid.intervals(),
            ErrorCode::ShapeMismatch, "coefficients do not match grid");
    const int i = grid.locate(t);
    const double x = t - grid.knots()[i];
    const double p = coeffs.p[i], q = coeffs.q[i], u = coeffs.u[i], v = coeffs.v[i];
    switch (order) {
        case 0: return p + x * (q + x * (u / 2.0 + x * v / 6.0));
        case 1: return q + x * (u + x * v / 2.0);
        case 2: return u + x * v;
        default: return v;
    }
}

double eval_basis(const KnotGrid& grid, const BasisMatrices& basis, int j, double t, int order) {
    require(j >= 0 && j < grid.coord_dim(), ErrorCode::IndexOutOfRange,
            "basis index " + std::to_string(j) + " outside 0.." + std::to_string(grid.coord_dim() - 1));
    check_order(order);
    const int i = grid.locate(t);
    const double x = t - grid.knots()[i];
    // phi_j restricted to [t_i, t_{i+1}) from column j of Q, U, V
    const double p = (j == i + 1) ? 1.0 : 0.0;
    const double q = basis.Q(i, j), u = basis.U(i, j), v = basis.V(i, j);
    switch (order) {
        case 0: return p + x * (q + x * (u / 2.0 + x * v / 6.0));
        case 1: return q + x * (u + x * v / 2.0);
        case 2: return u + x * v;
        default: return v;
    }
}

double eval_basis(const KnotGrid& grid, int j, double t, int order) {
    return eval_basis(grid, build_basis(grid), j, t, order);
}

SplineCoefficients interpolate_natural(const KnotGrid& grid, const BasisMatrices& basis,
                                       const Eigen::Ref<const Vector>& p) {
    require(p.size() == grid.size(), ErrorCode::ShapeMismatch,
            "interpolation data length does not match knot count");
    return coefficients_for(grid, basis, NaturalCoordinates{0.0, p, 0.0});
}

SplineCoefficients interpolate_natural(const KnotGrid& grid, const Eigen::Ref<const Vector>& p) {
    return interpolate_natural(grid, build_basis(grid), p);
}

}  // namespace natspline
