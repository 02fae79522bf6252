#pragma once

#include "natspline/basis.hpp"

#include <vector>

namespace natspline {

struct PenaltyKind {
    enum class Tag { Curvature, Gram, Combined, User };

    Tag tag = Tag::User;
    int r = 2;  // derivative orders, Gram only
    int s = 2;
    double a0 = 0.0;  // Combined only
    double a1 = 0.0;
    double a2 = 0.0;
};

/// A symmetric non-negative quadratic form on natural coordinates.
struct PenaltyMatrix {
    Matrix matrix;
    int nullspace_dim = 0;
    PenaltyKind kind;

    /// Wraps a user matrix, checking symmetry and non-negativity.
    static PenaltyMatrix user(const Eigen::Ref<const Matrix>& m);
};

/// Spectral rank threshold tau = dim * eps * lambda_max.
double spectral_threshold(const Eigen::Ref<const Vector>& eigenvalues);

/// Count of eigenvalues of a symmetric matrix at or below the spectral threshold.
int numerical_nullity(const Eigen::Ref<const Matrix>& symmetric);

/// The affine trend model L = [1 t] and its orthogonal projector.
struct LinearTrend {
    Matrix L;
    Matrix projector;
};

LinearTrend linear_trend(const KnotGrid& grid);

/// Intercept and slope of the regression line fitted to the unit vector e_i.
struct TrendLine {
    double intercept;
    double slope;
};
TrendLine unit_trend_line(const KnotGrid& grid, int i);

/// Integral of |s''|^2 for a C2 cubic with knot second derivatives u.
double j2(const KnotGrid& grid, const Eigen::Ref<const Vector>& u);

/// Curvature penalty C, assembled from outer products of the rows of U.
PenaltyMatrix build_curvature(const KnotGrid& grid, const BasisMatrices& basis);

/// Gram matrix of integrals phi_i^(r) phi_j^(s) over [t_0, t_n], from exact
/// products of the per-interval polynomial coefficients.
Matrix build_gram(const KnotGrid& grid, const BasisMatrices& basis, int r, int s);

/// Matrix of the quadratic form integral |a2 s'' + a1 s' + a0 s|^2.
PenaltyMatrix build_combined(const KnotGrid& grid, const BasisMatrices& basis, double a0, double a1,
                             double a2);

struct ConstrainedMinimum {
    Vector minimizer;
    Vector multiplier;
};

/// Minimizes x^T M x subject to A x = c via the stationarity system
/// M x = A^T l, A x = c. Requires N(A) and N(M) to intersect only in 0.
ConstrainedMinimum solve_constrained_quadratic(const Eigen::Ref<const Matrix>& M,
                                               const Eigen::Ref<const Matrix>& A,
                                               const Eigen::Ref<const Vector>& c);

/// Rows of the identity of size dim, one per listed coordinate index.
Matrix coordinate_selector(int dim, const std::vector<int>& indices);

}  // namespace natspline
