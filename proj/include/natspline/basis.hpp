#pragma once

#include "natspline/core.hpp"

namespace natspline {

/// The sparse building blocks of the C2 continuity system.
///
/// With v = Vtilde u and q = Q1 p + Q2 u the value-continuity equations reduce
/// to S u = Delta p; bordering S with the unit rows for u_0 and u_n gives the
/// invertible tridiagonal S_bordered.
struct SystemMatrices {
    Matrix q1;          // n x (n+1)
    Matrix q2;          // n x (n+1)
    Matrix s;           // (n-1) x (n+1)
    Matrix delta;       // (n-1) x (n+1)
    Matrix s_bordered;  // (n+1) x (n+1)
    Matrix v_tilde;     // n x (n+1)
    Matrix d;           // n x (n+1)
};

/// Maps natural coordinates x = (u_0, p, u_n) to piecewise coefficients:
/// q = Q x, u = U x, v = V x.
struct BasisMatrices {
    Matrix Q;  // n x (n+3)
    Matrix U;  // (n+1) x (n+3)
    Matrix V;  // n x (n+3)
};

SystemMatrices build_system(const KnotGrid& grid);

/// Solves the bordered tridiagonal system once per grid and reuses the
/// factorization for all n+3 right-hand sides.
BasisMatrices build_basis(const KnotGrid& grid);

SplineCoefficients coefficients_for(const KnotGrid& grid, const BasisMatrices& basis,
                                    const NaturalCoordinates& coords);
SplineCoefficients coefficients_for(const KnotGrid& grid, const NaturalCoordinates& coords);

/// Value (order 0) or derivative (orders 1..3) of the piecewise cubic.
/// t == t_n evaluates the left limit of the last piece; order 3 is the
/// piecewise-constant right limit v_i.
double eval(const SplineCoefficients& coeffs, const KnotGrid& grid, double t, int order);

/// phi_j for j = 0..n+2; phi_0 and phi_{n+2} carry the boundary curvatures.
double eval_basis(const KnotGrid& grid, const BasisMatrices& basis, int j, double t, int order);
double eval_basis(const KnotGrid& grid, int j, double t, int order);

/// The natural cubic spline through (t_i, p_i).
SplineCoefficients interpolate_natural(const KnotGrid& grid, const BasisMatrices& basis,
                                       const Eigen::Ref<const Vector>& p);
SplineCoefficients interpolate_natural(const KnotGrid& grid, const Eigen::Ref<const Vector>& p);

}  // namespace natspline
