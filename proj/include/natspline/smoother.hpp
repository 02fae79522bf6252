#pragma once

#include "natspline/penalty.hpp"

namespace natspline {

struct HatMatrix {
    Matrix H;
    double lambda = 0.0;
};

struct SmoothFit {
    NaturalCoordinates coords;
    double lambda = 0.0;
    double rss = 0.0;
    SplineCoefficients fitted_coeffs;
};

struct TrendDecomposition {
    Vector trend;
    Vector penalized_part;
};

/// Penalized smoothing with the curvature penalty. The fitted knot values are
/// p = (I + lambda C_mid)^-1 y where C_mid is the middle (n+1) x (n+1) block of
/// C; the boundary curvatures of the fit are zero.
class NaturalSmoother {
public:
    explicit NaturalSmoother(KnotGrid grid);

    const KnotGrid& grid() const { return grid_; }
    const BasisMatrices& basis() const { return basis_; }
    const PenaltyMatrix& curvature() const { return curvature_; }
    const Matrix& middle_block() const { return middle_; }
    const LinearTrend& trend() const { return trend_; }

    HatMatrix hat(double lambda) const;
    /// p = H(lambda) y without forming H.
    Vector fit_values(const Eigen::Ref<const Vector>& y, double lambda) const;
    SmoothFit fit(const Eigen::Ref<const Vector>& y, double lambda) const;
    TrendDecomposition decompose(const Eigen::Ref<const Vector>& y, double lambda) const;

    /// Orthonormal basis Z of the complement of the affine trend.
    const Matrix& trend_complement() const { return complement_; }
    /// Z^T C_mid Z, positive definite.
    const Matrix& reduced_penalty() const { return reduced_; }

private:
    Eigen::LLT<Matrix> factorize(double lambda) const;

    KnotGrid grid_;
    BasisMatrices basis_;
    PenaltyMatrix curvature_;
    Matrix middle_;
    LinearTrend trend_;
    Matrix complement_;
    Matrix reduced_;
};

HatMatrix hat_matrix(const KnotGrid& grid, const PenaltyMatrix& curvature, double lambda);
SmoothFit smooth_natural(const Observations& obs, double lambda);
TrendDecomposition decompose_fit(const Observations& obs, double lambda);

/// Penalized estimator for an arbitrary penalty on natural coordinates:
/// argmin lambda x^T P x + |y - Pi x|^2, Pi x = p.
///
/// The boundary curvatures are eliminated through the 2x2 corner of P, which
/// must be invertible; the remaining knot-value system is
/// (I + lambda S) p = y with S the Schur complement of the corner.
class GeneralSmoother {
public:
    GeneralSmoother(const KnotGrid& grid, PenaltyMatrix penalty);

    const PenaltyMatrix& penalty() const { return penalty_; }

    /// (lambda P + Pi^T Pi)^-1, of size (n+3) x (n+3).
    Matrix hat(double lambda) const;
    /// H_P(lambda) (0, y, 0).
    Vector fit(const Eigen::Ref<const Vector>& y, double lambda) const;
    /// lambda -> 0 limit: p = y and the boundary curvatures from the corner system.
    Vector limit_zero(const Eigen::Ref<const Vector>& y) const;
    /// lambda -> infinity limit: least squares over N(P).
    Vector limit_infinity(const Eigen::Ref<const Vector>& y) const;

    /// Boundary-curvature gain K with (u_first, u_last) = -K p.
    const Matrix& corner_gain() const { return gain_; }

private:
    Matrix shrink(double lambda) const;  // (I + lambda S)^-1

    int size_;  // n + 1
    PenaltyMatrix penalty_;
    Eigen::Matrix2d corner_;
    Matrix gain_;   // 2 x (n+1)
    Matrix schur_;  // (n+1) x (n+1)
    Matrix schur_vectors_;
    Vector schur_values_;
};

Matrix general_hat(const KnotGrid& grid, const PenaltyMatrix& penalty, double lambda);
Vector general_limit_infinity(const KnotGrid& grid, const PenaltyMatrix& penalty,
                              const Eigen::Ref<const Vector>& y);

}  // namespace natspline
