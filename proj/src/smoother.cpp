#include "natspline/smoother.hpp"

#include <cmath>
#include <string>

namespace natspline {

namespace {

void check_lambda(double lambda) {
    require(std::isfinite(lambda), ErrorCode::NonFiniteInput, "lambda must be finite");
    require(lambda >= 0.0, ErrorCode::NegativeLambda,
            "lambda must be non-negative, got " + std::to_string(lambda));
}

void check_positive_lambda(double lambda) {
    require(std::isfinite(lambda), ErrorCode::NonFiniteInput, "lambda must be finite");
    require(lambda > 0.0, ErrorCode::NonPositiveLambda,
            "lambda must be positive, got " + std::to_string(lambda));
}

// Orthonormal basis of the complement of span(1, t).
Matrix complement_basis(const LinearTrend& trend) {
    Eigen::HouseholderQR<Matrix> qr(trend.L);
    const Matrix q = qr.householderQ();
    return q.rightCols(q.cols() - 2);
}

}  // namespace

NaturalSmoother::NaturalSmoother(KnotGrid grid)
    : grid_(std::move(grid)),
      basis_(build_basis(grid_)),
      curvature_(build_curvature(grid_, basis_)),
      middle_(curvature_.matrix.block(1, 1, grid_.size(), grid_.size())),
      trend_(linear_trend(grid_)) {
    complement_ = complement_basis(trend_);
    reduced_ = complement_.transpose() * middle_ * complement_;
    reduced_ = 0.5 * (reduced_ + reduced_.transpose());
}

// C_mid annihilates R(L), so in the basis [R(L), Z] the system
// I + lambda C_mid is block diagonal: identity on R(L) and
// I + lambda Z^T C_mid Z on the complement.
Eigen::LLT<Matrix> NaturalSmoother::factorize(double lambda) const {
    const auto m = reduced_.rows();
    Eigen::LLT<Matrix> llt(Matrix::Identity(m, m) + lambda * reduced_);
    require(llt.info() == Eigen::Success, ErrorCode::SingularSystem,
            "I + lambda C is not positive definite");
    return llt;
}

HatMatrix NaturalSmoother::hat(double lambda) const {
    check_lambda(lambda);
    const int m = grid_.size();
    if (lambda == 0.0) return {Matrix::Identity(m, m), 0.0};
    const Matrix inner = factorize(lambda).solve(complement_.transpose());
    Matrix h = trend_.projector + complement_ * inner;
    return {0.5 * (h + h.transpose()), lambda};
}

Vector NaturalSmoother::fit_values(const Eigen::Ref<const Vector>& y, double lambda) const {
    check_lambda(lambda);
    require(y.size() == grid_.size(), ErrorCode::ShapeMismatch,
            "observation count does not match knot count");
    if (lambda == 0.0) return y;
    const Vector z = complement_.transpose() * y;
    return trend_.projector * y + complement_ * factorize(lambda).solve(z);
}

SmoothFit NaturalSmoother::fit(const Eigen::Ref<const Vector>& y, double lambda) const {
    SmoothFit out;
    out.lambda = lambda;
    out.coords = NaturalCoordinates{0.0, fit_values(y, lambda), 0.0};
    out.rss = (y - out.coords.values).squaredNorm();
    out.fitted_coeffs = coefficients_for(grid_, basis_, out.coords);
    return out;
}

TrendDecomposition NaturalSmoother::decompose(const Eigen::Ref<const Vector>& y,
                                              double lambda) const {
    const Vector fitted = fit_values(y, lambda);
    TrendDecomposition d;
    d.trend = trend_.projector * y;
    d.penalized_part = fitted - d.trend;
    return d;
}

HatMatrix hat_matrix(const KnotGrid& grid, const PenaltyMatrix& curvature, double lambda) {
    require(curvature.matrix.rows() == grid.coord_dim(), ErrorCode::ShapeMismatch,
            "penalty does not match grid");
    require(curvature.kind.tag == PenaltyKind::Tag::Curvature, ErrorCode::InvalidArgument,
            "hat_matrix expects the curvature penalty");
    return NaturalSmoother(grid).hat(lambda);
}

SmoothFit smooth_natural(const Observations& obs, double lambda) {
    return NaturalSmoother(obs.grid).fit(obs.y, lambda);
}

TrendDecomposition decompose_fit(const Observations& obs, double lambda) {
    return NaturalSmoother(obs.grid).decompose(obs.y, lambda);
}

GeneralSmoother::GeneralSmoother(const KnotGrid& grid, PenaltyMatrix penalty)
    : size_(grid.size()), penalty_(std::move(penalty)) {
    const int dim = grid.coord_dim();
    const Matrix& p = penalty_.matrix;
    require(p.rows() == dim && p.cols() == dim, ErrorCode::ShapeMismatch,
            "penalty does not match grid");

    corner_ << p(0, 0), p(0, dim - 1), p(dim - 1, 0), p(dim - 1, dim - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> corner_eig(corner_);
    const double big = corner_eig.eigenvalues().cwiseAbs().maxCoeff();
    require(big > 0.0 && corner_eig.eigenvalues().minCoeff() > 1e-12 * big,
            ErrorCode::SingularCorner, "boundary-curvature corner of the penalty is singular");

    Matrix coupling(2, size_);
    coupling.row(0) = p.block(0, 1, 1, size_);
    coupling.row(1) = p.block(dim - 1, 1, 1, size_);
    gain_ = corner_.inverse() * coupling;
    Matrix schur = p.block(1, 1, size_, size_) - coupling.transpose() * gain_;
    schur_ = 0.5 * (schur + schur.transpose());

    // Null eigenvalues of the Schur complement are exact zeros; keeping their
    // rounding residue would be amplified by large lambda.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(schur_);
    schur_vectors_ = eig.eigenvectors();
    schur_values_ = eig.eigenvalues();
    const double tau = spectral_threshold(schur_values_);
    for (Eigen::Index k = 0; k < schur_values_.size(); ++k)
        if (schur_values_[k] <= tau) schur_values_[k] = 0.0;
}

Matrix GeneralSmoother::shrink(double lambda) const {
    const Vector gains = (1.0 + lambda * schur_values_.array()).inverse();
    return schur_vectors_ * gains.asDiagonal() * schur_vectors_.transpose();
}

Matrix GeneralSmoother::hat(double lambda) const {
    check_positive_lambda(lambda);
    const int dim = size_ + 2;
    const Matrix z = shrink(lambda);
    const Matrix kz = gain_ * z;

    // block inverse of [lambda P_uu, lambda P_up; lambda P_pu, I + lambda P_pp]
    const Matrix inv_uu = corner_.inverse() / lambda + kz * gain_.transpose();
    Matrix h = Matrix::Zero(dim, dim);
    const int last = dim - 1;
    h(0, 0) = inv_uu(0, 0);
    h(0, last) = inv_uu(0, 1);
    h(last, 0) = inv_uu(1, 0);
    h(last, last) = inv_uu(1, 1);
    h.block(0, 1, 1, size_) = -kz.row(0);
    h.block(last, 1, 1, size_) = -kz.row(1);
    h.block(1, 0, size_, 1) = -kz.row(0).transpose();
    h.block(1, last, size_, 1) = -kz.row(1).transpose();
    h.block(1, 1, size_, size_) = z;
    return h;
}

Vector GeneralSmoother::fit(const Eigen::Ref<const Vector>& y, double lambda) const {
    check_positive_lambda(lambda);
    require(y.size() == size_, ErrorCode::ShapeMismatch,
            "observation count does not match knot count");
    const Vector p = shrink(lambda) * y;
    const Eigen::Vector2d u = -gain_ * p;
    Vector x(size_ + 2);
    x << u[0], p, u[1];
    return x;
}

Vector GeneralSmoother::limit_zero(const Eigen::Ref<const Vector>& y) const {
    require(y.size() == size_, ErrorCode::ShapeMismatch,
            "observation count does not match knot count");
    const Eigen::Vector2d u = -gain_ * y;
    Vector x(size_ + 2);
    x << u[0], y, u[1];
    return x;
}

Vector GeneralSmoother::limit_infinity(const Eigen::Ref<const Vector>& y) const {
    require(y.size() == size_, ErrorCode::ShapeMismatch,
            "observation count does not match knot count");
    const Matrix& p = penalty_.matrix;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    const double tau = spectral_threshold(eig.eigenvalues());
    const auto nullity = (eig.eigenvalues().array() <= tau).count();
    require(nullity > 0, ErrorCode::EmptyNullspace,
            "penalty is positive definite; its null space is {0}");

    // eigenvalues ascend, so the null vectors lead
    const Matrix null_basis = eig.eigenvectors().leftCols(nullity);
    const Matrix design = null_basis.middleRows(1, size_);
    const Vector beta = Eigen::CompleteOrthogonalDecomposition<Matrix>(design).solve(y);
    return null_basis * beta;
}

Matrix general_hat(const KnotGrid& grid, const PenaltyMatrix& penalty, double lambda) {
    return GeneralSmoother(grid, penalty).hat(lambda);
}

Vector general_limit_infinity(const KnotGrid& grid, const PenaltyMatrix& penalty,
                              const Eigen::Ref<const Vector>& y) {
    return GeneralSmoother(grid, penalty).limit_infinity(y);
}

}  // namespace natspline
