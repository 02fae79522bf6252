#include "natspline/bayes.hpp"

#include <cmath>

namespace natspline {

namespace {

void sign_normalize(Matrix& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            const double v = vectors(i, j);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) vectors.col(j) *= -1.0;
                break;
            }
        }
    }
}

Matrix selector_pi(Eigen::Index dim) {
    Matrix pi = Matrix::Zero(dim - 2, dim);
    pi.block(0, 1, dim - 2, dim - 2).setIdentity();
    return pi;
}

}  // namespace

PenaltyFactorization factorize_penalty(const PenaltyMatrix& penalty) {
    const Matrix& p = penalty.matrix;
    require(p.rows() == p.cols(), ErrorCode::ShapeMismatch, "penalty matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    const Vector& ev = eig.eigenvalues();
    const double tau = spectral_threshold(ev);
    const auto d0 = (ev.array() <= tau).count();

    Matrix vectors = eig.eigenvectors();
    sign_normalize(vectors);

    PenaltyFactorization f;
    f.P0 = vectors.leftCols(d0);
    const auto rest = p.rows() - d0;
    f.P1 = vectors.rightCols(rest) * ev.tail(rest).cwiseSqrt().cwiseInverse().asDiagonal();
    return f;
}

MixedModel MixedModel::from_penalty(const PenaltyFactorization& f, double sigma_w2,
                                    double sigma_s2) {
    const Matrix pi = selector_pi(f.P1.rows());
    return {pi * f.P0, pi * f.P1, sigma_w2, sigma_s2};
}

HendersonOperators henderson_operators(const MixedModel& model) {
    require(std::isfinite(model.sigma_w2) && model.sigma_w2 > 0.0, ErrorCode::InvalidArgument,
            "Henderson formulas need sigma_w2 > 0");
    require(std::isfinite(model.sigma_s2) && model.sigma_s2 > 0.0, ErrorCode::InvalidArgument,
            "sigma_s2 must be positive");
    const Matrix& F = model.F;
    const Matrix& R = model.R;
    const auto m = R.rows();
    require(F.rows() == m, ErrorCode::ShapeMismatch, "F and R must have the same row count");

    const Matrix cov = model.sigma_s2 * R * R.transpose() + model.sigma_w2 * Matrix::Identity(m, m);
    const Eigen::LLT<Matrix> cov_llt(cov);
    require(cov_llt.info() == Eigen::Success, ErrorCode::SingularGLS,
            "marginal covariance is not positive definite");

    HendersonOperators ops;
    ops.M_beta = Matrix::Zero(F.cols(), m);
    if (F.cols() > 0) {
        const Matrix cov_inv_f = cov_llt.solve(F);
        const Matrix gls = F.transpose() * cov_inv_f;
        const Eigen::LDLT<Matrix> gls_ldlt(gls);
        const double rcond = gls_ldlt.rcond();
        require(gls_ldlt.info() == Eigen::Success && rcond > 1e-14, ErrorCode::SingularGLS,
                "F^T V^-1 F is singular");
        ops.M_beta = gls_ldlt.solve(cov_inv_f.transpose());
    }

    const auto k = R.cols();
    const Matrix inner = R.transpose() * R / model.sigma_w2 +
                         Matrix::Identity(k, k) / model.sigma_s2;
    const Matrix residual = Matrix::Identity(m, m) - F * ops.M_beta;
    ops.M_eta = inner.llt().solve(R.transpose() * residual) / model.sigma_w2;
    return ops;
}

BlueBlup blue_blup(const MixedModel& model, const Eigen::Ref<const Vector>& y) {
    require(y.size() == model.R.rows(), ErrorCode::ShapeMismatch,
            "observation count does not match the model");
    const HendersonOperators ops = henderson_operators(model);
    return {ops.M_beta * y, ops.M_eta * y};
}

Equivalence equivalence(const KnotGrid& grid, const PenaltyMatrix& penalty,
                        const Eigen::Ref<const Vector>& y, double sigma_w2, double sigma_s2) {
    require(std::isfinite(sigma_s2) && sigma_s2 > 0.0, ErrorCode::InvalidArgument,
            "sigma_s2 must be positive");
    require(std::isfinite(sigma_w2) && sigma_w2 >= 0.0, ErrorCode::InvalidArgument,
            "sigma_w2 must be non-negative");
    const GeneralSmoother smoother(grid, penalty);
    const double lambda = sigma_w2 / sigma_s2;
    const Vector x = lambda == 0.0 ? smoother.limit_zero(y) : smoother.fit(y, lambda);

    const PenaltyFactorization f = factorize_penalty(penalty);
    Matrix basis(x.size(), f.P0.cols() + f.P1.cols());
    basis << f.P0, f.P1;
    const Vector z = basis.partialPivLu().solve(x);

    Equivalence out;
    out.beta = z.head(f.P0.cols());
    out.eta = z.tail(f.P1.cols());
    out.coords = NaturalCoordinates::unflatten(x);
    return out;
}

}  // namespace natspline
