#pragma once

#include "natspline/smoother.hpp"

namespace natspline {

/// Change of variables x = P0 beta + P1 eta with P_pen P0 = 0 and
/// P1^T P_pen P1 = I.
struct PenaltyFactorization {
    Matrix P0;  // (n+3) x d0
    Matrix P1;  // (n+3) x (n+3-d0)

    int nullspace_dim() const { return static_cast<int>(P0.cols()); }
};

/// Spectral split at the threshold tau. Eigenvalues ascend and every
/// eigenvector is signed so that its first nonzero entry is positive.
PenaltyFactorization factorize_penalty(const PenaltyMatrix& penalty);

/// y = F beta + R eta + w with cov(eta) = sigma_s2 I and cov(w) = sigma_w2 I.
struct MixedModel {
    Matrix F;
    Matrix R;
    double sigma_w2 = 1.0;
    double sigma_s2 = 1.0;

    static MixedModel from_penalty(const PenaltyFactorization& f, double sigma_w2, double sigma_s2);
};

/// Linear maps y -> beta_hat and y -> eta_hat.
struct HendersonOperators {
    Matrix M_beta;
    Matrix M_eta;
};

HendersonOperators henderson_operators(const MixedModel& model);

struct BlueBlup {
    Vector beta;
    Vector eta;
};

/// beta_hat = (F^T V^-1 F)^-1 F^T V^-1 y with V = R Sigma_eta R^T + Sigma_w, and
/// eta_hat = (R^T Sigma_w^-1 R + Sigma_eta^-1)^-1 R^T Sigma_w^-1 (y - F beta_hat).
BlueBlup blue_blup(const MixedModel& model, const Eigen::Ref<const Vector>& y);

struct Equivalence {
    Vector beta;
    Vector eta;
    NaturalCoordinates coords;
};

/// Penalized route: coords = H_P(sigma_w2 / sigma_s2)(0, y, 0), then
/// (beta, eta) from P0 beta + P1 eta = coords. sigma_w2 = 0 is interpolation.
Equivalence equivalence(const KnotGrid& grid, const PenaltyMatrix& penalty,
                        const Eigen::Ref<const Vector>& y, double sigma_w2, double sigma_s2);

}  // namespace natspline
