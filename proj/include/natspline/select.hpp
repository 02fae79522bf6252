#pragma once

#include "natspline/smoother.hpp"

#include <optional>
#include <utility>

namespace natspline {

struct SelectionConfig {
    double sigma2 = 0.0;
    double epsilon = 0.2;
    /// Search interval on log10(lambda).
    std::pair<double, double> lambda_bracket{-10.0, 10.0};
    double tol = 1e-10;

    void validate() const;
};

enum class SelectionMethod { NoiseMatch, BandLower, BandUpper, Sure };

const char* to_string(SelectionMethod method);

struct SelectionResult {
    std::optional<double> lambda;  // empty: no solution exists
    double criterion_value = 0.0;
    SelectionMethod method = SelectionMethod::NoiseMatch;
    /// log10 bracket actually searched (after any expansion).
    std::pair<double, double> bracket{-10.0, 10.0};

    bool found() const { return lambda.has_value(); }
};

/// Eigen-decomposition of the curvature penalty restricted to the complement
/// of the affine trend. With c = E^T y and penalty eigenvalues mu_k,
///   psi(lambda)   = sum_k (lambda mu_k / (1 + lambda mu_k))^2 c_k^2
///   trace H(lambda) = 2 + sum_k 1 / (1 + lambda mu_k)
/// which stays exact at any lambda, including the bracket expansions used by
/// the root finder.
class ResidualSpectrum {
public:
    explicit ResidualSpectrum(const NaturalSmoother& smoother);

    const Vector& eigenvalues() const { return mu_; }
    /// E, (n+1) x (n-1), orthonormal columns spanning R(L)^perp.
    const Matrix& eigenvectors() const { return vectors_; }

    Vector project(const Eigen::Ref<const Vector>& y) const;
    double psi(const Eigen::Ref<const Vector>& coeffs, double lambda) const;
    double trace(double lambda) const;

private:
    Vector mu_;
    Matrix vectors_;
};

/// Residual sum of squares |y - H(lambda) y|^2.
double psi(const Observations& obs, double lambda);

/// |y - Lreg y|^2, the supremum of psi.
double detrended_norm2(const Observations& obs);

/// Finds lambda with psi(lambda) = w_norm2. No solution when
/// |y - Lreg y|^2 <= w_norm2.
SelectionResult solve_noise_match(const Observations& obs, double w_norm2,
                                  const SelectionConfig& cfg = {});

struct LambdaBand {
    SelectionResult lower;
    SelectionResult upper;
};

/// Roots of psi(lambda) = (n+1)(1 -/+ epsilon) sigma^2.
LambdaBand lambda_band(const Observations& obs, const SelectionConfig& cfg);

/// RSS(lambda) + 2 sigma^2 trace H(lambda) - (n+1) sigma^2.
double sure(const Observations& obs, double lambda, double sigma2);
/// RSS(lambda) + 2 sigma^2 trace H(lambda).
double pe_estimate(const Observations& obs, double lambda, double sigma2);

/// Minimizes SURE over the log10 bracket: a 64-point scan picks the basin,
/// golden-section search refines it. Throws BracketTooNarrow when the scan
/// minimum sits on the bracket edge.
SelectionResult minimize_sure(const Observations& obs, double sigma2,
                              std::pair<double, double> bracket = {-10.0, 10.0},
                              double tol = 1e-10);

/// <e_i - Lreg e_i, e_j - Lreg e_j> from the closed form.
double leverage_linear(const KnotGrid& grid, int i, int j);

/// |e_i - H(lambda) e_i|^2.
double nsr_column(const KnotGrid& grid, int i, double lambda);

/// |y - Lreg y|^2 / (n - 1).
double estimate_sigma2(const Observations& obs);

}  // namespace natspline
