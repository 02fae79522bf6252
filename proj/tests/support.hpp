#pragma once

#include "natspline/bayes.hpp"
#include "natspline/select.hpp"

#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace testing {

using natspline::KnotGrid;
using natspline::Matrix;
using natspline::Vector;

using Rng = std::mt19937_64;

/// Knots with spacings drawn from [0.2, 1] / n, shifted by a random origin.
KnotGrid random_grid(Rng& rng, int n);

Vector random_vector(Rng& rng, Eigen::Index size, double scale = 1.0);
Vector gaussian_vector(Rng& rng, Eigen::Index size, double sigma);

double max_abs(const Eigen::Ref<const Matrix>& m);

/// 5-node Gauss-Legendre rule applied on every knot interval.
double integrate(const KnotGrid& grid, const std::function<double(double)>& f);

/// Integral of phi_i^(r) phi_j^(s) for every (i, j), by quadrature over eval_basis.
Matrix quadrature_gram(const KnotGrid& grid, int r, int s);

/// (I + lambda C_mid)^-1 through a dense LU inverse.
Matrix dense_hat(const KnotGrid& grid, double lambda);

/// L (L^T L)^-1 L^T from the normal equations, inverted densely.
Matrix dense_projector(const KnotGrid& grid);

/// Error code thrown by f, or nothing if it returns normally.
template <class F>
std::optional<natspline::ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const natspline::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// Round to the given number of decimals, half away from zero.
double round_to(double v, int decimals);

/// True when v rounded to the precision of the printed decimal text equals it.
bool matches_printed(double v, const char* printed);

}  // namespace testing
