#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace testing {

using namespace natspline;

KnotGrid random_grid(Rng& rng, int n) {
    std::uniform_real_distribution<double> spacing(0.2, 1.0);
    std::uniform_real_distribution<double> origin(-1.0, 1.0);
    std::vector<double> t(n + 1);
    t[0] = origin(rng);
    for (int i = 1; i <= n; ++i) t[i] = t[i - 1] + spacing(rng) / n;
    return make_grid(t);
}

Vector random_vector(Rng& rng, Eigen::Index size, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector v(size);
    for (auto& x : v) x = u(rng);
    return v;
}

Vector gaussian_vector(Rng& rng, Eigen::Index size, double sigma) {
    std::normal_distribution<double> g(0.0, sigma);
    Vector v(size);
    for (auto& x : v) x = g(rng);
    return v;
}

double max_abs(const Eigen::Ref<const Matrix>& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double integrate(const KnotGrid& grid, const std::function<double(double)>& f) {
    static const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                    0.5384693101056831, 0.9061798459386640};
    static const double weights[5] = {0.2369268850561891, 0.4786286704993665,
                                      0.5688888888888889, 0.4786286704993665,
                                      0.2369268850561891};
    double total = 0.0;
    for (int i = 0; i < grid.intervals(); ++i) {
        const double a = grid.knots()[i];
        const double half = grid.spacings()[i] / 2.0;
        for (int k = 0; k < 5; ++k) total += half * weights[k] * f(a + half * (1.0 + nodes[k]));
    }
    return total;
}

Matrix quadrature_gram(const KnotGrid& grid, int r, int s) {
    const BasisMatrices basis = build_basis(grid);
    const int dim = grid.coord_dim();
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            g(i, j) = integrate(grid, [&](double t) {
                return eval_basis(grid, basis, i, t, r) * eval_basis(grid, basis, j, t, s);
            });
    return g;
}

Matrix dense_hat(const KnotGrid& grid, double lambda) {
    const BasisMatrices basis = build_basis(grid);
    const Matrix c = build_curvature(grid, basis).matrix;
    const int m = grid.size();
    const Matrix a = Matrix::Identity(m, m) + lambda * c.block(1, 1, m, m);
    return a.inverse();
}

Matrix dense_projector(const KnotGrid& grid) {
    Matrix l(grid.size(), 2);
    l.col(0).setOnes();
    l.col(1) = grid.knots();
    const Matrix normal = l.transpose() * l;
    return l * normal.inverse() * l.transpose();
}

double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

bool matches_printed(double v, const char* printed) {
    const char* dot = std::strchr(printed, '.');
    const int decimals = dot == nullptr ? 0 : static_cast<int>(std::strlen(dot + 1));
    const double target = std::strtod(printed, nullptr);
    return std::abs(round_to(v, decimals) - target) < 1e-9 * std::max(1.0, std::abs(target));
}

}  // namespace testing
