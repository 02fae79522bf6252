#include "natspline/select.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace natspline {

namespace {

void check_lambda(double lambda) {
    require(std::isfinite(lambda), ErrorCode::NonFiniteInput, "lambda must be finite");
    require(lambda >= 0.0, ErrorCode::NegativeLambda,
            "lambda must be non-negative, got " + std::to_string(lambda));
}

void check_sigma2(double sigma2) {
    require(std::isfinite(sigma2) && sigma2 >= 0.0, ErrorCode::InvalidArgument,
            "sigma2 must be finite and non-negative");
}

// lambda mu / (1 + lambda mu) without overflowing at huge lambda
double residual_gain(double lambda, double mu) {
    if (lambda == 0.0 || mu <= 0.0) return 0.0;
    return 1.0 / (1.0 + 1.0 / (lambda * mu));
}

// Everything a lambda search needs for one data vector.
class Criterion {
public:
    explicit Criterion(const Observations& obs)
        : smoother_(obs.grid), spectrum_(smoother_), coeffs_(spectrum_.project(obs.y)) {}

    double psi(double lambda) const { return spectrum_.psi(coeffs_, lambda); }
    double trace(double lambda) const { return spectrum_.trace(lambda); }
    int size() const { return smoother_.grid().size(); }

private:
    NaturalSmoother smoother_;
    ResidualSpectrum spectrum_;
    Vector coeffs_;
};

double pe_value(const Criterion& c, double lambda, double sigma2) {
    return c.psi(lambda) + 2.0 * sigma2 * c.trace(lambda);
}

double sure_value(const Criterion& c, double lambda, double sigma2) {
    return pe_value(c, lambda, sigma2) - c.size() * sigma2;
}

constexpr double kMaxLog = 300.0;

SelectionResult match(const Criterion& c, double sup, double target, const SelectionConfig& cfg,
                      SelectionMethod method) {
    SelectionResult out;
    out.method = method;
    out.bracket = cfg.lambda_bracket;
    if (target == 0.0) {
        out.lambda = 0.0;
        return out;
    }
    if (!(sup > target)) {
        out.criterion_value = sup;
        return out;
    }

    auto [lo, hi] = cfg.lambda_bracket;
    while (lo > -kMaxLog && c.psi(std::pow(10.0, lo)) > target) lo = std::max(-kMaxLog, lo - 10.0);
    while (hi < kMaxLog && c.psi(std::pow(10.0, hi)) < target) hi = std::min(kMaxLog, hi + 10.0);
    out.bracket = {lo, hi};

    const double tol = cfg.tol * std::max(1.0, target);
    double best_log = hi;
    double best_gap = std::abs(c.psi(std::pow(10.0, hi)) - target);
    for (int it = 0; it < 400 && best_gap > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double value = c.psi(std::pow(10.0, mid));
        const double gap = std::abs(value - target);
        if (gap < best_gap) {
            best_gap = gap;
            best_log = mid;
        }
        if (value < target)
            lo = mid;
        else
            hi = mid;
    }
    out.lambda = std::pow(10.0, best_log);
    out.criterion_value = c.psi(*out.lambda);
    return out;
}

}  // namespace

void SelectionConfig::validate() const {
    check_sigma2(sigma2);
    require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument,
            "epsilon must lie in (0, 1)");
    require(std::isfinite(lambda_bracket.first) && std::isfinite(lambda_bracket.second) &&
                lambda_bracket.first < lambda_bracket.second,
            ErrorCode::InvalidArgument, "lambda bracket must satisfy lower < upper");
    require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
}

const char* to_string(SelectionMethod method) {
    switch (method) {
        case SelectionMethod::NoiseMatch: return "noise_match";
        case SelectionMethod::BandLower: return "band_lower";
        case SelectionMethod::BandUpper: return "band_upper";
        case SelectionMethod::Sure: return "sure";
    }
    return "unknown";
}

ResidualSpectrum::ResidualSpectrum(const NaturalSmoother& smoother) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(smoother.reduced_penalty());
    mu_ = eig.eigenvalues();
    vectors_ = smoother.trend_complement() * eig.eigenvectors();
}

Vector ResidualSpectrum::project(const Eigen::Ref<const Vector>& y) const {
    require(y.size() == vectors_.rows(), ErrorCode::ShapeMismatch,
            "observation count does not match knot count");
    return vectors_.transpose() * y;
}

double ResidualSpectrum::psi(const Eigen::Ref<const Vector>& coeffs, double lambda) const {
    double total = 0.0;
    for (Eigen::Index k = 0; k < mu_.size(); ++k) {
        const double r = residual_gain(lambda, mu_[k]) * coeffs[k];
        total += r * r;
    }
    return total;
}

double ResidualSpectrum::trace(double lambda) const {
    double total = 2.0;
    for (Eigen::Index k = 0; k < mu_.size(); ++k) total += 1.0 - residual_gain(lambda, mu_[k]);
    return total;
}

double psi(const Observations& obs, double lambda) {
    check_lambda(lambda);
    return Criterion(obs).psi(lambda);
}

double detrended_norm2(const Observations& obs) {
    const LinearTrend trend = linear_trend(obs.grid);
    return (obs.y - trend.projector * obs.y).squaredNorm();
}

SelectionResult solve_noise_match(const Observations& obs, double w_norm2,
                                  const SelectionConfig& cfg) {
    require(std::isfinite(w_norm2) && w_norm2 >= 0.0, ErrorCode::InvalidArgument,
            "w_norm2 must be finite and non-negative");
    cfg.validate();
    return match(Criterion(obs), detrended_norm2(obs), w_norm2, cfg, SelectionMethod::NoiseMatch);
}

LambdaBand lambda_band(const Observations& obs, const SelectionConfig& cfg) {
    cfg.validate();
    const Criterion c(obs);
    const double sup = detrended_norm2(obs);
    const double m = obs.grid.size();
    LambdaBand band;
    band.lower = match(c, sup, m * (1.0 - cfg.epsilon) * cfg.sigma2, cfg, SelectionMethod::BandLower);
    band.upper = match(c, sup, m * (1.0 + cfg.epsilon) * cfg.sigma2, cfg, SelectionMethod::BandUpper);
    return band;
}

double sure(const Observations& obs, double lambda, double sigma2) {
    check_lambda(lambda);
    check_sigma2(sigma2);
    return sure_value(Criterion(obs), lambda, sigma2);
}

double pe_estimate(const Observations& obs, double lambda, double sigma2) {
    check_lambda(lambda);
    check_sigma2(sigma2);
    return pe_value(Criterion(obs), lambda, sigma2);
}

SelectionResult minimize_sure(const Observations& obs, double sigma2,
                              std::pair<double, double> bracket, double tol) {
    check_sigma2(sigma2);
    SelectionConfig cfg;
    cfg.sigma2 = sigma2;
    cfg.lambda_bracket = bracket;
    cfg.tol = tol;
    cfg.validate();

    SelectionResult out;
    out.method = SelectionMethod::Sure;
    out.bracket = bracket;
    if (sigma2 == 0.0) {
        out.lambda = 0.0;
        return out;
    }

    const Criterion c(obs);
    auto f = [&](double log_lambda) { return sure_value(c, std::pow(10.0, log_lambda), sigma2); };

    constexpr int kScan = 64;
    const double a = bracket.first;
    const double step = (bracket.second - a) / (kScan - 1);
    int best = 0;
    double best_value = f(a);
    for (int k = 1; k < kScan; ++k) {
        const double value = f(a + k * step);
        if (value < best_value) {
            best_value = value;
            best = k;
        }
    }
    require(best != 0 && best != kScan - 1, ErrorCode::BracketTooNarrow,
            "SURE minimum lies on the edge of the log10 lambda bracket [" +
                std::to_string(bracket.first) + ", " + std::to_string(bracket.second) + "]");

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a + (best - 1) * step;
    double hi = a + (best + 1) * step;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double log_min = f1 <= f2 ? x1 : x2;
    out.lambda = std::pow(10.0, log_min);
    out.criterion_value = std::min(f1, f2);
    return out;
}

double leverage_linear(const KnotGrid& grid, int i, int j) {
    const int m = grid.size();
    require(i >= 0 && i < m && j >= 0 && j < m, ErrorCode::IndexOutOfRange,
            "knot index out of range");
    const Vector centred = grid.knots().array() - grid.knots().mean();
    const double spread = centred.squaredNorm();
    const double cross = centred[i] * centred[j] / spread;
    if (i == j) return static_cast<double>(m - 1) / m - cross;
    return -1.0 / m - cross;
}

double nsr_column(const KnotGrid& grid, int i, double lambda) {
    require(i >= 0 && i < grid.size(), ErrorCode::IndexOutOfRange,
            "knot index " + std::to_string(i) + " out of range");
    check_lambda(lambda);
    const NaturalSmoother smoother(grid);
    const ResidualSpectrum spectrum(smoother);
    return spectrum.psi(spectrum.eigenvectors().row(i).transpose(), lambda);
}

double estimate_sigma2(const Observations& obs) {
    return detrended_norm2(obs) / (obs.grid.intervals() - 1);
}

}  // namespace natspline
