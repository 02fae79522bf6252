#include "natspline/natspline.h"

#include "natspline/bayes.hpp"
#include "natspline/select.hpp"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

using namespace natspline;

struct ns_grid {
    KnotGrid grid;
    BasisMatrices basis;
};

struct ns_penalty {
    PenaltyMatrix penalty;
};

struct ns_fit {
    KnotGrid grid;
    NaturalCoordinates coords;
    SplineCoefficients coeffs;
    double lambda;
    double rss;
    double trace;
};

struct ns_blup {
    Equivalence penalized;
    std::optional<BlueBlup> closed_form;
};

namespace {

thread_local std::string last_error;

int fail(int status, const char* message) {
    last_error = message;
    return status;
}

template <class F>
int guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return NS_OK;
    } catch (const Error& e) {
        return fail(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(NS_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NS_INTERNAL, e.what());
    }
}

#define NS_REQUIRE_ARG(p) \
    if ((p) == nullptr) return fail(NS_NULL_ARGUMENT, "null argument: " #p)

int copy_out(const double* data, size_t size, double* out, size_t capacity) {
    if (out == nullptr) return fail(NS_NULL_ARGUMENT, "null output buffer");
    if (capacity < size) return fail(NS_BUFFER_TOO_SMALL, "output buffer too small");
    std::memcpy(out, data, size * sizeof(double));
    last_error.clear();
    return NS_OK;
}

Vector observations(const ns_grid* g, const double* y) {
    return Eigen::Map<const Vector>(y, g->grid.size());
}

SelectionConfig to_config(const ns_selection_config* c) {
    SelectionConfig cfg;
    if (c != nullptr) {
        cfg.sigma2 = c->sigma2;
        cfg.epsilon = c->epsilon;
        cfg.lambda_bracket = {c->log10_lo, c->log10_hi};
        cfg.tol = c->tol;
    }
    return cfg;
}

void to_selection(const SelectionResult& r, ns_selection* out) {
    out->found = r.found() ? 1 : 0;
    out->lambda = r.lambda.value_or(0.0);
    out->criterion = r.criterion_value;
    out->log10_lo = r.bracket.first;
    out->log10_hi = r.bracket.second;
    out->method = static_cast<int>(r.method);
}

}  // namespace

extern "C" {

NS_API const char* ns_last_error(void) { return last_error.c_str(); }

NS_API const char* ns_status_name(int status) {
    switch (status) {
        case NS_OK: return "Ok";
        case NS_NULL_ARGUMENT: return "NullArgument";
        case NS_BUFFER_TOO_SMALL: return "BufferTooSmall";
        case NS_INTERNAL: return "Internal";
        default:
            if (status >= 1 && status <= NS_INVALID_ARGUMENT)
                return to_string(static_cast<ErrorCode>(status));
            return "Unknown";
    }
}

NS_API int ns_grid_create(const double* knots, size_t count, ns_grid** out) {
    NS_REQUIRE_ARG(knots);
    NS_REQUIRE_ARG(out);
    *out = nullptr;
    return guarded([&] {
        KnotGrid grid = make_grid(std::span<const double>(knots, count));
        BasisMatrices basis = build_basis(grid);
        *out = new ns_grid{std::move(grid), std::move(basis)};
    });
}

NS_API int ns_grid_uniform(int n, ns_grid** out) {
    NS_REQUIRE_ARG(out);
    *out = nullptr;
    return guarded([&] {
        KnotGrid grid = uniform_grid(n);
        BasisMatrices basis = build_basis(grid);
        *out = new ns_grid{std::move(grid), std::move(basis)};
    });
}

NS_API void ns_grid_free(ns_grid* grid) { delete grid; }

NS_API size_t ns_grid_size(const ns_grid* grid) {
    return grid == nullptr ? 0 : static_cast<size_t>(grid->grid.size());
}

NS_API int ns_grid_knots(const ns_grid* grid, double* out, size_t capacity) {
    NS_REQUIRE_ARG(grid);
    return copy_out(grid->grid.knots().data(), grid->grid.size(), out, capacity);
}

NS_API int ns_matrix(const ns_grid* grid, ns_matrix_kind kind, const double* coeffs, double* out,
                     size_t capacity, size_t* rows, size_t* cols) {
    NS_REQUIRE_ARG(grid);
    Matrix m;
    const int status = guarded([&] {
        switch (kind) {
            case NS_MATRIX_C: m = build_curvature(grid->grid, grid->basis).matrix; break;
            case NS_MATRIX_PPEN:
                require(coeffs != nullptr, ErrorCode::InvalidArgument,
                        "P_pen needs the coefficients (a0, a1, a2)");
                m = build_combined(grid->grid, grid->basis, coeffs[0], coeffs[1], coeffs[2]).matrix;
                break;
            case NS_MATRIX_U: m = grid->basis.U; break;
            case NS_MATRIX_Q: m = grid->basis.Q; break;
            case NS_MATRIX_V: m = grid->basis.V; break;
            default: throw Error(ErrorCode::InvalidArgument, "unknown matrix kind");
        }
    });
    if (status != NS_OK) return status;
    if (rows != nullptr) *rows = static_cast<size_t>(m.rows());
    if (cols != nullptr) *cols = static_cast<size_t>(m.cols());
    if (out == nullptr) return NS_OK;
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = m;
    return copy_out(row_major.data(), static_cast<size_t>(m.size()), out, capacity);
}

NS_API int ns_eval_basis(const ns_grid* grid, int j, double t, int order, double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(out);
    return guarded([&] { *out = eval_basis(grid->grid, grid->basis, j, t, order); });
}

NS_API int ns_penalty_curvature(const ns_grid* grid, ns_penalty** out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(out);
    *out = nullptr;
    return guarded(
        [&] { *out = new ns_penalty{build_curvature(grid->grid, grid->basis)}; });
}

NS_API int ns_penalty_combined(const ns_grid* grid, double a0, double a1, double a2,
                               ns_penalty** out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(out);
    *out = nullptr;
    return guarded(
        [&] { *out = new ns_penalty{build_combined(grid->grid, grid->basis, a0, a1, a2)}; });
}

NS_API void ns_penalty_free(ns_penalty* penalty) { delete penalty; }

NS_API int ns_penalty_nullity(const ns_penalty* penalty) {
    return penalty == nullptr ? -1 : penalty->penalty.nullspace_dim;
}

NS_API int ns_fit_create(const ns_grid* grid, const ns_penalty* penalty, const double* y,
                         double lambda, ns_fit** out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    *out = nullptr;
    return guarded([&] {
        const Vector obs = observations(grid, y);
        require(obs.allFinite(), ErrorCode::NonFiniteInput, "observations must be finite");
        auto fit = std::make_unique<ns_fit>(ns_fit{grid->grid, {}, {}, lambda, 0.0, 0.0});
        if (penalty == nullptr) {
            const NaturalSmoother smoother(grid->grid);
            const SmoothFit s = smoother.fit(obs, lambda);
            fit->coords = s.coords;
            fit->rss = s.rss;
            fit->trace = ResidualSpectrum(smoother).trace(lambda);
        } else {
            require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::NegativeLambda,
                    "lambda must be non-negative");
            const GeneralSmoother smoother(grid->grid, penalty->penalty);
            const int m = grid->grid.size();
            if (lambda == 0.0) {
                fit->coords = NaturalCoordinates::unflatten(smoother.limit_zero(obs));
                fit->trace = m;
            } else {
                fit->coords = NaturalCoordinates::unflatten(smoother.fit(obs, lambda));
                fit->trace = smoother.hat(lambda).block(1, 1, m, m).trace();
            }
            fit->rss = (obs - fit->coords.values).squaredNorm();
        }
        fit->coeffs = coefficients_for(grid->grid, grid->basis, fit->coords);
        *out = fit.release();
    });
}

NS_API void ns_fit_free(ns_fit* fit) { delete fit; }

NS_API double ns_fit_lambda(const ns_fit* fit) { return fit == nullptr ? 0.0 : fit->lambda; }
NS_API double ns_fit_rss(const ns_fit* fit) { return fit == nullptr ? 0.0 : fit->rss; }
NS_API double ns_fit_trace(const ns_fit* fit) { return fit == nullptr ? 0.0 : fit->trace; }

NS_API int ns_fit_coords(const ns_fit* fit, double* out, size_t capacity) {
    NS_REQUIRE_ARG(fit);
    const Vector x = fit->coords.flatten();
    return copy_out(x.data(), static_cast<size_t>(x.size()), out, capacity);
}

NS_API int ns_fit_eval(const ns_fit* fit, double t, int order, double* out) {
    NS_REQUIRE_ARG(fit);
    NS_REQUIRE_ARG(out);
    return guarded([&] { *out = eval(fit->coeffs, fit->grid, t, order); });
}

NS_API int ns_hat(const ns_grid* grid, double lambda, double* out, size_t capacity) {
    NS_REQUIRE_ARG(grid);
    Matrix h;
    const int status = guarded([&] { h = NaturalSmoother(grid->grid).hat(lambda).H; });
    if (status != NS_OK) return status;
    return copy_out(h.data(), static_cast<size_t>(h.size()), out, capacity);  // symmetric
}

NS_API int ns_hat_trace(const ns_grid* grid, double lambda, double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::NegativeLambda,
                "lambda must be non-negative");
        const NaturalSmoother smoother(grid->grid);
        *out = ResidualSpectrum(smoother).trace(lambda);
    });
}

NS_API int ns_psi(const ns_grid* grid, const double* y, double lambda, double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        *out = psi(Observations::make(grid->grid, observations(grid, y)), lambda);
    });
}

NS_API int ns_detrended_norm2(const ns_grid* grid, const double* y, double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        *out = detrended_norm2(Observations::make(grid->grid, observations(grid, y)));
    });
}

NS_API int ns_sure(const ns_grid* grid, const double* y, double lambda, double sigma2,
                   double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        *out = sure(Observations::make(grid->grid, observations(grid, y)), lambda, sigma2);
    });
}

NS_API int ns_pe_estimate(const ns_grid* grid, const double* y, double lambda, double sigma2,
                          double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        *out = pe_estimate(Observations::make(grid->grid, observations(grid, y)), lambda, sigma2);
    });
}

NS_API int ns_leverage_linear(const ns_grid* grid, int i, int j, double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(out);
    return guarded([&] { *out = leverage_linear(grid->grid, i, j); });
}

NS_API int ns_nsr_column(const ns_grid* grid, int i, double lambda, double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(out);
    return guarded([&] { *out = nsr_column(grid->grid, i, lambda); });
}

NS_API int ns_trend_line(const ns_grid* grid, int i, double* intercept, double* slope) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(intercept);
    NS_REQUIRE_ARG(slope);
    return guarded([&] {
        const TrendLine line = unit_trend_line(grid->grid, i);
        *intercept = line.intercept;
        *slope = line.slope;
    });
}

NS_API int ns_estimate_sigma2(const ns_grid* grid, const double* y, double* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        *out = estimate_sigma2(Observations::make(grid->grid, observations(grid, y)));
    });
}

NS_API void ns_selection_config_default(ns_selection_config* cfg) {
    if (cfg == nullptr) return;
    const SelectionConfig d;
    cfg->sigma2 = d.sigma2;
    cfg->epsilon = d.epsilon;
    cfg->log10_lo = d.lambda_bracket.first;
    cfg->log10_hi = d.lambda_bracket.second;
    cfg->tol = d.tol;
}

NS_API int ns_select_noise_match(const ns_grid* grid, const double* y, double w_norm2,
                                 const ns_selection_config* cfg, ns_selection* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        const Observations obs = Observations::make(grid->grid, observations(grid, y));
        to_selection(solve_noise_match(obs, w_norm2, to_config(cfg)), out);
    });
}

NS_API int ns_select_band(const ns_grid* grid, const double* y, const ns_selection_config* cfg,
                          ns_selection* lower, ns_selection* upper) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(cfg);
    NS_REQUIRE_ARG(lower);
    NS_REQUIRE_ARG(upper);
    return guarded([&] {
        const Observations obs = Observations::make(grid->grid, observations(grid, y));
        const LambdaBand band = lambda_band(obs, to_config(cfg));
        to_selection(band.lower, lower);
        to_selection(band.upper, upper);
    });
}

NS_API int ns_select_sure(const ns_grid* grid, const double* y, const ns_selection_config* cfg,
                          ns_selection* out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(cfg);
    NS_REQUIRE_ARG(out);
    return guarded([&] {
        const Observations obs = Observations::make(grid->grid, observations(grid, y));
        to_selection(minimize_sure(obs, cfg->sigma2, {cfg->log10_lo, cfg->log10_hi}, cfg->tol),
                     out);
    });
}

NS_API int ns_blup_create(const ns_grid* grid, const ns_penalty* penalty, const double* y,
                          double sigma_w2, double sigma_s2, ns_blup** out) {
    NS_REQUIRE_ARG(grid);
    NS_REQUIRE_ARG(penalty);
    NS_REQUIRE_ARG(y);
    NS_REQUIRE_ARG(out);
    *out = nullptr;
    return guarded([&] {
        const Vector obs = observations(grid, y);
        auto result = std::make_unique<ns_blup>();
        result->penalized = equivalence(grid->grid, penalty->penalty, obs, sigma_w2, sigma_s2);
        if (sigma_w2 > 0.0) {
            const PenaltyFactorization f = factorize_penalty(penalty->penalty);
            result->closed_form =
                blue_blup(MixedModel::from_penalty(f, sigma_w2, sigma_s2), obs);
        }
        *out = result.release();
    });
}

NS_API void ns_blup_free(ns_blup* blup) { delete blup; }

NS_API size_t ns_blup_fixed_dim(const ns_blup* blup) {
    return blup == nullptr ? 0 : static_cast<size_t>(blup->penalized.beta.size());
}

NS_API size_t ns_blup_random_dim(const ns_blup* blup) {
    return blup == nullptr ? 0 : static_cast<size_t>(blup->penalized.eta.size());
}

NS_API int ns_blup_has_closed_form(const ns_blup* blup) {
    return blup != nullptr && blup->closed_form.has_value() ? 1 : 0;
}

NS_API int ns_blup_beta(const ns_blup* blup, int route, double* out, size_t capacity) {
    NS_REQUIRE_ARG(blup);
    if (route != 0 && route != 1) return fail(NS_INVALID_ARGUMENT, "route must be 0 or 1");
    if (route == 1 && !blup->closed_form)
        return fail(NS_INVALID_ARGUMENT, "closed form needs sigma_w2 > 0");
    const Vector& v = route == 1 ? blup->closed_form->beta : blup->penalized.beta;
    if (v.size() == 0) return NS_OK;
    return copy_out(v.data(), static_cast<size_t>(v.size()), out, capacity);
}

NS_API int ns_blup_eta(const ns_blup* blup, int route, double* out, size_t capacity) {
    NS_REQUIRE_ARG(blup);
    if (route != 0 && route != 1) return fail(NS_INVALID_ARGUMENT, "route must be 0 or 1");
    if (route == 1 && !blup->closed_form)
        return fail(NS_INVALID_ARGUMENT, "closed form needs sigma_w2 > 0");
    const Vector& v = route == 1 ? blup->closed_form->eta : blup->penalized.eta;
    if (v.size() == 0) return NS_OK;
    return copy_out(v.data(), static_cast<size_t>(v.size()), out, capacity);
}

NS_API int ns_blup_coords(const ns_blup* blup, double* out, size_t capacity) {
    NS_REQUIRE_ARG(blup);
    const Vector x = blup->penalized.coords.flatten();
    return copy_out(x.data(), static_cast<size_t>(x.size()), out, capacity);
}

}  // extern "C"
