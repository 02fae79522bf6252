#include "natspline/core.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace natspline {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonIncreasingKnots: return "NonIncreasingKnots";
        case ErrorCode::TooFewKnots: return "TooFewKnots";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::InvalidDerivativeOrder: return "InvalidDerivativeOrder";
        case ErrorCode::AllCoefficientsZero: return "AllCoefficientsZero";
        case ErrorCode::OverlappingNullspaces: return "OverlappingNullspaces";
        case ErrorCode::InconsistentConstraint: return "InconsistentConstraint";
        case ErrorCode::NegativeLambda: return "NegativeLambda";
        case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
        case ErrorCode::SingularCorner: return "SingularCorner";
        case ErrorCode::EmptyNullspace: return "EmptyNullspace";
        case ErrorCode::BracketTooNarrow: return "BracketTooNarrow";
        case ErrorCode::SingularGLS: return "SingularGLS";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) throw Error(code, message);
}

KnotGrid::KnotGrid(Vector knots, Vector spacings)
    : knots_(std::move(knots)), spacings_(std::move(spacings)) {}

KnotGrid KnotGrid::make(std::span<const double> knots) {
    require(knots.size() >= 3, ErrorCode::TooFewKnots,
            "need at least 3 knots, got " + std::to_string(knots.size()));
    for (double t : knots)
        require(std::isfinite(t), ErrorCode::NonFiniteInput, "knots must be finite");

    const auto n = static_cast<Eigen::Index>(knots.size()) - 1;
    Vector t(n + 1);
    Vector h(n);
    for (Eigen::Index i = 0; i <= n; ++i) t[i] = knots[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < n; ++i) {
        // exact comparison: near-duplicates are the caller's business
        require(t[i + 1] > t[i], ErrorCode::NonIncreasingKnots,
                "knot " + std::to_string(i + 1) + " is not greater than knot " + std::to_string(i));
        h[i] = t[i + 1] - t[i];
    }
    return KnotGrid(std::move(t), std::move(h));
}

int KnotGrid::locate(double t) const {
    require(t >= front() && t <= back(), ErrorCode::OutOfDomain,
            "t = " + std::to_string(t) + " outside [" + std::to_string(front()) + ", " +
                std::to_string(back()) + "]");
    const double* first = knots_.data();
    const double* last = first + knots_.size();
    auto it = std::upper_bound(first, last, t);
    const int idx = static_cast<int>(it - first) - 1;
    return std::min(idx, intervals() - 1);
}

KnotGrid make_grid(std::span<const double> knots) { return KnotGrid::make(knots); }

KnotGrid uniform_grid(int n) {
    require(n >= 2, ErrorCode::TooFewKnots, "uniform grid needs n >= 2");
    std::vector<double> t(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    return KnotGrid::make(t);
}

Vector NaturalCoordinates::flatten() const {
    Vector x(values.size() + 2);
    x[0] = u_first;
    x.segment(1, values.size()) = values;
    x[x.size() - 1] = u_last;
    return x;
}

NaturalCoordinates NaturalCoordinates::unflatten(const Eigen::Ref<const Vector>& x) {
    require(x.size() >= 2, ErrorCode::ShapeMismatch, "coordinate vector too short");
    NaturalCoordinates c;
    c.u_first = x[0];
    c.values = x.segment(1, x.size() - 2);
    c.u_last = x[x.size() - 1];
    return c;
}

bool NaturalCoordinates::operator==(const NaturalCoordinates& other) const {
    return u_first == other.u_first && u_last == other.u_last &&
           values.size() == other.values.size() && values == other.values;
}

Observations Observations::make(KnotGrid grid, const Eigen::Ref<const Vector>& y) {
    require(y.size() == grid.size(), ErrorCode::ShapeMismatch,
            "expected " + std::to_string(grid.size()) + " observations, got " +
                std::to_string(y.size()));
    require(y.allFinite(), ErrorCode::NonFiniteInput, "observations must be finite");
    return Observations{std::move(grid), y};
}

}  // namespace natspline
