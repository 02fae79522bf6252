#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>

namespace natspline {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
    NonIncreasingKnots = 1,
    TooFewKnots,
    NonFiniteInput,
    ShapeMismatch,
    SingularSystem,
    OutOfDomain,
    InvalidOrder,
    IndexOutOfRange,
    InvalidDerivativeOrder,
    AllCoefficientsZero,
    OverlappingNullspaces,
    InconsistentConstraint,
    NegativeLambda,
    NonPositiveLambda,
    SingularCorner,
    EmptyNullspace,
    BracketTooNarrow,
    SingularGLS,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Strictly increasing knots t_0 < ... < t_n with n >= 2 intervals.
///
/// Indices are zero-based throughout the library: knot i is t_i for
/// i = 0..n and interval i is [t_i, t_{i+1}) with spacing h_i.
class KnotGrid {
public:
    static KnotGrid make(std::span<const double> knots);

    const Vector& knots() const { return knots_; }
    const Vector& spacings() const { return spacings_; }

    /// Number of intervals n.
    int intervals() const { return static_cast<int>(spacings_.size()); }
    /// Number of knots n + 1.
    int size() const { return static_cast<int>(knots_.size()); }
    /// Dimension n + 3 of the natural coordinate space.
    int coord_dim() const { return size() + 2; }

    double front() const { return knots_[0]; }
    double back() const { return knots_[knots_.size() - 1]; }

    /// Interval index containing t; t == back() maps to the last interval.
    int locate(double t) const;

private:
    KnotGrid(Vector knots, Vector spacings);

    Vector knots_;
    Vector spacings_;
};

KnotGrid make_grid(std::span<const double> knots);

/// Uniform grid t_i = i / n on [0, 1].
KnotGrid uniform_grid(int n);

/// Coordinates (u_first, p, u_last) of a C2 cubic spline in the natural basis.
struct NaturalCoordinates {
    double u_first = 0.0;
    Vector values;
    double u_last = 0.0;

    Vector flatten() const;
    static NaturalCoordinates unflatten(const Eigen::Ref<const Vector>& x);

    bool operator==(const NaturalCoordinates& other) const;
};

/// Piecewise coefficients: on [t_i, t_{i+1}),
/// s(t) = p_i + q_i (t - t_i) + u_i/2 (t - t_i)^2 + v_i/6 (t - t_i)^3.
/// p and u hold n + 1 entries (values and second derivatives at every knot).
struct SplineCoefficients {
    Vector p;
    Vector q;
    Vector u;
    Vector v;
};

struct Observations {
    KnotGrid grid;
    Vector y;

    static Observations make(KnotGrid grid, const Eigen::Ref<const Vector>& y);
};

void require(bool condition, ErrorCode code, const std::string& message);

}  // namespace natspline
