#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pestctl {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct NumericDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDenominator : NumericDomainError {
    using NumericDomainError::NumericDomainError;
};

struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoCoexistence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PositivityViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Biological parameters of the crop-pest-awareness model.
/// All rates are per day; K and a share the biomass unit of X.
struct ModelParams {
    double r = 0.05;        ///< crop growth rate
    double K = 1.0;         ///< crop carrying capacity
    double alpha = 0.025;   ///< pest attack rate
    double phi = 0.5;       ///< infected-pest attack reduction factor (< 1)
    double a = 0.2;         ///< half-saturation constant
    double m1 = 0.8;        ///< susceptible conversion efficiency
    double m2 = 0.6;        ///< infected conversion efficiency (< m1)
    double lambda = 0.025;  ///< awareness-driven infection rate
    double d = 0.01;        ///< pest natural mortality
    double delta = 0.1;     ///< infection-added mortality
    double gamma = 0.025;   ///< global-advertisement level increase
    double sigma = 0.015;   ///< local awareness growth rate
    double eta = 0.015;     ///< awareness fading rate
    double omega = 0.003;   ///< global awareness recruitment

    // Throws on violated parameter invariants (positivity, m1 > m2, phi < 1).
    void validate() const;
};

/// One time instant of the system: crop biomass, susceptible pests,
/// infected pests, awareness level. All componentwise nonnegative.
struct State {
    double X = 0.0;
    double S = 0.0;
    double I = 0.0;
    double A = 0.0;

    Vec4 vec() const { return Vec4(X, S, I, A); }
    static State from_vec(const Vec4& v) { return State{v[0], v[1], v[2], v[3]}; }

    bool nonnegative() const { return X >= 0.0 && S >= 0.0 && I >= 0.0 && A >= 0.0; }
    bool finite() const {
        return std::isfinite(X) && std::isfinite(S) && std::isfinite(I) && std::isfinite(A);
    }
};

/// (u1, u2, u3): chemical-pesticide, bio-pesticide, advertisement control,
/// each constrained to [0, 1].
struct ControlTriple {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;

    bool admissible(double slack = 0.0) const {
        return u1 >= -slack && u1 <= 1.0 + slack && u2 >= -slack && u2 <= 1.0 + slack &&
               u3 >= -slack && u3 <= 1.0 + slack;
    }
};

inline bool finite(const Vec4& v) {
    return v.allFinite();
}

}  // namespace pestctl
