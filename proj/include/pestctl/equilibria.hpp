#pragma once

#include "pestctl/model.hpp"

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace pestctl {

enum class EquilibriumKind { Axial, PestFree, HealthyPestFree, Coexistence };

const char* to_string(EquilibriumKind k);

/// A located fixed point of the model together with its residual and the
/// existence conditions that were checked while locating it.
struct Equilibrium {
    EquilibriumKind kind = EquilibriumKind::Axial;
    State state;
    double residual_norm = 0.0;
    std::vector<std::pair<std::string, bool>> existence_flags;
};

/// Audit record for the boundary (crop-free, pest-present) fixed point: its
/// awareness component would have to be a positive root of
/// lambda*A^2 + (gamma + d + lambda)*A + d, which has none for positive
/// parameters.
struct NonExistenceReport {
    double c2 = 0.0;  // lambda
    double c1 = 0.0;  // gamma + d + lambda
    double c0 = 0.0;  // d
    double discriminant = 0.0;
    std::complex<double> root1;
    std::complex<double> root2;
    bool positive_root_exists = false;
};

/// Monic cubic X^3 + a1 X^2 + a2 X + a3 whose roots are candidate crop levels
/// of the susceptible-pest-free equilibrium.
struct CubicCoefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

/// Monic sextic A^6 + a1 A^5 + ... + a6 satisfied by the awareness component
/// of every interior equilibrium; used to cross-validate the Newton solve.
struct SexticCoefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
    double a5 = 0.0;
    double a6 = 0.0;

    double eval(double A) const;
    double max_coefficient_magnitude() const;
};

Equilibrium axial_equilibrium(const ModelParams& p);
Equilibrium pest_free_equilibrium(const ModelParams& p);
NonExistenceReport boundary_equilibrium_check(const ModelParams& p);

/// Throws DegenerateDenominator when alpha*phi*m2 == d + delta + gamma.
CubicCoefficients cubic_coefficients(const ModelParams& p);

/// All susceptible-pest-free equilibria (possibly none).
std::vector<Equilibrium> healthy_pest_free_equilibria(const ModelParams& p);

/// All interior equilibria found by the seeded damped-Newton search
/// (possibly none). Points are validated against the steady-state closed
/// forms and deduplicated.
std::vector<Equilibrium> coexistence_equilibria(const ModelParams& p);

SexticCoefficients sextic_coefficients(const ModelParams& p);

// Steady-state closed forms (shared with the stability scans and the CLI).

/// Crop level forced by the susceptible-pest equation at awareness level A.
double interior_crop_from_awareness(const ModelParams& p, double A);

/// (S, I) forced by the crop and awareness equations at (X, A). Requires
/// |X + a - phi| above the singular-surface guard band.
std::pair<double, double> interior_pests_from_crop_awareness(const ModelParams& p, double X,
                                                             double A);

/// Newton refinement of a steady state from one seed; returns true on
/// convergence. Used by the equilibrium search and by parameter continuation.
bool refine_steady_state(const ModelParams& p, State& s, int max_iter = 100,
                         double step_tol = 1e-12);

/// Awareness threshold of the coexistence existence flag reported by the
/// equilibrium search.
double coexistence_awareness_threshold(const ModelParams& p);

/// Roots of a real monic polynomial given descending coefficients
/// (c[0] x^n + ... + c[n], c[0] != 0), via companion-matrix eigenvalues.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& descending_coeffs);

}  // namespace pestctl
