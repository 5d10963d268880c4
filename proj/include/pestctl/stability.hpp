#pragma once

#include "pestctl/equilibria.hpp"

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace pestctl {

enum class StabilityVerdict { Stable, Unstable, Marginal };

const char* to_string(StabilityVerdict v);

/// Critical parameters whose joint sub-unity makes the pest-free state
/// locally asymptotically stable.
struct ThresholdPair {
    double R0 = 0.0;
    double R1 = 0.0;
};

/// Coefficients of the quartic characteristic polynomial
/// rho^4 + y1 rho^3 + y2 rho^2 + y3 rho + y4 at an interior equilibrium.
struct QuarticCoefficients {
    double y1 = 0.0;
    double y2 = 0.0;
    double y3 = 0.0;
    double y4 = 0.0;
};

struct E0Classification {
    StabilityVerdict verdict = StabilityVerdict::Unstable;
    double witness_eigenvalue = 0.0;  // r > 0
    std::array<double, 4> eigenvalues{};
};

struct E1Classification {
    StabilityVerdict verdict = StabilityVerdict::Stable;
    ThresholdPair thresholds;
    std::array<double, 4> closed_form_eigenvalues{};
    double max_real_numeric = 0.0;
};

/// Routh-Hurwitz data for the susceptible-pest-free equilibrium. C1..C3 come
/// from the Jacobian block structure; a hand-expanded variant of C2/C3 is
/// carried alongside so reports can surface transcription drift between the
/// two routes instead of silently preferring either.
struct CubicStabilityReport {
    double C1 = 0.0, C2 = 0.0, C3 = 0.0;
    double F11 = 0.0, F22 = 0.0, F33 = 0.0;
    bool cond_F22_negative = false;
    bool cond_C1_positive = false;
    bool cond_C3_positive = false;
    bool cond_hurwitz = false;  // C1*C2 - C3 > 0
    StabilityVerdict verdict = StabilityVerdict::Marginal;
    double max_real_numeric = 0.0;
    double printed_C2 = 0.0, printed_C3 = 0.0;
    double printed_max_rel_deviation = 0.0;
};

struct EstarClassification {
    StabilityVerdict verdict = StabilityVerdict::Marginal;
    QuarticCoefficients y;
    bool cond_y4_positive = false;
    bool cond_y1y2_y3 = false;    // y1*y2 - y3 > 0
    bool cond_hurwitz = false;    // y1*y2*y3 - y3^2 - y1^2*y4 > 0
    double max_real_numeric = 0.0;
};

/// Hand-expanded y2..y4 evaluated verbatim, with the largest relative drift
/// from the coefficients actually used (the y1 expansions coincide).
struct QuarticPrintedComparison {
    QuarticCoefficients printed;
    double max_rel_deviation = 0.0;
};

struct HopfScanResult {
    double alpha_star = 0.0;
    double psi_at_star = 0.0;
    double imag_part_omega0 = 0.0;      // Im of the critical pair, > 0
    double omega0_sq_ratio = 0.0;       // y3/y1 at alpha*
    double transversality_value = 0.0;  // A*C + B*D
    double predicted_re_slope = 0.0;    // -(AC+BD)/(A^2+B^2)
    double fd_re_slope = 0.0;           // finite-difference d(Re rho)/d(alpha)
    bool eigen_crossing_verified = false;
    State equilibrium;
};

struct HopfGridSample {
    double alpha = 0.0;
    bool has_coexistence = false;
    double psi = 0.0;
    double max_real_eig = 0.0;
    State equilibrium;
};

struct HopfScan {
    std::vector<HopfScanResult> points;
    std::vector<std::pair<double, double>> skipped_segments;  // no-coexistence alpha ranges
    std::vector<HopfGridSample> grid;
};

ThresholdPair thresholds(const ModelParams& p);

/// All four eigenvalues, sorted by (real, imag).
std::vector<std::complex<double>> eigenvalues(const Mat4& M);

E0Classification classify_E0(const ModelParams& p);

/// Stable iff R0 < 1 and R1 < 1, cross-checked against numeric eigenvalues.
/// Throws ConsistencyError when the two routes disagree outside the guard
/// band; |R - 1| < 1e-9 reports Marginal.
E1Classification classify_E1(const ModelParams& p);

CubicStabilityReport classify_E3(const ModelParams& p, const Equilibrium& eq);

QuarticCoefficients quartic_coefficients(const ModelParams& p, const Equilibrium& eq);
QuarticPrintedComparison quartic_printed_comparison(const ModelParams& p, const Equilibrium& eq);

EstarClassification classify_Estar(const ModelParams& p, const Equilibrium& eq);

/// Hurwitz determinant y1*y2*y3 - y3^2 - y4*y1^2 at the interior equilibrium
/// for attack rate alpha. Throws NoCoexistence when no interior point exists.
double psi(const ModelParams& p, double alpha);

/// Interior equilibrium of p with alpha overridden. A seed from a nearby
/// alpha keeps continuation on one branch; the full multi-seed search runs
/// when no seed is given or the seeded solve leaves the interior.
std::optional<State> track_interior_equilibrium(const ModelParams& p, double alpha,
                                                const std::optional<State>& seed);

/// Bracket sign changes of psi over [alpha_lo, alpha_hi] on an n_grid-point
/// grid, refine each by bisection, and evaluate the transversality data at
/// every root. The interior equilibrium is tracked by parameter continuation.
HopfScan hopf_scan(const ModelParams& p, double alpha_lo, double alpha_hi, std::size_t n_grid);

}  // namespace pestctl
