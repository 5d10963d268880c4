#include "pestctl/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace pestctl {

namespace {

double spectral_radius(const std::vector<std::complex<double>>& eigs) {
    double m = 0.0;
    for (const auto& e : eigs) m = std::max(m, std::abs(e));
    return m;
}

double max_real(const std::vector<std::complex<double>>& eigs) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& e : eigs) m = std::max(m, e.real());
    return m;
}

StabilityVerdict eigen_verdict(double max_re, double band) {
    if (max_re < -band) return StabilityVerdict::Stable;
    if (max_re > band) return StabilityVerdict::Unstable;
    return StabilityVerdict::Marginal;
}

void require_consistent(StabilityVerdict formula, StabilityVerdict numeric, const char* where) {
    if (formula == StabilityVerdict::Marginal || numeric == StabilityVerdict::Marginal) return;
    if (formula != numeric) {
        std::ostringstream os;
        os << where << ": closed-form verdict " << to_string(formula)
           << " contradicts eigenvalue verdict " << to_string(numeric);
        throw ConsistencyError(os.str());
    }
}

// Entries of the Jacobian at an interior point, named for the coefficient
// algebra below. Row 4 is (0, sigma, sigma, -eta) throughout.
struct InteriorEntries {
    double F11, F22, F33;
    double j12, j13, j21, j24, j31, j32, j34, j42, j43, j44;
};

InteriorEntries interior_entries(const ModelParams& p, const State& s) {
    const Mat4 J = jacobian(p, s);
    return InteriorEntries{J(0, 0), J(1, 1), J(2, 2), J(0, 1), J(0, 2), J(1, 0), J(1, 3),
                           J(2, 0), J(2, 1), J(2, 3), J(3, 1), J(3, 2), J(3, 3)};
}

QuarticCoefficients quartic_from_entries(const InteriorEntries& e) {
    const auto [F11, F22, F33, j12, j13, j21, j24, j31, j32, j34, j42, j43, j44] = e;

    QuarticCoefficients y;
    y.y1 = -(F11 + F22 + F33 + j44);
    y.y2 = (F11 * F22 - j12 * j21) + (F11 * F33 - j13 * j31) + F11 * j44 + F22 * F33 +
           (F22 * j44 - j24 * j42) + (F33 * j44 - j34 * j43);

    const double M123 = F11 * F22 * F33 - j12 * j21 * F33 + j13 * j21 * j32 - j13 * j31 * F22;
    const double M124 = F11 * F22 * j44 - F11 * j24 * j42 - j12 * j21 * j44;
    const double M134 = F11 * F33 * j44 - F11 * j34 * j43 - j13 * j31 * j44;
    const double M234 = F22 * F33 * j44 - F22 * j34 * j43 + j24 * j32 * j43 - j24 * F33 * j42;
    y.y3 = -(M123 + M124 + M134 + M234);

    const double A21 = j12 * (F33 * j44 - j34 * j43) - j13 * (j32 * j44 - j34 * j42);
    const double A31 = -j12 * j24 * j43 - j13 * F22 * j44 + j13 * j24 * j42;
    y.y4 = F11 * M234 - j21 * A21 + j31 * A31;

    for (double v : {y.y1, y.y2, y.y3, y.y4}) {
        if (!std::isfinite(v)) throw NumericDomainError("quartic coefficients not finite");
    }
    return y;
}

std::optional<State> continue_interior(const ModelParams& p, const State& seed) {
    State s = seed;
    if (!refine_steady_state(p, s)) return std::nullopt;
    if (!(s.X > 0.0 && s.S > 0.0 && s.I > 0.0 && s.A > 0.0)) return std::nullopt;
    const double Xc = interior_crop_from_awareness(p, s.A);
    if (std::abs(Xc - s.X) > 1e-8 * (1.0 + std::abs(s.X))) return std::nullopt;
    return s;
}

QuarticCoefficients quartic_at(const ModelParams& p, double alpha, const State& s) {
    ModelParams q = p;
    q.alpha = alpha;
    return quartic_from_entries(interior_entries(q, s));
}

double psi_of(const QuarticCoefficients& y) {
    return y.y1 * y.y2 * y.y3 - y.y3 * y.y3 - y.y4 * y.y1 * y.y1;
}

// Critical complex pair: the conjugate pair with the smallest |Re|.
std::optional<std::complex<double>> critical_pair(const std::vector<std::complex<double>>& eigs) {
    std::optional<std::complex<double>> best;
    for (const auto& e : eigs) {
        if (e.imag() <= 0.0) continue;  // keep the upper half-plane member
        if (!best || std::abs(e.real()) < std::abs(best->real())) best = e;
    }
    return best;
}

}  // namespace

const char* to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "stable";
        case StabilityVerdict::Unstable: return "unstable";
        case StabilityVerdict::Marginal: return "marginal";
    }
    return "?";
}

std::optional<State> track_interior_equilibrium(const ModelParams& p, double alpha,
                                                const std::optional<State>& seed) {
    ModelParams q = p;
    q.alpha = alpha;
    if (seed) {
        if (auto s = continue_interior(q, *seed)) return s;
    }
    auto all = coexistence_equilibria(q);
    if (all.empty()) return std::nullopt;
    return all.front().state;
}

ThresholdPair thresholds(const ModelParams& p) {
    ThresholdPair t;
    t.R0 = p.m1 * p.alpha * p.K * p.eta * (p.eta + p.omega) /
           (p.lambda * p.omega * (p.eta + p.omega) + p.eta * p.gamma * p.omega +
            p.d * p.eta * (p.eta + p.omega));
    t.R1 = p.m2 * p.phi * p.alpha * p.K * (p.eta + p.omega) /
           ((p.a + p.K) * (p.d + p.delta) * (p.eta + p.omega) + (p.a + p.K) * p.gamma * p.omega);
    return t;
}

std::vector<std::complex<double>> eigenvalues(const Mat4& M) {
    if (!M.allFinite()) throw NumericDomainError("eigenvalues: matrix has non-finite entries");
    Eigen::EigenSolver<Mat4> solver(M, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericDomainError("eigenvalue iteration failed to converge");
    }
    std::vector<std::complex<double>> out(4);
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

E0Classification classify_E0(const ModelParams& p) {
    const double wa = p.omega / p.eta;
    const double sat = p.gamma * p.omega / (p.eta + p.omega);
    E0Classification c;
    c.verdict = StabilityVerdict::Unstable;  // rho1 = r > 0 for every valid p
    c.witness_eigenvalue = p.r;
    c.eigenvalues = {p.r, -p.eta, -(p.lambda * wa + p.d + sat), -(p.d + p.delta + sat)};
    return c;
}

E1Classification classify_E1(const ModelParams& p) {
    const double wa = p.omega / p.eta;
    const double sat = p.gamma * p.omega / (p.eta + p.omega);

    E1Classification c;
    c.thresholds = thresholds(p);
    c.closed_form_eigenvalues = {
        -p.r,
        p.m1 * p.alpha * p.K - p.lambda * wa - p.d - sat,
        p.m2 * p.phi * p.alpha * p.K / (p.a + p.K) - p.d - p.delta - sat,
        -p.eta,
    };

    constexpr double guard = 1e-9;
    StabilityVerdict formula;
    if (std::abs(c.thresholds.R0 - 1.0) < guard || std::abs(c.thresholds.R1 - 1.0) < guard) {
        formula = StabilityVerdict::Marginal;
    } else if (c.thresholds.R0 < 1.0 && c.thresholds.R1 < 1.0) {
        formula = StabilityVerdict::Stable;
    } else {
        formula = StabilityVerdict::Unstable;
    }

    const Mat4 J = jacobian(p, State{p.K, 0.0, 0.0, wa});
    const auto eigs = eigenvalues(J);
    c.max_real_numeric = max_real(eigs);
    const StabilityVerdict numeric = eigen_verdict(c.max_real_numeric, 1e-12 * (1.0 + spectral_radius(eigs)));

    require_consistent(formula, numeric, "classify_E1");
    c.verdict = formula;
    return c;
}

CubicStabilityReport classify_E3(const ModelParams& p, const Equilibrium& eq) {
    if (eq.kind != EquilibriumKind::HealthyPestFree) {
        throw std::invalid_argument("classify_E3 expects a healthy-pest-free equilibrium");
    }
    const double X = eq.state.X, I = eq.state.I, A = eq.state.A;
    const double aX = p.a + X;
    const double oneA2 = (1.0 + A) * (1.0 + A);
    const Mat4 J = jacobian(p, eq.state);

    CubicStabilityReport rep;
    rep.F11 = J(0, 0);
    rep.F22 = J(1, 1);
    rep.F33 = J(2, 2);

    const double cross = p.m2 * p.phi * p.phi * p.alpha * p.alpha * p.a * X * I / (aX * aX * aX);
    const double chem = p.sigma * p.gamma * I / oneA2;
    rep.C1 = -rep.F11 - rep.F33 + p.eta;
    rep.C2 = rep.F11 * rep.F33 - p.eta * rep.F11 - p.eta * rep.F33 + cross + chem;
    rep.C3 = p.eta * rep.F11 * rep.F33 - chem * rep.F11 + p.eta * cross;

    // Hand-expanded variant dividing by (X^3 + a) with a truncated cubic
    // expansion; evaluated verbatim for the deviation report.
    const double printed_den = (X * X * X + p.a) * oneA2;
    rep.printed_C2 = (rep.F11 - p.eta) * rep.F33 - rep.F11 * p.eta +
                     (p.gamma * p.sigma * (X * X * X + 3.0 * X * X * p.a + 3.0 * p.a) +
                      p.m2 * p.phi * p.phi * p.alpha * p.alpha * oneA2) *
                         I / printed_den;
    rep.printed_C3 = p.eta * rep.F11 * rep.F33 +
                     (I * X * p.a * p.alpha * p.alpha * p.eta * p.phi * p.phi * p.m2 * oneA2 -
                      p.sigma * I * p.gamma * aX * aX * aX * rep.F11) /
                         printed_den;
    rep.printed_max_rel_deviation =
        std::max(std::abs(rep.printed_C2 - rep.C2) / (1e-300 + std::abs(rep.C2)),
                 std::abs(rep.printed_C3 - rep.C3) / (1e-300 + std::abs(rep.C3)));

    const auto eigs = eigenvalues(J);
    const double ws = std::max(spectral_radius(eigs), 1e-12);
    rep.max_real_numeric = max_real(eigs);

    const double band1 = 1e-9 * ws;
    const double band3 = 1e-9 * ws * ws * ws;
    rep.cond_F22_negative = rep.F22 < 0.0;
    rep.cond_C1_positive = rep.C1 > 0.0;
    rep.cond_C3_positive = rep.C3 > 0.0;
    rep.cond_hurwitz = rep.C1 * rep.C2 - rep.C3 > 0.0;

    const bool marginal = std::abs(rep.F22) <= band1 || std::abs(rep.C1) <= band1 ||
                          std::abs(rep.C3) <= band3 ||
                          std::abs(rep.C1 * rep.C2 - rep.C3) <= band3;
    StabilityVerdict formula;
    if (marginal) {
        formula = StabilityVerdict::Marginal;
    } else if (rep.cond_F22_negative && rep.cond_C1_positive && rep.cond_C3_positive &&
               rep.cond_hurwitz) {
        formula = StabilityVerdict::Stable;
    } else {
        formula = StabilityVerdict::Unstable;
    }
    const StabilityVerdict numeric = eigen_verdict(rep.max_real_numeric, band1);
    require_consistent(formula, numeric, "classify_E3");
    rep.verdict = formula;
    return rep;
}

QuarticCoefficients quartic_coefficients(const ModelParams& p, const Equilibrium& eq) {
    if (eq.kind != EquilibriumKind::Coexistence) {
        throw std::invalid_argument("quartic_coefficients expects a coexistence equilibrium");
    }
    return quartic_from_entries(interior_entries(p, eq.state));
}

QuarticPrintedComparison quartic_printed_comparison(const ModelParams& p, const Equilibrium& eq) {
    const QuarticCoefficients used = quartic_coefficients(p, eq);
    const double X = eq.state.X, S = eq.state.S, I = eq.state.I, A = eq.state.A;
    const double aX = p.a + X;
    const double aX3 = aX * aX * aX;
    const double oneA2 = (1.0 + A) * (1.0 + A);
    const Mat4 J = jacobian(p, eq.state);
    const double F11 = J(0, 0), F22 = J(1, 1), F33 = J(2, 2);
    const double al2 = p.alpha * p.alpha;
    const double ph2 = p.phi * p.phi;

    QuarticPrintedComparison cmp;
    cmp.printed.y1 = -(F11 + F22 + F33) + p.eta;
    cmp.printed.y2 = (F22 + F33 - p.eta) * F11 + (F33 - p.eta) * F22 - p.eta * F33 +
                     S * X * al2 * p.m1 - p.gamma * (I + S) * p.sigma / (oneA2 * aX) -
                     p.m2 * ph2 * al2 * p.a * I * X / aX3;
    cmp.printed.y3 =
        ((-F33 + p.eta) * F22 + p.eta * F33 + p.gamma * (I + S) * p.sigma / oneA2) * F11 +
        (p.eta * F33 + (-p.lambda * S + p.gamma * I / oneA2) * p.sigma +
         p.m2 * ph2 * al2 * p.a * I * X / aX3) *
            F22 +
        (-S * X * al2 * p.m1 + p.sigma * (p.lambda * S + p.gamma * S / oneA2)) * F33 +
        S * al2 * (p.eta + A * p.lambda * p.phi / aX) * X * p.m1 -
        A * (p.lambda * S + p.gamma * S / oneA2) * p.sigma * p.lambda -
        p.m2 * ph2 * al2 * p.a * I * X * p.eta / aX3;
    cmp.printed.y4 =
        ((p.lambda * S - p.gamma * I / oneA2) * p.sigma - p.eta * F33) * F22 -
        p.sigma * (p.lambda * S + p.gamma * S / oneA2) * F33 +
        A * (p.lambda * S + p.gamma * S / oneA2) * p.sigma * p.lambda * F11 +
        al2 * ph2 * p.eta * X * F22 * p.m2 * p.a * I / aX3 - S * X * al2 * p.eta * p.m1 * F33 -
        (X + p.a - p.phi) * p.m2 * I * p.sigma * p.a * al2 *
            (p.lambda * oneA2 + p.gamma) * p.phi * X * S / (oneA2 * aX3) +
        ((S * (X + p.a - p.phi) * p.sigma + A * p.eta * p.phi) * oneA2 * p.lambda -
         I * p.gamma * p.sigma * (X + p.a - p.phi)) *
            S * X * al2 * p.m1 / (oneA2 * aX);

    cmp.max_rel_deviation = 0.0;
    const double used_arr[] = {used.y1, used.y2, used.y3, used.y4};
    const double printed_arr[] = {cmp.printed.y1, cmp.printed.y2, cmp.printed.y3, cmp.printed.y4};
    for (int i = 0; i < 4; ++i) {
        cmp.max_rel_deviation =
            std::max(cmp.max_rel_deviation,
                     std::abs(printed_arr[i] - used_arr[i]) / (1e-300 + std::abs(used_arr[i])));
    }
    return cmp;
}

EstarClassification classify_Estar(const ModelParams& p, const Equilibrium& eq) {
    EstarClassification c;
    c.y = quartic_coefficients(p, eq);

    const auto eigs = eigenvalues(jacobian(p, eq.state));
    const double ws = std::max(spectral_radius(eigs), 1e-12);
    c.max_real_numeric = max_real(eigs);

    const double h2 = c.y.y1 * c.y.y2 - c.y.y3;
    const double h3 = psi_of(c.y);
    c.cond_y4_positive = c.y.y4 > 0.0;
    c.cond_y1y2_y3 = h2 > 0.0;
    c.cond_hurwitz = h3 > 0.0;

    const bool marginal = std::abs(c.y.y4) <= 1e-9 * std::pow(ws, 4) ||
                          std::abs(h2) <= 1e-9 * std::pow(ws, 3) ||
                          std::abs(h3) <= 1e-9 * std::pow(ws, 6);
    StabilityVerdict formula;
    if (marginal) {
        formula = StabilityVerdict::Marginal;
    } else if (c.cond_y4_positive && c.cond_y1y2_y3 && c.cond_hurwitz) {
        formula = StabilityVerdict::Stable;
    } else {
        formula = StabilityVerdict::Unstable;
    }
    const StabilityVerdict numeric = eigen_verdict(c.max_real_numeric, 1e-9 * ws);
    require_consistent(formula, numeric, "classify_Estar");
    c.verdict = formula;
    return c;
}

double psi(const ModelParams& p, double alpha) {
    const auto s = track_interior_equilibrium(p, alpha, std::nullopt);
    if (!s) {
        throw NoCoexistence("no interior equilibrium at alpha=" + std::to_string(alpha));
    }
    return psi_of(quartic_at(p, alpha, *s));
}

HopfScan hopf_scan(const ModelParams& p, double alpha_lo, double alpha_hi, std::size_t n_grid) {
    if (!(alpha_lo > 0.0) || !(alpha_hi > alpha_lo) || n_grid < 2) {
        throw std::invalid_argument("hopf_scan needs 0 < alpha_lo < alpha_hi and n_grid >= 2");
    }

    HopfScan scan;
    scan.grid.resize(n_grid);

    // Continuation pass: march the grid, seeding each Newton solve from the
    // previous grid point so the scan stays on one coexistence branch.
    std::optional<State> seed;
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double alpha =
            alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        HopfGridSample& g = scan.grid[i];
        g.alpha = alpha;
        const auto s = track_interior_equilibrium(p, alpha, seed);
        if (!s) {
            seed.reset();
            continue;
        }
        seed = s;
        g.has_coexistence = true;
        g.equilibrium = *s;
        g.psi = psi_of(quartic_at(p, alpha, *s));
        ModelParams q = p;
        q.alpha = alpha;
        g.max_real_eig = max_real(eigenvalues(jacobian(q, *s)));
    }

    // Report contiguous no-coexistence segments.
    for (std::size_t i = 0; i < n_grid;) {
        if (scan.grid[i].has_coexistence) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n_grid && !scan.grid[j].has_coexistence) ++j;
        scan.skipped_segments.emplace_back(scan.grid[i].alpha, scan.grid[j - 1].alpha);
        i = j;
    }

    for (std::size_t i = 0; i + 1 < n_grid; ++i) {
        const HopfGridSample& lo = scan.grid[i];
        const HopfGridSample& hi = scan.grid[i + 1];
        if (!lo.has_coexistence || !hi.has_coexistence) continue;
        if ((lo.psi > 0.0) == (hi.psi > 0.0)) continue;  // no sign change

        const double psi_scale = std::max({std::abs(lo.psi), std::abs(hi.psi), 1e-300});
        double a_lo = lo.alpha, a_hi = hi.alpha;
        double psi_lo = lo.psi;
        State s_lo = lo.equilibrium, s_hi = hi.equilibrium;
        double a_star = 0.0;
        double psi_star = 0.0;
        State s_star;
        bool located = false;
        for (int it = 0; it < 200; ++it) {
            const double a_mid = 0.5 * (a_lo + a_hi);
            const auto sm =
                track_interior_equilibrium(p, a_mid, (a_mid - a_lo <= a_hi - a_mid) ? s_lo : s_hi);
            if (!sm) break;  // branch lost inside the bracket
            a_star = a_mid;
            s_star = *sm;
            psi_star = psi_of(quartic_at(p, a_mid, s_star));
            located = true;
            if (std::abs(psi_star) <= 1e-10 * psi_scale ||
                (a_hi - a_lo) <= 1e-15 * std::max(1.0, a_mid)) {
                break;
            }
            if ((psi_star > 0.0) == (psi_lo > 0.0)) {
                a_lo = a_mid;
                psi_lo = psi_star;
                s_lo = s_star;
            } else {
                a_hi = a_mid;
                s_hi = s_star;
            }
        }
        if (!located) continue;

        HopfScanResult res;
        res.alpha_star = a_star;
        res.psi_at_star = psi_star;
        res.equilibrium = s_star;

        ModelParams q = p;
        q.alpha = a_star;
        const QuarticCoefficients y = quartic_at(p, a_star, s_star);
        res.omega0_sq_ratio = y.y3 / y.y1;
        const auto eigs = eigenvalues(jacobian(q, s_star));
        const auto pair = critical_pair(eigs);
        if (!pair) continue;  // no complex pair: not a Hopf candidate
        const double beta1 = pair->real();
        const double beta2 = pair->imag();
        res.imag_part_omega0 = beta2;

        // y' by central differences in alpha along the tracked branch.
        const double hd = 1e-5 * a_star;
        const auto s_m = track_interior_equilibrium(p, a_star - hd, s_star);
        const auto s_p = track_interior_equilibrium(p, a_star + hd, s_star);
        if (!s_m || !s_p) continue;
        const QuarticCoefficients ym = quartic_at(p, a_star - hd, *s_m);
        const QuarticCoefficients yp = quartic_at(p, a_star + hd, *s_p);
        const double y1p = (yp.y1 - ym.y1) / (2.0 * hd);
        const double y2p = (yp.y2 - ym.y2) / (2.0 * hd);
        const double y3p = (yp.y3 - ym.y3) / (2.0 * hd);
        const double y4p = (yp.y4 - ym.y4) / (2.0 * hd);

        const double b1 = beta1, b2 = beta2;
        const double A_ = 4.0 * b1 * b1 * b1 - 12.0 * b1 * b2 * b2 +
                          3.0 * y.y1 * (b1 * b1 - b2 * b2) + 2.0 * y.y2 * b1 + y.y3;
        const double B_ = 12.0 * b1 * b1 * b2 + 6.0 * y.y1 * b1 * b2 - 4.0 * b2 * b2 * b2 +
                          2.0 * y.y2 * b2;
        const double C_ = (b1 * b1 * b1 - 3.0 * b1 * b2 * b2) * y1p +
                          (b1 * b1 - b2 * b2) * y2p + b1 * y3p + y4p;
        const double D_ = (3.0 * b1 * b1 * b2 - b2 * b2 * b2) * y1p + 2.0 * b1 * b2 * y2p +
                          b2 * y3p;
        res.transversality_value = A_ * C_ + B_ * D_;
        res.predicted_re_slope = -(A_ * C_ + B_ * D_) / (A_ * A_ + B_ * B_);

        // Verify the crossing with eigenvalues on both sides of alpha*.
        const double hc = 1e-4 * a_star;
        const auto s_cm = track_interior_equilibrium(p, a_star - hc, s_star);
        const auto s_cp = track_interior_equilibrium(p, a_star + hc, s_star);
        if (s_cm && s_cp) {
            ModelParams qm = p, qp = p;
            qm.alpha = a_star - hc;
            qp.alpha = a_star + hc;
            const auto pm = critical_pair(eigenvalues(jacobian(qm, *s_cm)));
            const auto pp = critical_pair(eigenvalues(jacobian(qp, *s_cp)));
            if (pm && pp) {
                res.fd_re_slope = (pp->real() - pm->real()) / (2.0 * hc);
                res.eigen_crossing_verified = (pm->real() < 0.0) != (pp->real() < 0.0);
            }
        }
        scan.points.push_back(res);
    }
    return scan;
}

}  // namespace pestctl
