#include "pestctl/equilibria.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace pestctl {

namespace {

constexpr double kSingularSurfaceBand = 1e-10;

double residual_max_norm(const ModelParams& p, const State& s) {
    return rhs(p, s).cwiseAbs().maxCoeff();
}

double state_max_norm(const State& s) {
    return s.vec().cwiseAbs().maxCoeff();
}

bool residual_ok(const ModelParams& p, const State& s, double& out) {
    out = residual_max_norm(p, s);
    return out <= 1e-9 * (1.0 + state_max_norm(s));
}

// Dense polynomial with ascending coefficients; just enough arithmetic to
// assemble the interior-equilibrium sextic without hand-expanding it.
struct Poly {
    std::vector<double> c;  // c[k] multiplies A^k

    static Poly of(std::initializer_list<double> ascending) { return Poly{ascending}; }

    Poly operator*(const Poly& o) const {
        Poly r;
        r.c.assign(c.size() + o.c.size() - 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = 0; j < o.c.size(); ++j) {
                r.c[i + j] += c[i] * o.c[j];
            }
        }
        return r;
    }
    Poly operator*(double k) const {
        Poly r = *this;
        for (double& x : r.c) x *= k;
        return r;
    }
    Poly operator+(const Poly& o) const {
        Poly r;
        r.c.assign(std::max(c.size(), o.c.size()), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
        for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
        return r;
    }
    Poly operator-(const Poly& o) const { return *this + o * -1.0; }
};

// Polynomial numerators (in A) of the steady-state closed forms, with
// kappa = m1*alpha*(1+A) as the common denominator of X. With
// P = (X+a-phi)*kappa:
//   X = N_X/kappa, a+X = N_aX/kappa, K-X = N_KX/kappa,
//   S = N_S/(K*alpha*sigma*P*kappa), I = N_aX*N_B/(K*alpha*sigma*P*kappa).
// The K*alpha*sigma*P*kappa factor is common to every term of the cleared
// infected-pest equation and cancels, which is why P never appears below.
struct SteadyStatePolys {
    Poly N_X;
    Poly kappa;
    Poly N_aX;
    Poly N_KX;
    Poly N_S;
    Poly N_B;
};

SteadyStatePolys steady_state_polys(const ModelParams& p) {
    SteadyStatePolys q;
    q.N_X = Poly::of({p.d, p.d + p.lambda + p.gamma, p.lambda});
    q.kappa = Poly::of({p.m1 * p.alpha, p.m1 * p.alpha});
    q.N_aX = q.kappa * p.a + q.N_X;
    q.N_KX = q.kappa * p.K - q.N_X;
    const Poly etaA_minus_omega = Poly::of({-p.omega, p.eta});
    q.N_S = (q.N_aX * q.N_KX) * (p.r * p.sigma) -
            etaA_minus_omega * (q.kappa * q.kappa) * (p.K * p.phi * p.alpha);
    q.N_B = Poly::of({-p.omega * p.alpha * p.K - p.K * p.sigma * p.r, p.eta * p.alpha * p.K}) *
                q.kappa +
            q.N_X * (p.sigma * p.r);
    return q;
}

}  // namespace

const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::Axial: return "axial";
        case EquilibriumKind::PestFree: return "pest-free";
        case EquilibriumKind::HealthyPestFree: return "healthy-pest-free";
        case EquilibriumKind::Coexistence: return "coexistence";
    }
    return "?";
}

Equilibrium axial_equilibrium(const ModelParams& p) {
    Equilibrium e;
    e.kind = EquilibriumKind::Axial;
    e.state = State{0.0, 0.0, 0.0, p.omega / p.eta};
    e.residual_norm = residual_max_norm(p, e.state);
    e.existence_flags = {{"always_exists", true}};
    return e;
}

Equilibrium pest_free_equilibrium(const ModelParams& p) {
    Equilibrium e;
    e.kind = EquilibriumKind::PestFree;
    e.state = State{p.K, 0.0, 0.0, p.omega / p.eta};
    e.residual_norm = residual_max_norm(p, e.state);
    e.existence_flags = {{"always_exists", true}};
    return e;
}

NonExistenceReport boundary_equilibrium_check(const ModelParams& p) {
    NonExistenceReport rep;
    rep.c2 = p.lambda;
    rep.c1 = p.gamma + p.d + p.lambda;
    rep.c0 = p.d;
    rep.discriminant = rep.c1 * rep.c1 - 4.0 * rep.c2 * rep.c0;
    if (rep.discriminant >= 0.0) {
        const double sq = std::sqrt(rep.discriminant);
        rep.root1 = {(-rep.c1 + sq) / (2.0 * rep.c2), 0.0};
        rep.root2 = {(-rep.c1 - sq) / (2.0 * rep.c2), 0.0};
    } else {
        const double sq = std::sqrt(-rep.discriminant);
        rep.root1 = {-rep.c1 / (2.0 * rep.c2), sq / (2.0 * rep.c2)};
        rep.root2 = std::conj(rep.root1);
    }
    auto positive_real = [](const std::complex<double>& z) {
        return z.imag() == 0.0 && z.real() > 0.0;
    };
    rep.positive_root_exists = positive_real(rep.root1) || positive_real(rep.root2);
    return rep;
}

CubicCoefficients cubic_coefficients(const ModelParams& p) {
    const double mm = p.alpha * p.phi * p.m2;
    const double D = p.d + p.delta + p.gamma;
    const double E = p.d + p.delta;
    const double den = -mm + D;
    if (std::abs(den) < 1e-14 * D) {
        throw DegenerateDenominator(
            "cubic coefficients degenerate: alpha*phi*m2 == d + delta + gamma");
    }
    CubicCoefficients c;
    c.a1 = ((mm - D) * p.K - p.a * (mm - 2.0 * D)) / den;
    c.a2 = (((mm - 2.0 * D) * p.K + p.a * D) * p.a) / den -
           (p.K * (den * p.omega + p.eta * (E - mm)) * p.phi * p.alpha) /
               (p.r * p.sigma * den);
    c.a3 = -(p.K * p.a * p.a * p.r * D * p.sigma +
             p.K * p.phi * p.a * p.alpha * (D * p.omega + p.eta * E)) /
           (p.r * p.sigma * den);
    if (!std::isfinite(c.a1) || !std::isfinite(c.a2) || !std::isfinite(c.a3)) {
        throw NumericDomainError("cubic coefficients not finite");
    }
    return c;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    if (coeffs.size() < 2 || coeffs.front() == 0.0) {
        throw std::invalid_argument("polynomial_roots wants degree >= 1 with nonzero lead");
    }
    const auto n = static_cast<Eigen::Index>(coeffs.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) companion(i + 1, i) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        companion(i, n - 1) = -coeffs[static_cast<std::size_t>(n - i)] / coeffs[0];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericDomainError("companion-matrix eigensolver failed to converge");
    }
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

std::vector<Equilibrium> healthy_pest_free_equilibria(const ModelParams& p) {
    const CubicCoefficients c = cubic_coefficients(p);
    std::vector<Equilibrium> out;
    for (const auto& root : polynomial_roots({1.0, c.a1, c.a2, c.a3})) {
        if (std::abs(root.imag()) >= 1e-9 * (1.0 + std::abs(root.real()))) continue;
        const double X = root.real();
        const bool in_range = X > 0.0 && p.K - X > 0.0;
        if (!in_range) continue;
        const double I = p.r * (p.a + X) * (p.K - X) / (p.phi * p.alpha * p.K);
        const double A = (p.omega + p.sigma * I) / p.eta;
        if (!(I > 0.0) || !(A > 0.0)) continue;

        Equilibrium e;
        e.kind = EquilibriumKind::HealthyPestFree;
        e.state = State{X, 0.0, I, A};
        if (!residual_ok(p, e.state, e.residual_norm)) continue;
        e.existence_flags = {{"positive_cubic_root_below_K", true},
                             {"infected_and_awareness_positive", true}};
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return a.state.X < b.state.X; });
    return out;
}

double interior_crop_from_awareness(const ModelParams& p, double A) {
    return (p.lambda * A * A + (p.d + p.lambda + p.gamma) * A + p.d) /
           (p.m1 * p.alpha * (1.0 + A));
}

std::pair<double, double> interior_pests_from_crop_awareness(const ModelParams& p, double X,
                                                             double A) {
    const double surf = X + p.a - p.phi;
    if (std::abs(surf) <= kSingularSurfaceBand) {
        throw NumericDomainError("closed-form pests undefined on the surface X + a - phi = 0");
    }
    const double den = p.K * p.alpha * p.sigma * surf;
    const double S = (p.r * (p.a + X) * (p.K - X) * p.sigma -
                      p.K * p.phi * p.alpha * (p.eta * A - p.omega)) /
                     den;
    const double I = (p.a + X) *
                     ((A * p.eta - p.omega) * p.alpha * p.K - p.K * p.sigma * p.r +
                      p.sigma * p.r * X) /
                     den;
    return {S, I};
}

double coexistence_awareness_threshold(const ModelParams& p) {
    return (p.alpha * p.omega + p.r * p.sigma) / (p.alpha * p.eta);
}

bool refine_steady_state(const ModelParams& p, State& s, int max_iter, double step_tol) {
    Vec4 y = s.vec();
    for (int it = 0; it < max_iter; ++it) {
        Vec4 f;
        Mat4 J;
        try {
            f = rhs(p, State::from_vec(y));
            J = jacobian(p, State::from_vec(y));
        } catch (const NumericDomainError&) {
            return false;
        }
        const Vec4 step = J.fullPivLu().solve(-f);
        if (!finite(step)) return false;

        const double base = f.cwiseAbs().maxCoeff();
        double damp = 1.0;
        Vec4 y_next = y + step;
        bool improved = false;
        for (int halving = 0; halving < 60; ++halving) {
            y_next = y + damp * step;
            try {
                const Vec4 f_next = rhs(p, State::from_vec(y_next));
                if (finite(f_next) && f_next.cwiseAbs().maxCoeff() < base) {
                    improved = true;
                    break;
                }
            } catch (const NumericDomainError&) {
            }
            damp *= 0.5;
        }
        if (!improved && base > 0.0) return false;
        y = y_next;
        if ((damp * step).cwiseAbs().maxCoeff() < step_tol) {
            s = State::from_vec(y);
            return true;
        }
    }
    return false;
}

std::vector<Equilibrium> coexistence_equilibria(const ModelParams& p) {
    std::vector<State> converged;
    const double base_A = p.omega / p.eta;

    for (int ix = 1; ix <= 9; ++ix) {
        const double X0 = 0.1 * static_cast<double>(ix) * p.K;
        for (int ia = 1; ia <= 10; ++ia) {
            const double A0 = 0.5 * static_cast<double>(ia) * base_A;
            double S0, I0;
            try {
                std::tie(S0, I0) = interior_pests_from_crop_awareness(p, X0, A0);
            } catch (const NumericDomainError&) {
                continue;  // seed on the singular surface
            }
            State s{X0, std::max(S0, 1e-6), std::max(I0, 1e-6), A0};
            if (!refine_steady_state(p, s)) continue;
            if (!(s.X > 0.0 && s.S > 0.0 && s.I > 0.0 && s.A > 0.0)) continue;
            if (std::abs(s.X + p.a - p.phi) <= kSingularSurfaceBand) continue;

            // Validate against the closed forms; this also rejects points that
            // drifted onto a boundary equilibrium with denormal pest levels.
            const double Xc = interior_crop_from_awareness(p, s.A);
            if (std::abs(Xc - s.X) > 1e-8 * (1.0 + std::abs(s.X))) continue;
            double Sc, Ic;
            try {
                std::tie(Sc, Ic) = interior_pests_from_crop_awareness(p, s.X, s.A);
            } catch (const NumericDomainError&) {
                continue;
            }
            if (std::abs(Sc - s.S) > 1e-6 * (1.0 + std::abs(s.S))) continue;
            if (std::abs(Ic - s.I) > 1e-6 * (1.0 + std::abs(s.I))) continue;
            converged.push_back(s);
        }
    }

    std::sort(converged.begin(), converged.end(), [](const State& a, const State& b) {
        if (a.X != b.X) return a.X < b.X;
        if (a.S != b.S) return a.S < b.S;
        if (a.I != b.I) return a.I < b.I;
        return a.A < b.A;
    });

    std::vector<Equilibrium> out;
    const double a_threshold = coexistence_awareness_threshold(p);
    for (const State& s : converged) {
        const bool duplicate =
            std::any_of(out.begin(), out.end(), [&](const Equilibrium& e) {
                return (e.state.vec() - s.vec()).cwiseAbs().maxCoeff() < 1e-8;
            });
        if (duplicate) continue;
        Equilibrium e;
        e.kind = EquilibriumKind::Coexistence;
        e.state = s;
        if (!residual_ok(p, e.state, e.residual_norm)) continue;
        e.existence_flags = {{"awareness_above_closed_form_bound", s.A > a_threshold}};
        out.push_back(std::move(e));
    }
    return out;
}

SexticCoefficients sextic_coefficients(const ModelParams& p) {
    const SteadyStatePolys q = steady_state_polys(p);
    const Poly oneA = Poly::of({1.0, 1.0});
    const Poly justA = Poly::of({0.0, 1.0});

    // Numerator of the infected-pest steady-state equation after substituting
    // the closed forms and clearing every denominator; the common factor
    // (a + X)*kappa has no positive roots and is dropped.
    const Poly f = q.N_X * q.N_B * oneA * (p.m2 * p.phi * p.alpha) +
                   justA * q.N_S * oneA * p.lambda -
                   q.N_aX * q.N_B * oneA * (p.d + p.delta) -
                   justA * q.N_aX * q.N_B * p.gamma;

    if (f.c.size() != 7) {
        throw NumericDomainError("interior-equilibrium polynomial has unexpected degree");
    }
    const double lead = f.c[6];
    SexticCoefficients s;
    s.a1 = f.c[5] / lead;
    s.a2 = f.c[4] / lead;
    s.a3 = f.c[3] / lead;
    s.a4 = f.c[2] / lead;
    s.a5 = f.c[1] / lead;
    s.a6 = f.c[0] / lead;
    for (double v : {s.a1, s.a2, s.a3, s.a4, s.a5, s.a6}) {
        if (!std::isfinite(v)) throw NumericDomainError("sextic coefficients not finite");
    }
    return s;
}

double SexticCoefficients::eval(double A) const {
    // Horner, monic leading 1.
    double acc = 1.0;
    for (double c : {a1, a2, a3, a4, a5, a6}) acc = acc * A + c;
    return acc;
}

double SexticCoefficients::max_coefficient_magnitude() const {
    double m = 1.0;
    for (double c : {a1, a2, a3, a4, a5, a6}) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace pestctl
