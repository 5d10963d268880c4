#include "pestctl/integrate.hpp"

#include <algorithm>

namespace pestctl {

namespace {

constexpr double kNegativityTolerance = 1e-9;

// Locate t in the grid and return the linear interpolation weights.
template <typename T, typename Combine>
T interp(const TimeGrid& g, const std::vector<T>& values, double t, Combine combine) {
    if (t <= g.t0) return values.front();
    if (t >= g.tf) return values.back();
    const double pos = (t - g.t0) / g.step();
    auto k = static_cast<std::size_t>(pos);
    k = std::min(k, g.n_steps - 1);
    const double w = pos - static_cast<double>(k);
    return combine(values[k], values[k + 1], w);
}

Vec4 clamp_roundoff_negatives(const Vec4& v) {
    Vec4 out = v;
    for (int i = 0; i < 4; ++i) {
        if (out[i] < 0.0) {
            if (out[i] < -kNegativityTolerance) {
                throw PositivityViolated("state component " + std::to_string(i) +
                                         " fell below -1e-9: " + std::to_string(out[i]));
            }
            out[i] = 0.0;
        }
    }
    return out;
}

}  // namespace

Vec4 Trajectory::at(double t) const {
    return interp(grid, values, t, [](const Vec4& a, const Vec4& b, double w) -> Vec4 {
        return (1.0 - w) * a + w * b;
    });
}

ControlTriple ControlSchedule::at(double t) const {
    return interp(grid, values, t, [](const ControlTriple& a, const ControlTriple& b, double w) {
        return ControlTriple{(1.0 - w) * a.u1 + w * b.u1, (1.0 - w) * a.u2 + w * b.u2,
                             (1.0 - w) * a.u3 + w * b.u3};
    });
}

ControlSchedule ControlSchedule::constant(const TimeGrid& g, const ControlTriple& u) {
    return ControlSchedule{g, std::vector<ControlTriple>(g.n_nodes(), u)};
}

Trajectory integrate_forward(const ModelParams& p, const State& s0, const TimeGrid& grid,
                             const ControlSchedule* u) {
    grid.validate();
    if (!s0.nonnegative() || !s0.finite()) {
        throw std::invalid_argument("initial state must be finite and componentwise nonnegative");
    }
    if (u) {
        for (const ControlTriple& uk : u->values) {
            if (!uk.admissible(1e-12)) {
                throw std::invalid_argument("control schedule leaves [0,1]^3");
            }
        }
    }

    const double h = grid.step();
    auto deriv = [&](double t, const Vec4& y) -> Vec4 {
        const State s = State::from_vec(y);
        return u ? rhs_controlled(p, s, u->at(t)) : rhs(p, s);
    };

    Trajectory traj;
    traj.grid = grid;
    traj.values.reserve(grid.n_nodes());
    Vec4 y = s0.vec();
    traj.values.push_back(y);

    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const double t = grid.node(k);
        Vec4 k1, k2, k3, k4;
        try {
            k1 = deriv(t, y);
            k2 = deriv(t + 0.5 * h, y + 0.5 * h * k1);
            k3 = deriv(t + 0.5 * h, y + 0.5 * h * k2);
            k4 = deriv(t + h, y + h * k3);
        } catch (const NumericDomainError& e) {
            throw StepUnstable(std::string("integration blew up at t=") + std::to_string(t) +
                               ": " + e.what());
        }
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!finite(y)) {
            throw StepUnstable("non-finite state at t=" + std::to_string(t + h));
        }
        y = clamp_roundoff_negatives(y);
        traj.values.push_back(y);
    }
    return traj;
}

Vec4 adjoint_rhs(const ModelParams& p, const ObjectiveWeights& w, const State& s,
                 const Vec4& lambda, const ControlTriple& u) {
    const double X = s.X, S = s.S, I = s.I, A = s.A;
    const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2], l4 = lambda[3];
    const double aX = p.a + X;
    const double aX2 = aX * aX;
    const double oneA = 1.0 + A;
    const double oneA2 = oneA * oneA;

    Vec4 dl;
    dl[0] = l1 * (p.alpha * S + p.phi * p.alpha * p.a * I / aX2 - p.r * (1.0 - 2.0 * X / p.K)) -
            l2 * p.m1 * p.alpha * S - l3 * p.m2 * p.phi * p.alpha * p.a * I / aX2;
    dl[1] = -2.0 * w.Q * S + l1 * p.alpha * X +
            l2 * (u.u1 * p.gamma * A / oneA + u.u2 * p.lambda * A + p.d - p.m1 * p.alpha * X) -
            l3 * u.u2 * p.lambda * A - l4 * p.sigma;
    dl[2] = l1 * p.phi * p.alpha * X / aX +
            l3 * (u.u1 * p.gamma * A / oneA + p.d + p.delta - p.m2 * p.phi * p.alpha * X / aX) -
            l4 * p.sigma;
    dl[3] = 2.0 * w.R * A + l2 * (u.u1 * p.gamma * S / oneA2 + u.u2 * p.lambda * S) +
            l3 * (u.u1 * p.gamma * I / oneA2 - u.u2 * p.lambda * S) + l4 * p.eta;

    if (!finite(dl)) {
        throw NumericDomainError("adjoint rhs produced a non-finite derivative");
    }
    return dl;
}

Trajectory integrate_adjoint_backward(const ModelParams& p, const Trajectory& state_traj,
                                      const ControlSchedule& u, const ObjectiveWeights& w,
                                      const TimeGrid& grid) {
    grid.validate();
    if (!(state_traj.grid == grid) || state_traj.values.size() != grid.n_nodes()) {
        throw GridMismatch("state trajectory grid does not match the requested adjoint grid");
    }

    const double h = grid.step();
    auto deriv = [&](double t, const Vec4& lam) {
        return adjoint_rhs(p, w, State::from_vec(state_traj.at(t)), lam, u.at(t));
    };

    Trajectory adj;
    adj.grid = grid;
    adj.values.assign(grid.n_nodes(), Vec4::Zero());

    Vec4 lam = Vec4::Zero();  // transversality: lambda(tf) = 0
    for (std::size_t k = grid.n_steps; k-- > 0;) {
        const double t = grid.node(k + 1);  // integrating from node k+1 down to node k
        Vec4 k1, k2, k3, k4;
        try {
            k1 = deriv(t, lam);
            k2 = deriv(t - 0.5 * h, lam - 0.5 * h * k1);
            k3 = deriv(t - 0.5 * h, lam - 0.5 * h * k2);
            k4 = deriv(t - h, lam - h * k3);
        } catch (const NumericDomainError& e) {
            throw StepUnstable(std::string("adjoint sweep blew up at t=") + std::to_string(t) +
                               ": " + e.what());
        }
        lam = lam - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!finite(lam)) {
            throw StepUnstable("non-finite adjoint at t=" + std::to_string(t - h));
        }
        adj.values[k] = lam;
    }
    return adj;
}

BoundsCertificate bounds_certificate(const ModelParams& p, const Trajectory& traj) {
    BoundsCertificate cert;
    cert.L = p.K * (p.r + p.d) * (p.r + p.d) / (4.0 * p.r);
    cert.bound_XSI = cert.L / p.d;
    cert.bound_A = (p.omega * p.d + p.sigma * cert.L) / (p.eta * p.d);

    constexpr double eps = 1e-6;
    const Vec4& first = traj.values.front();
    const bool initial_violation = (first[0] + first[1] + first[2]) > cert.bound_XSI * (1.0 + eps) ||
                                   first[3] > cert.bound_A * (1.0 + eps);
    cert.tail_only = initial_violation;

    const std::size_t begin = initial_violation ? traj.values.size() / 2 : 0;
    cert.sup_XSI = 0.0;
    cert.sup_A = 0.0;
    for (std::size_t k = begin; k < traj.values.size(); ++k) {
        const Vec4& v = traj.values[k];
        cert.sup_XSI = std::max(cert.sup_XSI, v[0] + v[1] + v[2]);
        cert.sup_A = std::max(cert.sup_A, v[3]);
    }
    cert.satisfied =
        cert.sup_XSI <= cert.bound_XSI * (1.0 + eps) && cert.sup_A <= cert.bound_A * (1.0 + eps);
    return cert;
}

}  // namespace pestctl
