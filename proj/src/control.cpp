#include "pestctl/control.hpp"

#include <algorithm>
#include <cmath>

namespace pestctl {

namespace {

double clamp01(double x) {
    return std::clamp(x, 0.0, 1.0);
}

double integrand(const ObjectiveWeights& w, const Vec4& s, const ControlTriple& u) {
    return 0.5 * (w.P1 * u.u1 * u.u1 + w.P2 * u.u2 * u.u2 + w.P3 * u.u3 * u.u3) +
           w.Q * s[1] * s[1] - w.R * s[3] * s[3];
}

}  // namespace

double objective(const ModelParams&, const ObjectiveWeights& w, const Trajectory& state,
                 const ControlSchedule& u) {
    if (!(state.grid == u.grid) || state.values.size() != u.values.size()) {
        throw GridMismatch("objective: state and control grids differ");
    }
    const double h = state.grid.step();
    double acc = 0.0;
    for (std::size_t k = 0; k < state.values.size(); ++k) {
        const double f = integrand(w, state.values[k], u.values[k]);
        const bool endpoint = (k == 0 || k + 1 == state.values.size());
        acc += (endpoint ? 0.5 : 1.0) * f;
    }
    const double J = acc * h;
    if (!std::isfinite(J)) throw NumericDomainError("objective not finite");
    return J;
}

double hamiltonian(const ModelParams& p, const ObjectiveWeights& w, const State& s,
                   const ControlTriple& u, const Vec4& lambda) {
    return integrand(w, s.vec(), u) + lambda.dot(rhs_controlled(p, s, u));
}

ControlTriple pmp_control(const ModelParams& p, const ObjectiveWeights& w, const State& s,
                          const Vec4& lambda) {
    w.validate();
    const double l2 = lambda[1], l3 = lambda[2], l4 = lambda[3];
    ControlTriple u;
    u.u1 = clamp01((l2 * s.S + l3 * s.I) * p.gamma * s.A / (w.P1 * (1.0 + s.A)));
    u.u2 = clamp01((l2 - l3) * p.lambda * s.A * s.S / w.P2);
    u.u3 = clamp01(-l4 * p.omega / w.P3);
    return u;
}

SweepResult fbsm(const ModelParams& p, const ObjectiveWeights& w, const State& s0,
                 const TimeGrid& grid, double relaxation, double tol, std::size_t max_iter) {
    grid.validate();
    w.validate();
    if (!(relaxation > 0.0 && relaxation <= 1.0)) {
        throw std::invalid_argument("fbsm: relaxation must lie in (0, 1]");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("fbsm: tol must be positive");

    const std::size_t n = grid.n_nodes();
    ControlSchedule u = ControlSchedule::constant(grid, ControlTriple{});  // start at u = 0

    SweepResult result;
    bool have_best = false;
    bool converged = false;
    std::vector<SweepIteration> history;

    std::size_t it = 0;
    for (; it < max_iter && !converged; ++it) {
        Trajectory state = integrate_forward(p, s0, grid, &u);
        Trajectory adjoint = integrate_adjoint_backward(p, state, u, w, grid);

        ControlSchedule u_new;
        u_new.grid = grid;
        u_new.values.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const ControlTriple raw =
                pmp_control(p, w, State::from_vec(state.values[k]), adjoint.values[k]);
            const ControlTriple& old = u.values[k];
            u_new.values[k] = ControlTriple{
                (1.0 - relaxation) * old.u1 + relaxation * raw.u1,
                (1.0 - relaxation) * old.u2 + relaxation * raw.u2,
                (1.0 - relaxation) * old.u3 + relaxation * raw.u3,
            };
        }

        // Relative convergence test per channel: tol*sum|u_new| >= sum|u_new - u_old|.
        double abs_sum[3] = {0.0, 0.0, 0.0};
        double diff_sum[3] = {0.0, 0.0, 0.0};
        double max_change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double nu[3] = {u_new.values[k].u1, u_new.values[k].u2, u_new.values[k].u3};
            const double ou[3] = {u.values[k].u1, u.values[k].u2, u.values[k].u3};
            for (int c = 0; c < 3; ++c) {
                abs_sum[c] += std::abs(nu[c]);
                diff_sum[c] += std::abs(nu[c] - ou[c]);
                max_change = std::max(max_change, std::abs(nu[c] - ou[c]));
            }
        }
        converged = true;
        for (int c = 0; c < 3; ++c) {
            if (tol * abs_sum[c] - diff_sum[c] < 0.0) converged = false;
        }

        const double J = objective(p, w, state, u_new);
        history.push_back(SweepIteration{max_change, J});
        if (!have_best || J <= result.objective) {
            result.state = std::move(state);
            result.adjoint = std::move(adjoint);
            result.control = u_new;
            result.objective = J;
            have_best = true;
        }
        u = std::move(u_new);
    }

    result.iterations = it;
    result.converged = converged;
    result.history = std::move(history);
    return result;
}

}  // namespace pestctl
