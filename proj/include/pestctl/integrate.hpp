#pragma once

#include "pestctl/model.hpp"

#include <optional>
#include <vector>

namespace pestctl {

/// Uniform time grid on [t0, tf] with n_steps intervals (n_steps + 1 nodes).
struct TimeGrid {
    double t0 = 0.0;
    double tf = 600.0;
    std::size_t n_steps = 12000;

    double step() const { return (tf - t0) / static_cast<double>(n_steps); }
    double node(std::size_t k) const {
        return t0 + (tf - t0) * static_cast<double>(k) / static_cast<double>(n_steps);
    }
    std::size_t n_nodes() const { return n_steps + 1; }

    void validate() const {
        if (!(tf > t0)) throw std::invalid_argument("time grid requires tf > t0");
        if (n_steps < 1) throw std::invalid_argument("time grid requires n_steps >= 1");
    }
    bool operator==(const TimeGrid& o) const {
        return t0 == o.t0 && tf == o.tf && n_steps == o.n_steps;
    }
};

/// Grid-sampled 4-vector path (states or adjoints).
struct Trajectory {
    TimeGrid grid;
    std::vector<Vec4> values;  // one per grid node

    /// Piecewise-linear interpolation at time t (clamped to [t0, tf]).
    Vec4 at(double t) const;
};

/// Grid-sampled control path, linearly interpolated between nodes.
struct ControlSchedule {
    TimeGrid grid;
    std::vector<ControlTriple> values;  // one per grid node

    ControlTriple at(double t) const;

    static ControlSchedule constant(const TimeGrid& g, const ControlTriple& u);
};

/// Control-cost weights of the objective functional. P1..P3 must be positive;
/// Q penalizes susceptible pests, R rewards awareness.
struct ObjectiveWeights {
    double P1 = 0.8;
    double P2 = 0.5;
    double P3 = 0.5;
    double Q = 10.0;
    double R = 10.0;

    void validate() const {
        if (!(P1 > 0.0 && P2 > 0.0 && P3 > 0.0)) {
            throw std::invalid_argument("control weights P1, P2, P3 must be strictly positive");
        }
        if (Q < 0.0 || R < 0.0) {
            throw std::invalid_argument("penalty weights Q, R must be nonnegative");
        }
    }
};

/// Trajectory-confinement certificate: L = K(r+d)^2/(4r), X+S+I bounded by
/// L/d and A by (omega*d + sigma*L)/(eta*d). The bound is asymptotic, so when
/// the initial point already violates it only the tail half is checked.
struct BoundsCertificate {
    double L = 0.0;
    double bound_XSI = 0.0;
    double bound_A = 0.0;
    double sup_XSI = 0.0;
    double sup_A = 0.0;
    bool tail_only = false;
    bool satisfied = false;
};

/// Classical RK4 on the (optionally controlled) system. Components dipping
/// into [-1e-9, 0) are clamped to 0; anything below -1e-9 throws
/// PositivityViolated, non-finite values throw StepUnstable.
Trajectory integrate_forward(const ModelParams& p, const State& s0, const TimeGrid& grid,
                             const ControlSchedule* u = nullptr);

/// RK4 backward sweep of the adjoint system from lambda(tf) = 0. State and
/// control values at substages come from piecewise-linear interpolation.
Trajectory integrate_adjoint_backward(const ModelParams& p, const Trajectory& state_traj,
                                      const ControlSchedule& u, const ObjectiveWeights& w,
                                      const TimeGrid& grid);

/// Adjoint system right-hand side at one sample point (equals -dH/dstate).
Vec4 adjoint_rhs(const ModelParams& p, const ObjectiveWeights& w, const State& s,
                 const Vec4& lambda, const ControlTriple& u);

BoundsCertificate bounds_certificate(const ModelParams& p, const Trajectory& traj);

}  // namespace pestctl
