#pragma once

#include "pestctl/integrate.hpp"

namespace pestctl {

/// One iteration record of the sweep: largest pointwise control change and
/// the objective value of the iterate.
struct SweepIteration {
    double max_control_change = 0.0;
    double objective = 0.0;
};

struct SweepResult {
    Trajectory state;
    Trajectory adjoint;
    ControlSchedule control;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<SweepIteration> history;
};

/// Composite-trapezoid value of the cost functional over the common grid.
/// Throws GridMismatch when the state and control grids differ.
double objective(const ModelParams& p, const ObjectiveWeights& w, const Trajectory& state,
                 const ControlSchedule& u);

/// Pointwise Hamiltonian (running cost plus adjoint-weighted dynamics).
double hamiltonian(const ModelParams& p, const ObjectiveWeights& w, const State& s,
                   const ControlTriple& u, const Vec4& lambda);

/// Pointwise minimizer of the Hamiltonian over [0,1]^3 at (s, lambda).
ControlTriple pmp_control(const ModelParams& p, const ObjectiveWeights& w, const State& s,
                          const Vec4& lambda);

/// Forward-backward sweep: forward state solve, backward adjoint solve,
/// relaxed control update, until the per-channel relative change test passes.
/// Returns the best iterate by objective; converged=false after max_iter.
SweepResult fbsm(const ModelParams& p, const ObjectiveWeights& w, const State& s0,
                 const TimeGrid& grid, double relaxation = 0.5, double tol = 1e-3,
                 std::size_t max_iter = 200);

}  // namespace pestctl
