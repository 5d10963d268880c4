#pragma once

#include "pestctl/config.hpp"
#include "pestctl/stability.hpp"

namespace pestctl {

/// Time-series runs, one CSV per scan variant, plus a gnuplot script.
void run_simulate(const ScenarioConfig& cfg, unsigned threads);

/// Locate and classify every equilibrium; writes <prefix>_report.txt and
/// <prefix>_report.json under the output directory.
void run_equilibria_stability(const ScenarioConfig& cfg, const std::string& prefix);

/// Psi grid and certified bifurcation points over the configured alpha scan.
void run_hopf_scan(const ScenarioConfig& cfg);

/// Interior-branch continuation, verdicts and attractor ranges over the
/// configured alpha scan; Hopf candidates appended.
void run_bifurcation(const ScenarioConfig& cfg, unsigned threads);

/// Sweep solve plus a zero-control baseline; returns the convergence flag.
bool run_optimal_control(const ScenarioConfig& cfg);

}  // namespace pestctl
