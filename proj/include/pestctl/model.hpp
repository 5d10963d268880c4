#pragma once

#include "pestctl/types.hpp"

namespace pestctl {

/// Time derivative (dX, dS, dI, dA) of the uncontrolled system at state s.
/// Pure; throws NumericDomainError if the result is not finite.
Vec4 rhs(const ModelParams& p, const State& s);

/// Time derivative of the controlled system. With u = (1,1,1) this coincides
/// with rhs(p, s) exactly.
Vec4 rhs_controlled(const ModelParams& p, const State& s, const ControlTriple& u);

/// Analytic Jacobian of rhs at s.
/// Requires a + X > 0 and 1 + A > 0 (always true for valid inputs).
Mat4 jacobian(const ModelParams& p, const State& s);

}  // namespace pestctl
