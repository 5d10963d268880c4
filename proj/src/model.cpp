#include "pestctl/model.hpp"

namespace pestctl {

void ModelParams::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"r", r},         {"K", K},         {"alpha", alpha}, {"phi", phi},
        {"a", a},         {"m1", m1},       {"m2", m2},       {"lambda", lambda},
        {"d", d},         {"delta", delta}, {"gamma", gamma}, {"sigma", sigma},
        {"eta", eta},     {"omega", omega},
    };
    for (const auto& [name, value] : fields) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument(std::string("parameter ") + name +
                                        " must be strictly positive and finite");
        }
    }
    if (!(m1 > m2)) {
        throw std::invalid_argument("m1 must exceed m2 (infected pests convert less efficiently)");
    }
    if (!(phi < 1.0)) {
        throw std::invalid_argument("phi must be below 1 (infected pests attack at a reduced rate)");
    }
}

Vec4 rhs(const ModelParams& p, const State& s) {
    return rhs_controlled(p, s, ControlTriple{1.0, 1.0, 1.0});
}

Vec4 rhs_controlled(const ModelParams& p, const State& s, const ControlTriple& u) {
    const double X = s.X, S = s.S, I = s.I, A = s.A;
    const double holling = p.phi * p.alpha * X / (p.a + X);
    const double sat = A / (1.0 + A);

    Vec4 f;
    f[0] = p.r * X * (1.0 - X / p.K) - p.alpha * X * S - holling * I;
    f[1] = p.m1 * p.alpha * X * S - u.u2 * p.lambda * A * S - p.d * S - u.u1 * p.gamma * S * sat;
    f[2] = p.m2 * holling * I + u.u2 * p.lambda * A * S - (p.d + p.delta) * I -
           u.u1 * p.gamma * I * sat;
    f[3] = u.u3 * p.omega + p.sigma * (S + I) - p.eta * A;

    if (!finite(f)) {
        throw NumericDomainError("rhs produced a non-finite derivative");
    }
    return f;
}

Mat4 jacobian(const ModelParams& p, const State& s) {
    const double X = s.X, S = s.S, I = s.I, A = s.A;
    const double aX = p.a + X;
    const double oneA = 1.0 + A;
    if (aX == 0.0 || oneA == 0.0) {
        throw NumericDomainError("jacobian singular: a + X or 1 + A vanishes");
    }
    const double aX2 = aX * aX;
    const double oneA2 = oneA * oneA;
    const double sat = A / oneA;

    Mat4 J = Mat4::Zero();
    J(0, 0) = p.r * (1.0 - 2.0 * X / p.K) - p.alpha * S - p.phi * p.alpha * p.a * I / aX2;
    J(0, 1) = -p.alpha * X;
    J(0, 2) = -p.phi * p.alpha * X / aX;

    J(1, 0) = p.m1 * p.alpha * S;
    J(1, 1) = p.m1 * p.alpha * X - p.lambda * A - p.d - p.gamma * sat;
    J(1, 3) = -p.lambda * S - p.gamma * S / oneA2;

    J(2, 0) = p.m2 * p.phi * p.alpha * p.a * I / aX2;
    J(2, 1) = p.lambda * A;
    J(2, 2) = p.m2 * p.phi * p.alpha * X / aX - p.d - p.delta - p.gamma * sat;
    // dI'/dA: the bio-infection term contributes +lambda*S, the chemical
    // saturation term -gamma*I/(1+A)^2.
    J(2, 3) = p.lambda * S - p.gamma * I / oneA2;

    J(3, 1) = p.sigma;
    J(3, 2) = p.sigma;
    J(3, 3) = -p.eta;

    if (!J.allFinite()) {
        throw NumericDomainError("jacobian produced non-finite entries");
    }
    return J;
}

}  // namespace pestctl
