#include "doctest.h"
#include "oracles.hpp"

#include "pestctl/integrate.hpp"

using namespace pestctl;

namespace {

TimeGrid make_grid(double tf, double h) {
    return TimeGrid{0.0, tf, static_cast<std::size_t>(std::llround(tf / h))};
}

}  // namespace

TEST_CASE("long reference run stays nonnegative and inside the bound region") {
    const ModelParams p = oracle::table1();
    const Trajectory traj = integrate_forward(p, State{0.2, 0.07, 0.05, 0.5}, make_grid(600.0, 0.05));
    REQUIRE(traj.values.size() == 12001);
    for (const Vec4& v : traj.values) {
        CHECK(v.minCoeff() >= 0.0);  // clamp keeps roundoff out
    }
    const BoundsCertificate cert = bounds_certificate(p, traj);
    CHECK(cert.satisfied);
    CHECK_FALSE(cert.tail_only);
}

TEST_CASE("fixed point stays fixed") {
    const ModelParams p = oracle::table1();
    const State e1{p.K, 0.0, 0.0, p.omega / p.eta};
    const Trajectory traj = integrate_forward(p, e1, make_grid(50.0, 0.05));
    for (const Vec4& v : traj.values) {
        CHECK((v - e1.vec()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("observed convergence order is four") {
    ModelParams p = oracle::table1();
    p.alpha = 0.12;  // livelier transient than the table default
    const State s0{0.2, 0.07, 0.05, 0.5};
    const double tf = 48.0;
    const Vec4 ref = integrate_forward(p, s0, make_grid(tf, 0.1)).values.back();
    const Vec4 coarse = integrate_forward(p, s0, make_grid(tf, 0.8)).values.back();
    const Vec4 fine = integrate_forward(p, s0, make_grid(tf, 0.4)).values.back();
    const double e1 = (coarse - ref).cwiseAbs().maxCoeff();
    const double e2 = (fine - ref).cwiseAbs().maxCoeff();
    const double order = std::log2(e1 / e2);
    CHECK(order >= 3.7);
    CHECK(order <= 4.3);
}

TEST_CASE("forward trajectories from nonnegative data stay nonnegative") {
    std::mt19937 rng(17);
    for (int k = 0; k < 20; ++k) {
        const ModelParams p = oracle::random_params(rng);
        const State s0 = oracle::random_interior_state(rng, p);
        const Trajectory traj = integrate_forward(p, s0, make_grid(120.0, 0.05));
        for (const Vec4& v : traj.values) CHECK(v.minCoeff() >= 0.0);
    }
}

TEST_CASE("huge steps blow up into a reported instability") {
    ModelParams p = oracle::table1();
    const State s0{0.9, 0.5, 0.2, 0.5};
    // One astronomic step overflows inside the RK4 stages.
    CHECK_THROWS_AS(integrate_forward(p, s0, TimeGrid{0.0, 1e160, 1}), StepUnstable);
    // A big finite step only undershoots zero, which the positivity monitor owns.
    CHECK_THROWS_AS(integrate_forward(p, s0, TimeGrid{0.0, 1e9, 2}), PositivityViolated);
}

TEST_CASE("bounds certificate carries the closed-form constants") {
    const ModelParams p = oracle::table1();
    Trajectory constant;
    constant.grid = make_grid(10.0, 1.0);
    constant.values.assign(11, Vec4(1.0, 0.0, 0.0, 0.2));
    const BoundsCertificate cert = bounds_certificate(p, constant);
    CHECK(cert.L == doctest::Approx(0.018).epsilon(1e-12));
    CHECK(cert.bound_XSI == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(cert.bound_A == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cert.sup_XSI == doctest::Approx(1.0));
    CHECK(cert.sup_A == doctest::Approx(0.2));
    CHECK(cert.satisfied);
}

TEST_CASE("initial transient exemption checks only the tail half") {
    const ModelParams p = oracle::table1();
    Trajectory traj;
    traj.grid = make_grid(10.0, 1.0);
    traj.values.assign(11, Vec4(1.0, 0.0, 0.0, 0.2));
    traj.values[0] = Vec4(5.0, 0.0, 0.0, 0.2);  // violates bound_XSI = 1.8 at t=0
    const BoundsCertificate cert = bounds_certificate(p, traj);
    CHECK(cert.tail_only);
    CHECK(cert.satisfied);
}

TEST_CASE("adjoint terminal condition and homogeneous case") {
    const ModelParams p = oracle::table1();
    const TimeGrid grid = make_grid(20.0, 0.05);
    const auto u = ControlSchedule::constant(grid, ControlTriple{});
    const Trajectory state = integrate_forward(p, State{0.2, 0.07, 0.05, 0.5}, grid, &u);

    ObjectiveWeights w;
    w.Q = 0.0;
    w.R = 0.0;
    const Trajectory adj = integrate_adjoint_backward(p, state, u, w, grid);
    CHECK(adj.values.back().cwiseAbs().maxCoeff() == 0.0);
    for (const Vec4& v : adj.values) CHECK(v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adjoint rhs equals minus the Hamiltonian state gradient") {
    std::mt19937 rng(23);
    ObjectiveWeights w;
    for (int k = 0; k < 100; ++k) {
        const ModelParams p = oracle::random_params(rng);
        const State s = oracle::random_interior_state(rng, p);
        std::uniform_real_distribution<double> Ul(-2.0, 2.0), Uu(0.0, 1.0);
        const Vec4 lam(Ul(rng), Ul(rng), Ul(rng), Ul(rng));
        const ControlTriple u{Uu(rng), Uu(rng), Uu(rng)};
        const Vec4 got = adjoint_rhs(p, w, s, lam, u);
        const Vec4 want = -oracle::fd_hamiltonian_state_grad(p, w, s, u, lam);
        const double scale = want.cwiseAbs().maxCoeff();
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + scale));
    }
}

TEST_CASE("grid mismatch is rejected") {
    const ModelParams p = oracle::table1();
    const TimeGrid g1 = make_grid(10.0, 0.1);
    const TimeGrid g2 = make_grid(10.0, 0.05);
    const Trajectory state = integrate_forward(p, State{0.2, 0.07, 0.05, 0.5}, g1);
    const ObjectiveWeights w;
    const auto u = ControlSchedule::constant(g2, ControlTriple{});
    CHECK_THROWS_AS(integrate_adjoint_backward(p, state, u, w, g2), GridMismatch);
}
