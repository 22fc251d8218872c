#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bipep/timestep.hpp"
#include "oracles.hpp"

using namespace bipep;
using Catch::Approx;

namespace {

BepState perturbed_state(const GridPtr& g, double amp) {
    BepState s = equilibrium_bep(g);
    s.rho_i += sample_scalar(g, [&](const std::array<double, 3>& x) {
        return amp * std::sin(x[0]);
    });
    s.rho_e += sample_scalar(g, [&](const std::array<double, 3>& x) {
        return amp * std::sin(x[0]);
    });
    s.u_i[0] = sample_scalar(g, [&](const std::array<double, 3>& x) {
        return amp * std::cos(x[0]);
    });
    s.u_e[0] = sample_scalar(g, [&](const std::array<double, 3>& x) {
        return 0.5 * amp * std::cos(x[0]);
    });
    return s;
}

double state_distance(const BepState& a, const BepState& b) {
    double m = 0.0;
    m = std::max(m, max_abs(a.rho_i - b.rho_i));
    m = std::max(m, max_abs(a.rho_e - b.rho_e));
    for (int c = 0; c < a.u_i.dim(); ++c) {
        m = std::max(m, max_abs(a.u_i[c] - b.u_i[c]));
        m = std::max(m, max_abs(a.u_e[c] - b.u_e[c]));
    }
    return m;
}

}  // namespace

TEST_CASE("cfl_dt closed forms", "[timestep]") {
    const StepPolicy pol{0.4, 8.0, 0.05, 0.1};

    const auto g = make_grid(1, 128);
    const PlasmaParams p{0.5, {1.0, 2.0}, {1.0, 2.0}, 2};
    const double dt = cfl_dt(equilibrium_bep(g), p, pol);
    CHECK(dt == Approx(0.4 * (2.0 * std::numbers::pi / 128.0) / std::sqrt(2.0)));

    // isothermal K=1: electron sound speed is 1 and dominates the eps-scaled
    // ion speed
    const PlasmaParams iso{0.5, {1.0, 1.0}, {1.0, 1.0}, 2};
    const double dt_iso = cfl_dt(equilibrium_bep(g), iso, pol);
    CHECK(dt_iso == Approx(0.4 * g->spacing() / 1.0));

    // small eps: ion-only velocity does not control the step
    PlasmaParams tiny{1e-3, {1.0, 2.0}, {1.0, 2.0}, 2};
    BepState s = equilibrium_bep(g);
    s.u_i[0] += 0.2;
    const double dt_e = cfl_dt(s, tiny, pol);
    CHECK(dt_e == Approx(0.4 * g->spacing() / std::sqrt(2.0)));

    // the cap applies on coarse grids
    const auto coarse = make_grid(1, 8);
    StepPolicy lazy{1.0, 8.0, 0.05, 0.1};
    CHECK(cfl_dt(equilibrium_bep(coarse), iso, lazy) == Approx(0.1));
}

TEST_CASE("cfl_dt flags nonfinite speeds", "[timestep]") {
    const auto g = make_grid(1, 16);
    const StepPolicy pol{};
    const PlasmaParams p{0.5, {}, {}, 2};
    BepState s = equilibrium_bep(g);
    s.u_e[0][3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(cfl_dt(s, p, pol), UnstableStateError);
}

TEST_CASE("equilibrium is a bit-stable fixed point of step_rk4", "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {}, {}, 2};
    const BepState eq = equilibrium_bep(g);
    BepState s = eq;
    for (int step = 0; step < 50; ++step) s = step_rk4(s, p, 0.02);
    CHECK(state_distance(s, eq) == 0.0);
}

TEST_CASE("uniform ion velocity decays like exp(-t) to O(dt^5) per step",
          "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {}, {}, 2};
    BepState s = equilibrium_bep(g);
    const double c = 0.3;
    s.u_i[0] += c;
    const double dt = 0.1;
    const BepState out = step_rk4(s, p, dt);
    const double want = c * std::exp(-dt);
    // RK4 truncation of the linear decay: c*(exp(-dt) - poly4(-dt)) ~ dt^5/120
    CHECK(max_abs(out.u_i[0]) - want == Approx(0.0).margin(c * std::pow(dt, 5) / 60.0));
    CHECK(max_abs(out.u_i[0] - sample_scalar(g, [&](const std::array<double, 3>&) {
                      return want;
                  })) < c * std::pow(dt, 5) / 60.0);
}

TEST_CASE("step_rk4 shows fourth-order self-convergence", "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {1.0, 2.0}, {1.0, 2.0}, 2};
    const BepState s0 = perturbed_state(g, 0.08);
    const double T = 0.4;

    const auto advance = [&](int steps) {
        BepState s = s0;
        const double dt = T / steps;
        for (int i = 0; i < steps; ++i) s = step_rk4(s, p, dt);
        return s;
    };
    const BepState a = advance(8);
    const BepState b = advance(16);
    const BepState c = advance(32);
    const double e1 = state_distance(a, b);
    const double e2 = state_distance(b, c);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.8);
    CHECK(order < 4.2);
}

TEST_CASE("step_rk4 raises the density floor error", "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {}, {}, 2};
    BepState s = equilibrium_bep(g);
    s.rho_i += -0.74;  // 0.26, one strong step pushes it below 0.25
    s.rho_e += -0.74;
    s.u_i[0] = sample_scalar(g, [](const std::array<double, 3>& x) {
        return 0.9 * std::sin(x[0]);
    });
    CHECK_THROWS_AS(
        [&] {
            BepState cur = s;
            for (int i = 0; i < 200; ++i) cur = step_rk4(cur, p, 0.05);
        }(),
        DensityFloorError);
}

TEST_CASE("integrate: t_end = 0 gives only the initial sample", "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {}, {}, 2};
    const StepPolicy pol{0.4, 0.0, 0.05, 0.1};
    const BepTrajectory traj = integrate(equilibrium_bep(g), p, pol);
    REQUIRE(traj.samples.size() == 1);
    CHECK(traj.samples[0].t == 0.0);
}

TEST_CASE("integrate: equilibrium stays equilibrium for t_end = 10", "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {}, {}, 2};
    const StepPolicy pol{0.4, 10.0, 0.5, 0.1};
    const BepTrajectory traj = integrate(equilibrium_bep(g), p, pol);
    REQUIRE(traj.samples.size() == 21);
    const BepState eq = equilibrium_bep(g);
    for (const auto& s : traj.samples) {
        CHECK(state_distance(s.state, eq) == 0.0);
        CHECK(max_abs(s.grad_phi) == 0.0);
    }
}

TEST_CASE("integrate: samples land exactly on the sample grid and t_end",
          "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {}, {}, 2};
    const StepPolicy pol{0.4, 1.02, 0.25, 0.1};
    const BepTrajectory traj = integrate(perturbed_state(g, 0.02), p, pol);
    REQUIRE(traj.samples.size() == 6);  // 0, .25, .5, .75, 1.0, 1.02
    CHECK(traj.samples[1].t == 0.25);
    CHECK(traj.samples[4].t == 1.0);
    CHECK(traj.samples[5].t == 1.02);
    for (std::size_t m = 0; m + 1 < traj.samples.size(); ++m)
        CHECK(traj.samples[m].t < traj.samples[m + 1].t);
}

TEST_CASE("integrate: damped perturbation shrinks and matches a finer-dt run",
          "[timestep]") {
    const auto g = make_grid(1, 64);
    const PlasmaParams p{0.5, {1.0, 2.0}, {1.0, 2.0}, 2};
    const BepState s0 = perturbed_state(g, 0.05);
    const StepPolicy pol{0.4, 5.0, 0.25, 0.1};
    const BepTrajectory traj = integrate(s0, p, pol);

    const auto electron_norm = [](const BepState& s) {
        ScalarField ne = s.rho_e;
        ne += -1.0;
        const double a = l2_norm(ne);
        const double b = l2_norm(s.u_e);
        return std::sqrt(a * a + b * b);
    };
    CHECK(electron_norm(traj.samples.back().state) < electron_norm(s0));

    StepPolicy fine = pol;
    fine.cfl_number = 0.1;
    const BepTrajectory ref = integrate(s0, p, fine);
    CHECK(state_distance(traj.samples.back().state, ref.samples.back().state) < 1e-8);
}

TEST_CASE("integrate conserves mass and charge", "[timestep]") {
    const auto g = make_grid(1, 64);
    const PlasmaParams p{0.5, {1.0, 2.0}, {1.0, 2.0}, 2};
    const BepState s0 = perturbed_state(g, 0.05);
    const StepPolicy pol{0.4, 2.0, 0.25, 0.1};
    const BepTrajectory traj = integrate(s0, p, pol);
    const double m_i0 = integral(s0.rho_i);
    const double m_e0 = integral(s0.rho_e);
    for (const auto& s : traj.samples) {
        CHECK(std::abs(integral(s.state.rho_i) - m_i0) <= 1e-12 * std::abs(m_i0));
        CHECK(std::abs(integral(s.state.rho_e) - m_e0) <= 1e-12 * std::abs(m_e0));
        CHECK(std::abs(integral(s.state.rho_i - s.state.rho_e)) <= 1e-12);
    }
}

TEST_CASE("integrate annotates failures with the time", "[timestep]") {
    const auto g = make_grid(1, 32);
    const PlasmaParams p{0.5, {}, {}, 2};
    BepState s = equilibrium_bep(g);
    s.rho_i += -0.74;
    s.rho_e += -0.74;
    s.u_i[0] = sample_scalar(g, [](const std::array<double, 3>& x) {
        return 0.9 * std::sin(x[0]);
    });
    const StepPolicy pol{0.4, 10.0, 0.5, 0.1};
    try {
        integrate(s, p, pol);
        FAIL("expected DensityFloorError");
    } catch (const DensityFloorError& e) {
        CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
}

TEST_CASE("uep integrate mirrors the electron block", "[timestep]") {
    const auto g = make_grid(1, 64);
    const PressureLaw law{1.0, 2.0};
    UepState s = equilibrium_uep(g);
    s.rho_e += sample_scalar(g, [](const std::array<double, 3>& x) {
        return 0.05 * std::sin(x[0]);
    });
    s.u_e[0] = sample_scalar(g, [](const std::array<double, 3>& x) {
        return 0.025 * std::cos(x[0]);
    });
    const StepPolicy pol{0.4, 3.0, 0.25, 0.1};
    const UepTrajectory traj = integrate(s, law, pol);
    REQUIRE(traj.samples.size() == 13);
    // damped: the perturbation norm decays
    ScalarField ne_last = traj.samples.back().state.rho_e;
    ne_last += -1.0;
    ScalarField ne_first = s.rho_e;
    ne_first += -1.0;
    CHECK(l2_norm(ne_last) < l2_norm(ne_first));
    // electron mass pinned to the unit background
    for (const auto& smp : traj.samples)
        CHECK(mean(smp.state.rho_e) == Approx(1.0).margin(1e-14));
}

TEST_CASE("policy validation", "[timestep]") {
    StepPolicy p{};
    p.cfl_number = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = StepPolicy{};
    p.sample_interval = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = StepPolicy{};
    p.t_end = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
