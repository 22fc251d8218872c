#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bipep/errors.hpp"
#include "bipep/models.hpp"

namespace bipep {

struct StepPolicy {
    double cfl_number = 0.4;
    double t_end = 8.0;
    double sample_interval = 0.05;
    double dt_max = 0.1;  ///< keeps the unit damping timescale resolved

    void validate() const {
        if (!(cfl_number > 0.0 && cfl_number <= 1.0))
            throw ConfigError("cfl_number must lie in (0,1]");
        if (!(sample_interval > 0.0)) throw ConfigError("sample_interval must be positive");
        if (t_end < 0.0) throw ConfigError("t_end must be nonnegative");
        if (!(dt_max > 0.0)) throw ConfigError("dt_max must be positive");
    }
};

namespace detail {

inline double node_speed(const VectorField& u, std::size_t i) {
    double s = 0.0;
    for (int c = 0; c < u.dim(); ++c) s += u[c][i] * u[c][i];
    return std::sqrt(s);
}

inline double checked_dt(double lambda_max, double dx, const StepPolicy& pol) {
    if (!std::isfinite(lambda_max))
        throw UnstableStateError("nonfinite wave speed; the state has blown up");
    return std::min(pol.dt_max, pol.cfl_number * dx / lambda_max);
}

}  // namespace detail

/// CFL step: dt = cfl * dx / max_nodes(|u_e| + sqrt(p_e'(rho_e)),
/// |u_i| + eps*sqrt(p_i'(rho_i))), capped at dt_max. The ion acoustic speed
/// carries the eps factor of the scaled system.
inline double cfl_dt(const BepState& s, const PlasmaParams& p, const StepPolicy& pol) {
    double lam = 0.0;
    for (std::size_t i = 0; i < s.rho_i.size(); ++i) {
        const double le =
            detail::node_speed(s.u_e, i) + std::sqrt(p.electron_law.pressure_prime(s.rho_e[i]));
        const double li = detail::node_speed(s.u_i, i) +
                          p.epsilon * std::sqrt(p.ion_law.pressure_prime(s.rho_i[i]));
        if (!std::isfinite(le) || !std::isfinite(li))
            throw UnstableStateError("nonfinite wave speed; the state has blown up");
        lam = std::max(lam, std::max(le, li));
    }
    return detail::checked_dt(lam, s.grid()->spacing(), pol);
}

inline double cfl_dt(const UepState& s, const PressureLaw& electron_law,
                     const StepPolicy& pol) {
    double lam = 0.0;
    for (std::size_t i = 0; i < s.rho_e.size(); ++i) {
        const double le = detail::node_speed(s.u_e, i) +
                          std::sqrt(electron_law.pressure_prime(s.rho_e[i]));
        if (!std::isfinite(le))
            throw UnstableStateError("nonfinite wave speed; the state has blown up");
        lam = std::max(lam, le);
    }
    return detail::checked_dt(lam, s.grid()->spacing(), pol);
}

namespace detail {

template <class State, class Rhs>
State rk4(const State& y, Rhs&& f, double dt) {
    const State k1 = f(y);
    State y2 = y;
    y2.add_scaled(k1, 0.5 * dt);
    const State k2 = f(y2);
    State y3 = y;
    y3.add_scaled(k2, 0.5 * dt);
    const State k3 = f(y3);
    State y4 = y;
    y4.add_scaled(k3, dt);
    const State k4 = f(y4);
    State out = y;
    out.add_scaled(k1, dt / 6.0);
    out.add_scaled(k2, dt / 3.0);
    out.add_scaled(k3, dt / 3.0);
    out.add_scaled(k4, dt / 6.0);
    return out;
}

}  // namespace detail

/// One classical RK4 step of the two-species system. Charge neutrality is
/// re-asserted afterwards: the mean of rho_i - rho_e (machine-epsilon sized by
/// construction) is split off the two densities.
inline BepState step_rk4(const BepState& s, const PlasmaParams& p, double dt) {
    BepState out = detail::rk4(s, [&](const BepState& y) { return bep_rhs(y, p); }, dt);
    // The drift is measured on the difference field so its own rounding noise
    // scales with the charge separation, not with the unit background.
    const double drift = mean(out.rho_i - out.rho_e);
    out.rho_i += -0.5 * drift;
    out.rho_e += 0.5 * drift;
    detail::require_above_floor(out.rho_i, "ion");
    detail::require_above_floor(out.rho_e, "electron");
    return out;
}

/// One RK4 step of the electron-only system; the unit-background mean of
/// rho_e is re-asserted the same way.
inline UepState step_rk4(const UepState& s, const PressureLaw& electron_law, double dt) {
    UepState out =
        detail::rk4(s, [&](const UepState& y) { return uep_rhs(y, electron_law); }, dt);
    ScalarField excess = out.rho_e;
    excess += -1.0;
    out.rho_e += -mean(excess);
    detail::require_above_floor(out.rho_e, "electron");
    return out;
}

struct BepSample {
    double t;
    BepState state;
    ScalarField phi;
    VectorField grad_phi;
};

struct UepSample {
    double t;
    UepState state;
    ScalarField phi;
    VectorField grad_phi;
};

template <class Sample>
struct Trajectory {
    std::vector<Sample> samples;
    double sample_interval = 0.0;

    /// Throws unless the sample times are the uniform grid they claim to be.
    void require_uniform(const char* who) const {
        if (samples.size() < 2)
            throw InsufficientDataError(std::string(who) + ": need at least two samples");
        for (std::size_t m = 0; m + 1 < samples.size(); ++m) {
            const double dt = samples[m + 1].t - samples[m].t;
            if (std::abs(dt - sample_interval) > 1e-9 * std::max(1.0, samples[m + 1].t))
                throw ConfigError(std::string(who) + ": sample spacing is not uniform");
        }
    }
};

using BepTrajectory = Trajectory<BepSample>;
using UepTrajectory = Trajectory<UepSample>;

namespace detail {

template <class State, class Stepper, class DtFn, class MakeSample, class Sample>
void integrate_generic(State state, const StepPolicy& policy, Stepper&& step, DtFn&& stable_dt,
                       MakeSample&& make_sample, Trajectory<Sample>& traj) {
    policy.validate();
    traj.sample_interval = policy.sample_interval;
    traj.samples.push_back(make_sample(0.0, state));

    const double interval = policy.sample_interval;
    const long full = std::lround(std::floor(policy.t_end / interval + 1e-9));
    double t = 0.0;

    const auto advance_to = [&](double target) {
        while (true) {
            double dt = 0.0;
            try {
                dt = stable_dt(state);
                const double remaining = target - t;
                if (remaining <= dt * (1.0 + 1e-9)) {
                    state = step(state, remaining);
                    t = target;
                    return;
                }
                state = step(state, dt);
                t += dt;
            } catch (const DensityFloorError& e) {
                throw DensityFloorError("t=" + std::to_string(t) + ": " + e.what());
            } catch (const CompatibilityError& e) {
                throw CompatibilityError("t=" + std::to_string(t) + ": " + e.what());
            } catch (const UnstableStateError& e) {
                throw UnstableStateError("t=" + std::to_string(t) + ": " + e.what());
            }
        }
    };

    for (long m = 1; m <= full; ++m) {
        const double target = interval * static_cast<double>(m);
        advance_to(target);
        traj.samples.push_back(make_sample(target, state));
    }
    if (policy.t_end > interval * static_cast<double>(full) + 1e-9) {
        advance_to(policy.t_end);
        traj.samples.push_back(make_sample(policy.t_end, state));
    }
}

}  // namespace detail

/// Advance to t_end with the CFL step recomputed every step; steps are
/// truncated to land exactly on the sample times and on t_end.
inline BepTrajectory integrate(const BepState& initial, const PlasmaParams& params,
                               const StepPolicy& policy) {
    params.validate(initial.grid()->dim());
    BepTrajectory traj;
    detail::integrate_generic(
        initial, policy, [&](const BepState& s, double dt) { return step_rk4(s, params, dt); },
        [&](const BepState& s) { return cfl_dt(s, params, policy); },
        [&](double t, const BepState& s) {
            ElectricField ef = electric_field(s.rho_i, s.rho_e);
            return BepSample{t, s, std::move(ef.phi), std::move(ef.grad_phi)};
        },
        traj);
    return traj;
}

inline UepTrajectory integrate(const UepState& initial, const PressureLaw& electron_law,
                               const StepPolicy& policy) {
    UepTrajectory traj;
    detail::integrate_generic(
        initial, policy,
        [&](const UepState& s, double dt) { return step_rk4(s, electron_law, dt); },
        [&](const UepState& s) { return cfl_dt(s, electron_law, policy); },
        [&](double t, const UepState& s) {
            ElectricField ef = uep_electric_field(s.rho_e);
            return UepSample{t, s, std::move(ef.phi), std::move(ef.grad_phi)};
        },
        traj);
    return traj;
}

}  // namespace bipep
