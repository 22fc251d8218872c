#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "bipep/errors.hpp"
#include "bipep/models.hpp"
#include "bipep/spectral.hpp"
#include "bipep/timestep.hpp"

namespace bipep {

/// The two scalar energies of the near-equilibrium theory. With N_nu =
/// rho_nu - 1:
///   total       = sum_nu ||N_nu||_s^2 + eps^-2 ||N_i||_{s-1}^2
///                 + eps^-2 ||u_i||_s^2 + ||u_e||_s^2 + ||grad phi||_s^2
///   dissipative = sum_nu ||grad N_nu||_{s-1}^2 + eps^-2 ||u_i||_s^2
///                 + ||u_e||_s^2
struct EnergyPair {
    double total = 0.0;
    double dissipative = 0.0;
};

inline EnergyPair energy_functionals(const BepState& s, const PlasmaParams& p,
                                     const VectorField& grad_phi) {
    const int so = p.sobolev_order;
    const double inv_e2 = 1.0 / (p.epsilon * p.epsilon);

    ScalarField n_i = s.rho_i;
    n_i += -1.0;
    ScalarField n_e = s.rho_e;
    n_e += -1.0;

    const double ni_s = sobolev_norm(n_i, so);
    const double ne_s = sobolev_norm(n_e, so);
    const double ni_sm1 = sobolev_norm(n_i, so - 1);
    const double ui_s = sobolev_norm(s.u_i, so);
    const double ue_s = sobolev_norm(s.u_e, so);
    const double gphi_s = sobolev_norm(grad_phi, so);
    const double gni_sm1 = sobolev_norm(gradient(n_i), so - 1);
    const double gne_sm1 = sobolev_norm(gradient(n_e), so - 1);

    EnergyPair out;
    out.total = ni_s * ni_s + ne_s * ne_s + inv_e2 * ni_sm1 * ni_sm1 +
                inv_e2 * ui_s * ui_s + ue_s * ue_s + gphi_s * gphi_s;
    out.dissipative = gni_sm1 * gni_sm1 + gne_sm1 * gne_sm1 + inv_e2 * ui_s * ui_s +
                      ue_s * ue_s;
    return out;
}

inline EnergyPair energy_functionals(const BepState& s, const PlasmaParams& p) {
    return energy_functionals(s, p, electric_field(s.rho_i, s.rho_e).grad_phi);
}

/// Entropy energy and entropy dissipation of the exact balance law:
///   energy      = int eta0 + 1/2 |grad phi|^2,
///     eta0 = 1/2 rho_e |u_e|^2 + H_e(rho_e)
///          + 1/(2 eps^2) rho_i |u_i|^2 + H_i(rho_i)
///   dissipation = int rho_e |u_e|^2 + eps^-2 rho_i |u_i|^2
/// The entropy flux integrates to zero over the torus and never appears.
struct EntropyPair {
    double energy = 0.0;
    double dissipation = 0.0;
};

inline EntropyPair entropy_pair(const BepState& s, const PlasmaParams& p,
                                const VectorField& grad_phi) {
    const double inv_e2 = 1.0 / (p.epsilon * p.epsilon);
    ScalarField energy_density(s.grid());
    ScalarField dissipation_density(s.grid());
    for (std::size_t i = 0; i < s.rho_i.size(); ++i) {
        double ue2 = 0.0, ui2 = 0.0, gp2 = 0.0;
        for (int c = 0; c < s.u_e.dim(); ++c) {
            ue2 += s.u_e[c][i] * s.u_e[c][i];
            ui2 += s.u_i[c][i] * s.u_i[c][i];
            gp2 += grad_phi[c][i] * grad_phi[c][i];
        }
        const double kinetic_e = 0.5 * s.rho_e[i] * ue2;
        const double kinetic_i = 0.5 * inv_e2 * s.rho_i[i] * ui2;
        energy_density[i] = kinetic_e + p.electron_law.enthalpy_primitive(s.rho_e[i]) +
                            kinetic_i + p.ion_law.enthalpy_primitive(s.rho_i[i]) +
                            0.5 * gp2;
        dissipation_density[i] = s.rho_e[i] * ue2 + inv_e2 * s.rho_i[i] * ui2;
    }
    return {integral(energy_density), integral(dissipation_density)};
}

inline EntropyPair entropy_pair(const BepState& s, const PlasmaParams& p) {
    return entropy_pair(s, p, electric_field(s.rho_i, s.rho_e).grad_phi);
}

/// Everything scalar worth recording about one state.
struct EnergyReport {
    double E_total = 0.0;
    double D_dissip = 0.0;
    double entropy_E = 0.0;
    double entropy_D = 0.0;
    double mass_i = 0.0;
    double mass_e = 0.0;
    double charge = 0.0;
};

inline EnergyReport energy_report(const BepState& s, const PlasmaParams& p,
                                  const VectorField& grad_phi) {
    const EnergyPair e = energy_functionals(s, p, grad_phi);
    const EntropyPair h = entropy_pair(s, p, grad_phi);
    EnergyReport out;
    out.E_total = e.total;
    out.D_dissip = e.dissipative;
    out.entropy_E = h.energy;
    out.entropy_D = h.dissipation;
    out.mass_i = integral(s.rho_i);
    out.mass_e = integral(s.rho_e);
    out.charge = integral(s.rho_i - s.rho_e);
    return out;
}

/// Discrete defect of the balance law d/dt entropy_E = -entropy_D on a
/// uniformly sampled trajectory, trapezoidal in time:
///   r_m = [entropy_E(t_{m+1}) - entropy_E(t_m)] / dt
///         + [entropy_D(t_m) + entropy_D(t_{m+1})] / 2
/// Second order in the sample interval.
inline std::vector<double> entropy_balance_residual(const BepTrajectory& traj,
                                                    const PlasmaParams& p) {
    traj.require_uniform("entropy_balance_residual");
    std::vector<EntropyPair> pairs;
    pairs.reserve(traj.samples.size());
    for (const auto& smp : traj.samples)
        pairs.push_back(entropy_pair(smp.state, p, smp.grad_phi));

    const double dt = traj.sample_interval;
    std::vector<double> out;
    out.reserve(pairs.size() - 1);
    for (std::size_t m = 0; m + 1 < pairs.size(); ++m)
        out.push_back((pairs[m + 1].energy - pairs[m].energy) / dt +
                      0.5 * (pairs[m].dissipation + pairs[m + 1].dissipation));
    return out;
}

/// Symmetrizer-weighted energy of exact derivative order r:
///   sum_nu sum_{|alpha|=r} <d^alpha U_nu, A0_nu d^alpha U_nu>,
/// U_nu = (N_nu, u_nu), A0_i = diag(h_i'(rho_i), eps^-2 rho_i I),
/// A0_e = diag(h_e'(rho_e), rho_e I).
inline double weighted_energy_A0(const BepState& s, const PlasmaParams& p,
                                 int alpha_order) {
    if (alpha_order < 0 || alpha_order > p.sobolev_order)
        throw ConfigError("weighted_energy_A0: order must lie in [0, s]");
    const int d = s.grid()->dim();
    const double inv_e2 = 1.0 / (p.epsilon * p.epsilon);

    std::vector<std::array<int, 3>> alphas;
    std::array<int, 3> a{0, 0, 0};
    const std::function<void(int, int)> rec = [&](int axis, int left) {
        if (axis == d) {
            if (left == 0) alphas.push_back(a);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            a[static_cast<std::size_t>(axis)] = v;
            rec(axis + 1, left - v);
        }
        a[static_cast<std::size_t>(axis)] = 0;
    };
    rec(0, alpha_order);

    ScalarField n_i = s.rho_i;
    n_i += -1.0;
    ScalarField n_e = s.rho_e;
    n_e += -1.0;

    const ScalarField hpi = enthalpy_prime(p.ion_law, s.rho_i);
    const ScalarField hpe = enthalpy_prime(p.electron_law, s.rho_e);

    double total = 0.0;
    for (const auto& alpha : alphas) {
        const ScalarField dni = derivative_multi(n_i, alpha);
        const ScalarField dne = derivative_multi(n_e, alpha);
        ScalarField quad(s.grid());
        for (std::size_t i = 0; i < quad.size(); ++i)
            quad[i] = hpi[i] * dni[i] * dni[i] + hpe[i] * dne[i] * dne[i];
        for (int c = 0; c < d; ++c) {
            const ScalarField dui = derivative_multi(s.u_i[c], alpha);
            const ScalarField due = derivative_multi(s.u_e[c], alpha);
            for (std::size_t i = 0; i < quad.size(); ++i)
                quad[i] += inv_e2 * s.rho_i[i] * dui[i] * dui[i] +
                           s.rho_e[i] * due[i] * due[i];
        }
        total += integral(quad);
    }
    return total;
}

}  // namespace bipep
