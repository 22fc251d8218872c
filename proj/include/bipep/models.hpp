#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "bipep/errors.hpp"
#include "bipep/field.hpp"
#include "bipep/spectral.hpp"

namespace bipep {

/// Hard floor for particle densities. The near-equilibrium regime keeps
/// densities in [1/2, 3/2]; crossing 0.25 aborts the run instead of clipping.
constexpr double density_floor = 0.25;

/// gamma-law pressure p(rho) = K rho^gamma with the enthalpy normalized so
/// h(1) = 0, and its primitive H with H(1) = 0 (a relative entropy density).
struct PressureLaw {
    double K = 1.0;
    double gamma = 2.0;

    double pressure(double rho) const { return K * std::pow(rho, gamma); }
    double pressure_prime(double rho) const {
        return K * gamma * std::pow(rho, gamma - 1.0);
    }
    /// h with h'(rho) = p'(rho)/rho, h(1) = 0.
    double enthalpy(double rho) const {
        if (gamma == 1.0) return K * std::log(rho);
        return K * gamma * (std::pow(rho, gamma - 1.0) - 1.0) / (gamma - 1.0);
    }
    double enthalpy_prime(double rho) const {
        return K * gamma * std::pow(rho, gamma - 2.0);
    }
    /// H with H'(rho) = h(rho), H(1) = 0; convex, vanishes at equilibrium.
    double enthalpy_primitive(double rho) const {
        if (gamma == 1.0) return K * (rho * std::log(rho) - rho + 1.0);
        return (K * (std::pow(rho, gamma) - 1.0) - K * gamma * (rho - 1.0)) / (gamma - 1.0);
    }

    void validate() const {
        if (!(K > 0.0)) throw ConfigError("pressure coefficient K must be positive");
        if (!(gamma >= 1.0)) throw ConfigError("adiabatic exponent gamma must be >= 1");
    }
};

struct PlasmaParams {
    double epsilon = 1.0;  ///< inverse square root of the ion mass, in (0,1]
    PressureLaw ion_law{};
    PressureLaw electron_law{};
    int sobolev_order = 2;

    void validate(int dim) const {
        if (!(epsilon > 0.0 && epsilon <= 1.0))
            throw ConfigError("epsilon must lie in (0,1]");
        // regularity threshold s > d/2 + 1
        if (2 * sobolev_order <= dim + 2)
            throw ConfigError("sobolev order " + std::to_string(sobolev_order) +
                              " too small for dimension " + std::to_string(dim) +
                              " (need s > d/2 + 1)");
        ion_law.validate();
        electron_law.validate();
    }
};

namespace detail {

inline void require_positive(const ScalarField& rho, const char* who) {
    const double m = min_value(rho);
    if (!(m > 0.0))
        throw DensityFloorError(std::string(who) + ": density must be positive, min = " +
                                std::to_string(m));
}

inline void require_above_floor(const ScalarField& rho, const char* species) {
    const double m = min_value(rho);
    if (!(m >= density_floor))
        throw DensityFloorError(std::string(species) + " density " + std::to_string(m) +
                                " fell below the floor " + std::to_string(density_floor));
}

}  // namespace detail

inline ScalarField enthalpy(const PressureLaw& law, const ScalarField& rho) {
    detail::require_positive(rho, "enthalpy");
    ScalarField out(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = law.enthalpy(rho[i]);
    return out;
}

inline ScalarField enthalpy_prime(const PressureLaw& law, const ScalarField& rho) {
    detail::require_positive(rho, "enthalpy_prime");
    ScalarField out(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = law.enthalpy_prime(rho[i]);
    return out;
}

/// Two-species state: particle densities and velocities; the potential is
/// derived through the Poisson equation, never stored.
struct BepState {
    ScalarField rho_i;
    ScalarField rho_e;
    VectorField u_i;
    VectorField u_e;

    const GridPtr& grid() const { return rho_i.grid(); }

    void add_scaled(const BepState& o, double a) {
        rho_i.add_scaled(o.rho_i, a);
        rho_e.add_scaled(o.rho_e, a);
        u_i.add_scaled(o.u_i, a);
        u_e.add_scaled(o.u_e, a);
    }
};

/// Electron fluid over the fixed unit ion background.
struct UepState {
    ScalarField rho_e;
    VectorField u_e;

    const GridPtr& grid() const { return rho_e.grid(); }

    void add_scaled(const UepState& o, double a) {
        rho_e.add_scaled(o.rho_e, a);
        u_e.add_scaled(o.u_e, a);
    }
};

inline BepState equilibrium_bep(const GridPtr& grid) {
    BepState s{ScalarField(grid), ScalarField(grid), VectorField(grid), VectorField(grid)};
    s.rho_i += 1.0;
    s.rho_e += 1.0;
    return s;
}

inline UepState equilibrium_uep(const GridPtr& grid) {
    UepState s{ScalarField(grid), VectorField(grid)};
    s.rho_e += 1.0;
    return s;
}

struct ElectricField {
    ScalarField phi;
    VectorField grad_phi;
};

/// phi solves Delta(phi) = rho_i - rho_e with zero mean; E = grad(phi).
/// A violated charge neutrality surfaces as CompatibilityError.
inline ElectricField electric_field(const ScalarField& rho_i, const ScalarField& rho_e) {
    ScalarField phi = solve_poisson_zero_mean(rho_i - rho_e);
    VectorField grad_phi = gradient(phi);
    return {std::move(phi), std::move(grad_phi)};
}

/// Same with the unit background: Delta(phi) = 1 - rho_e.
inline ElectricField uep_electric_field(const ScalarField& rho_e) {
    ScalarField rhs(rho_e.grid());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 1.0 - rho_e[i];
    ScalarField phi = solve_poisson_zero_mean(rhs);
    VectorField grad_phi = gradient(phi);
    return {std::move(phi), std::move(grad_phi)};
}

namespace detail {

/// div(rho u) with the product dealiased.
inline ScalarField mass_flux_divergence(const ScalarField& rho, const VectorField& u) {
    std::vector<ScalarField> flux;
    flux.reserve(static_cast<std::size_t>(u.dim()));
    for (int c = 0; c < u.dim(); ++c)
        flux.push_back(dealias(pointwise_product(rho, u[c])));
    return divergence(VectorField(std::move(flux)));
}

/// (u . grad) u, products dealiased (mask applied once per component; the mask
/// is linear so this equals masking each product).
inline VectorField advection(const VectorField& u) {
    const GridPtr& grid = u.grid();
    const int d = u.dim();
    std::vector<VectorField> partials;
    partials.reserve(static_cast<std::size_t>(d));
    for (int axis = 0; axis < d; ++axis) {
        std::vector<ScalarField> cols;
        cols.reserve(static_cast<std::size_t>(d));
        for (int c = 0; c < d; ++c) cols.push_back(partial_derivative(u[c], axis));
        partials.push_back(VectorField(std::move(cols)));
    }
    VectorField out(grid);
    for (int c = 0; c < d; ++c) {
        ScalarField acc(grid);
        for (int axis = 0; axis < d; ++axis)
            acc += pointwise_product(u[axis], partials[static_cast<std::size_t>(axis)][c]);
        out[c] = dealias(acc);
    }
    return out;
}

}  // namespace detail

/// Semi-discrete right-hand side of the scaled two-species system:
///   drho_nu = -div(rho_nu u_nu)
///   du_i    = -(u_i.grad)u_i - eps^2 grad h_i(rho_i) + eps^2 grad phi - u_i
///   du_e    = -(u_e.grad)u_e -       grad h_e(rho_e) -       grad phi - u_e
/// with Delta phi = rho_i - rho_e.
inline BepState bep_rhs(const BepState& s, const PlasmaParams& p) {
    detail::require_above_floor(s.rho_i, "ion");
    detail::require_above_floor(s.rho_e, "electron");
    const double e2 = p.epsilon * p.epsilon;

    const ElectricField ef = electric_field(s.rho_i, s.rho_e);

    BepState out{ScalarField(s.grid()), ScalarField(s.grid()), VectorField(s.grid()),
                 VectorField(s.grid())};
    out.rho_i = -1.0 * detail::mass_flux_divergence(s.rho_i, s.u_i);
    out.rho_e = -1.0 * detail::mass_flux_divergence(s.rho_e, s.u_e);

    out.u_i = -1.0 * detail::advection(s.u_i);
    out.u_i.add_scaled(gradient(dealias(enthalpy(p.ion_law, s.rho_i))), -e2);
    out.u_i.add_scaled(ef.grad_phi, e2);
    out.u_i.add_scaled(s.u_i, -1.0);

    out.u_e = -1.0 * detail::advection(s.u_e);
    out.u_e.add_scaled(gradient(dealias(enthalpy(p.electron_law, s.rho_e))), -1.0);
    out.u_e.add_scaled(ef.grad_phi, -1.0);
    out.u_e.add_scaled(s.u_e, -1.0);
    return out;
}

/// Electron-only limit system over the unit ion background:
///   drho_e = -div(rho_e u_e)
///   du_e   = -(u_e.grad)u_e - grad h_e(rho_e) - grad phi - u_e
/// with Delta phi = 1 - rho_e.
inline UepState uep_rhs(const UepState& s, const PressureLaw& electron_law) {
    detail::require_above_floor(s.rho_e, "electron");
    const ElectricField ef = uep_electric_field(s.rho_e);

    UepState out{ScalarField(s.grid()), VectorField(s.grid())};
    out.rho_e = -1.0 * detail::mass_flux_divergence(s.rho_e, s.u_e);
    out.u_e = -1.0 * detail::advection(s.u_e);
    out.u_e.add_scaled(gradient(dealias(enthalpy(electron_law, s.rho_e))), -1.0);
    out.u_e.add_scaled(ef.grad_phi, -1.0);
    out.u_e.add_scaled(s.u_e, -1.0);
    return out;
}

}  // namespace bipep
