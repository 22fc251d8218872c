#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "bipep/errors.hpp"
#include "bipep/models.hpp"
#include "bipep/spectral.hpp"
#include "bipep/timestep.hpp"

namespace bipep {

/// Shapes of a well-prepared initial family. The ion perturbations enter the
/// two-species data at size eps^2 so no initial layer forms; the electron data
/// coincide with the limit-system data exactly.
struct WellPreparedFamily {
    ScalarField a_e;   ///< electron density shape, zero mean
    VectorField v_e;   ///< electron velocity shape
    ScalarField a_i;   ///< ion density shape, zero mean
    VectorField b_i;   ///< ion velocity shape
    double delta0 = 0.05;

    void validate() const {
        if (!(delta0 >= 0.0 && delta0 <= 0.1))
            throw ConfigError("family amplitude delta0 must lie in [0, 0.1]");
        const auto zero_mean = [](const ScalarField& f, const char* name) {
            if (std::abs(mean(f)) > 1e-12 * std::max(1e-30, l2_norm(f)))
                throw CompatibilityError(std::string("family shape ") + name +
                                         " must have zero mean");
        };
        zero_mean(a_e, "a_e");
        zero_mean(a_i, "a_i");
        const auto band_limited = [](const ScalarField& f, const char* name) {
            if (l2_norm(dealias(f) - f) > 1e-12 * std::max(1e-30, l2_norm(f)))
                throw ConfigError(std::string("family shape ") + name +
                                  " carries modes above the dealias cutoff");
        };
        band_limited(a_e, "a_e");
        band_limited(a_i, "a_i");
        for (int c = 0; c < v_e.dim(); ++c) {
            band_limited(v_e[c], "v_e");
            band_limited(b_i[c], "b_i");
        }
    }
};

/// The stock desk-scale family: a_e = sin x1, v_e = 0.5 cos x1 e1,
/// a_i = sin x1, b_i = cos x1 e1 (any dimension, shapes depend on x1 only).
inline WellPreparedFamily default_family(const GridPtr& grid, double delta0 = 0.05) {
    WellPreparedFamily fam{ScalarField(grid), VectorField(grid), ScalarField(grid),
                           VectorField(grid), delta0};
    fam.a_e = sample_scalar(grid, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    fam.a_i = fam.a_e;
    fam.v_e[0] = sample_scalar(grid, [](const std::array<double, 3>& x) {
        return 0.5 * std::cos(x[0]);
    });
    fam.b_i[0] = sample_scalar(grid, [](const std::array<double, 3>& x) {
        return std::cos(x[0]);
    });
    return fam;
}

/// Limiting ion velocity and first-order ion density profile.
struct ProfileState {
    VectorField u_bar_i;
    ScalarField rho_bar_i1;
};

struct WellPreparedData {
    BepState bep;
    UepState uep;
    ProfileState profile;
    /// max(||a_i||_{s-1}, ||b_i||_s): the constant making the prepared data
    /// eps-small in the scaled sense.
    double c2 = 0.0;
};

/// Builds the two-species data, the limit-system data and the initial
/// profiles from one family:
///   rho_i0 = 1 + eps^2 a_i,  u_i0 = eps^2 b_i,
///   rho_e0 = 1 + delta0 a_e, u_e0 = delta0 v_e   (same for the limit system),
///   u_bar_i0 = b_i,          rho_bar_i1_0 = a_i.
inline WellPreparedData well_prepared_data(const WellPreparedFamily& fam, double eps,
                                           int sobolev_order) {
    fam.validate();
    const GridPtr& grid = fam.a_e.grid();
    const double e2 = eps * eps;

    WellPreparedData out{equilibrium_bep(grid), equilibrium_uep(grid),
                         ProfileState{fam.b_i, fam.a_i}, 0.0};
    out.bep.rho_i.add_scaled(fam.a_i, e2);
    out.bep.u_i.add_scaled(fam.b_i, e2);
    out.bep.rho_e.add_scaled(fam.a_e, fam.delta0);
    out.bep.u_e.add_scaled(fam.v_e, fam.delta0);
    out.uep.rho_e = out.bep.rho_e;
    out.uep.u_e = out.bep.u_e;

    // Prepared-data checks: the electron data of the two systems coincide,
    // the scaled ion smallness holds with c2, and the charge mean is zero.
    const double ai_norm = sobolev_norm(fam.a_i, sobolev_order - 1);
    const double bi_norm = sobolev_norm(fam.b_i, sobolev_order);
    out.c2 = std::max(ai_norm, bi_norm);
    if (l2_norm(out.bep.rho_e - out.uep.rho_e) != 0.0)
        throw CompatibilityError("prepared electron data of the two systems differ");
    if (eps * ai_norm > out.c2 * eps * (1.0 + 1e-12) ||
        eps * bi_norm > out.c2 * eps * (1.0 + 1e-12))
        throw CompatibilityError("prepared ion data exceed the eps-smallness budget");
    const double charge = integral(out.bep.rho_i - out.bep.rho_e);
    if (std::abs(charge) > 1e-12 * grid->volume())
        throw CompatibilityError("prepared data break charge neutrality");
    return out;
}

namespace detail {

/// One-step weights of the exponential-trapezoidal rule for
/// y' = -lambda y + f: y+ = a y + c0 f(t) + c1 f(t+dt), exact for constant f,
/// O(dt^2) globally for smooth f.
struct EtdWeights {
    double a, c0, c1;
};

inline EtdWeights etd_weights(double lambda, double dt) {
    const double a = std::exp(-lambda * dt);
    const double phi = (1.0 - a) / lambda;                       // int e^{-lambda(dt-s)} ds
    const double c1 = (dt * phi - (1.0 - a * (1.0 + lambda * dt)) / (lambda * lambda)) / dt;
    return {a, phi - c1, c1};
}

}  // namespace detail

/// Integrates du/dt + u = g along a uniformly sampled forcing series g(t_m)
/// (the sampled electric field of the limit system); exact integrating factor,
/// forcing interpolated linearly within each step. Returns the series at the
/// same sample times.
inline std::vector<VectorField> solve_ubar_i(const std::vector<VectorField>& forcing,
                                             const VectorField& u_bar_i0, double dt) {
    if (forcing.empty()) throw InsufficientDataError("solve_ubar_i: empty forcing series");
    if (!(dt > 0.0)) throw ConfigError("solve_ubar_i: sample spacing must be positive");

    const auto w = detail::etd_weights(1.0, dt);
    std::vector<VectorField> out;
    out.reserve(forcing.size());
    out.push_back(u_bar_i0);
    for (std::size_t m = 0; m + 1 < forcing.size(); ++m) {
        VectorField next = out.back();
        next *= w.a;
        next.add_scaled(forcing[m], w.c0);
        next.add_scaled(forcing[m + 1], w.c1);
        out.push_back(std::move(next));
    }
    return out;
}

/// Integrates d(rho1)/dt + div(u_bar) = Delta(rho1) per Fourier mode with the
/// exact heat factor e^{-|k|^2 dt} and the same exponential-trapezoidal
/// forcing treatment; the k = 0 mode stays exactly zero.
inline std::vector<ScalarField> solve_rho_i1(const std::vector<VectorField>& u_bar_series,
                                             const ScalarField& rho_i1_0, double dt) {
    if (u_bar_series.empty())
        throw InsufficientDataError("solve_rho_i1: empty velocity series");
    if (!(dt > 0.0)) throw ConfigError("solve_rho_i1: sample spacing must be positive");
    if (std::abs(mean(rho_i1_0)) > 1e-12 * std::max(1e-30, l2_norm(rho_i1_0)))
        throw CompatibilityError("solve_rho_i1: initial profile must have zero mean");

    const GridPtr& grid = rho_i1_0.grid();
    auto rho_hat = to_spectral(rho_i1_0);
    rho_hat[0] = 0.0;

    const auto forcing_hat = [&](std::size_t m) {
        return to_spectral(-1.0 * divergence(u_bar_series[m]));
    };

    std::vector<ScalarField> out;
    out.reserve(u_bar_series.size());
    out.push_back(rho_i1_0);
    auto f_prev = forcing_hat(0);
    for (std::size_t m = 0; m + 1 < u_bar_series.size(); ++m) {
        const auto f_next = forcing_hat(m + 1);
        for (std::size_t j = 1; j < rho_hat.size(); ++j) {
            const auto k = grid->wavevector(j);
            double k2 = 0.0;
            for (int axis = 0; axis < grid->dim(); ++axis) {
                const double kj = static_cast<double>(k[static_cast<std::size_t>(axis)]);
                k2 += kj * kj;
            }
            const auto w = detail::etd_weights(k2, dt);
            rho_hat[j] = w.a * rho_hat[j] + w.c0 * f_prev[j] + w.c1 * f_next[j];
        }
        rho_hat[0] = 0.0;
        f_prev = f_next;
        out.push_back(to_nodal(grid, rho_hat));
    }
    return out;
}

/// Differences between the two-species solution and the limit solution, in
/// the scaled variables: N_i = rho_i - 1, N_e = rho_e - rho_bar_e,
/// w_i = eps^-2 u_i - u_bar_i, w_e = u_e - u_bar_e,
/// F = grad(phi) - grad(phi_bar). N_i and N_e carry exactly zero mean
/// (equal-mean densities).
struct ErrorVars {
    ScalarField N_i;
    ScalarField N_e;
    VectorField w_i;
    VectorField w_e;
    VectorField F;
};

namespace detail {

// The density errors have zero mean by construction, but the unit background
// leaves absolute rounding dust (~1e-16) in the computed mean while the
// fields themselves shrink with eps^2. Remove the dust so the invariant holds
// exactly; a mean large enough to be a real inconsistency is kept and will
// surface as a compatibility error downstream.
inline void strip_mean_dust(ScalarField& f) {
    const double m = mean(f);
    if (std::abs(m) <= 1e-10) f += -m;
}

}  // namespace detail

/// Core construction from raw states (runs both Poisson solves).
inline ErrorVars error_vars(const BepState& bep, const UepState& uep,
                            const ProfileState& prof, double eps) {
    if (!bep.grid()->same_shape(*uep.grid()) || !bep.grid()->same_shape(*prof.u_bar_i.grid()))
        throw ShapeError("error_vars: states live on different grids");
    ErrorVars out{ScalarField(bep.grid()), ScalarField(bep.grid()), VectorField(bep.grid()),
                  VectorField(bep.grid()), VectorField(bep.grid())};
    out.N_i = bep.rho_i;
    out.N_i += -1.0;
    out.N_e = bep.rho_e - uep.rho_e;
    detail::strip_mean_dust(out.N_i);
    detail::strip_mean_dust(out.N_e);
    out.w_i = (1.0 / (eps * eps)) * bep.u_i;
    out.w_i -= prof.u_bar_i;
    out.w_e = bep.u_e - uep.u_e;
    out.F = electric_field(bep.rho_i, bep.rho_e).grad_phi;
    out.F -= uep_electric_field(uep.rho_e).grad_phi;
    return out;
}

/// Same, reusing the potentials already attached to trajectory samples.
inline ErrorVars error_vars(const BepSample& bep, const UepSample& uep,
                            const ProfileState& prof, double eps) {
    if (!bep.state.grid()->same_shape(*uep.state.grid()) ||
        !bep.state.grid()->same_shape(*prof.u_bar_i.grid()))
        throw ShapeError("error_vars: states live on different grids");
    ErrorVars out{ScalarField(bep.state.grid()), ScalarField(bep.state.grid()),
                  VectorField(bep.state.grid()), VectorField(bep.state.grid()),
                  VectorField(bep.state.grid())};
    out.N_i = bep.state.rho_i;
    out.N_i += -1.0;
    out.N_e = bep.state.rho_e - uep.state.rho_e;
    detail::strip_mean_dust(out.N_i);
    detail::strip_mean_dust(out.N_e);
    out.w_i = (1.0 / (eps * eps)) * bep.state.u_i;
    out.w_i -= prof.u_bar_i;
    out.w_e = bep.state.u_e - uep.state.u_e;
    out.F = bep.grad_phi - uep.grad_phi;
    return out;
}

/// ||N_e||^2 + ||N_i||^2 + ||w_e||^2 + ||F||^2 at the given order (w_i does
/// not enter).
inline double error_dissipation(const ErrorVars& err, int order) {
    const auto sq = [](double x) { return x * x; };
    return sq(sobolev_norm(err.N_e, order)) + sq(sobolev_norm(err.N_i, order)) +
           sq(sobolev_norm(err.w_e, order)) + sq(sobolev_norm(err.F, order));
}

/// Curl-free zero-mean psi with div(psi) = -z. For ions the argument is
/// z = N_i - eps^2 rho_bar_i1, for electrons z = N_e.
inline VectorField stream_function(const ScalarField& z) {
    return grad_inv_laplacian(-1.0 * z);
}

struct StreamDiag {
    VectorField psi;
    double residual_div_norm = 0.0;  ///< || div psi + z ||_0
};

inline StreamDiag stream_diag(const ScalarField& z) {
    StreamDiag out{stream_function(z), 0.0};
    out.residual_div_norm = l2_norm(divergence(out.psi) + z);
    return out;
}

enum class Species { ion, electron };

namespace detail {

inline ScalarField stream_argument(const ErrorVars& err, const ProfileState& prof,
                                   double eps, Species which) {
    if (which == Species::electron) return err.N_e;
    ScalarField z = err.N_i;
    z.add_scaled(prof.rho_bar_i1, -eps * eps);
    return z;
}

/// The transported flux whose divergence balances d/dt div(psi):
///   ion:      eps^2 (rho_i w_i + N_i u_bar_i + grad rho_bar_i1)
///   electron: rho_e u_e - rho_bar_e u_bar_e
inline VectorField stream_flux(const BepSample& bep, const UepSample& uep,
                               const ProfileState& prof, const ErrorVars& err, double eps,
                               Species which) {
    const GridPtr& grid = bep.state.grid();
    VectorField flux(grid);
    if (which == Species::ion) {
        const double e2 = eps * eps;
        const VectorField grad_rho1 = gradient(prof.rho_bar_i1);
        for (int c = 0; c < grid->dim(); ++c) {
            ScalarField comp = pointwise_product(bep.state.rho_i, err.w_i[c]);
            comp += pointwise_product(err.N_i, prof.u_bar_i[c]);
            comp += grad_rho1[c];
            comp *= e2;
            flux[c] = std::move(comp);
        }
    } else {
        for (int c = 0; c < grid->dim(); ++c)
            flux[c] = pointwise_product(bep.state.rho_e, bep.state.u_e[c]) -
                      pointwise_product(uep.state.rho_e, uep.state.u_e[c]);
    }
    return flux;
}

}  // namespace detail

/// Discrete defect of d/dt psi = flux + curl-gauge, measured through the
/// divergence (which annihilates the gauge term):
///   R = [psi(t+dt) - psi(t)]/dt - [flux(t) + flux(t+dt)]/2,
/// returns ||div R||_0. Second order in the sample spacing.
inline double stream_residual(const BepSample& bep0, const BepSample& bep1,
                              const UepSample& uep0, const UepSample& uep1,
                              const ProfileState& prof0, const ProfileState& prof1,
                              double eps, Species which) {
    const double dt = bep1.t - bep0.t;
    if (!(dt > 0.0))
        throw InsufficientDataError("stream_residual: need two increasing sample times");

    const ErrorVars err0 = error_vars(bep0, uep0, prof0, eps);
    const ErrorVars err1 = error_vars(bep1, uep1, prof1, eps);

    const VectorField psi0 = stream_function(detail::stream_argument(err0, prof0, eps, which));
    const VectorField psi1 = stream_function(detail::stream_argument(err1, prof1, eps, which));

    VectorField r = psi1 - psi0;
    r *= 1.0 / dt;
    r.add_scaled(detail::stream_flux(bep0, uep0, prof0, err0, eps, which), -0.5);
    r.add_scaled(detail::stream_flux(bep1, uep1, prof1, err1, eps, which), -0.5);
    return l2_norm(divergence(r));
}

}  // namespace bipep
