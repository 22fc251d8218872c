// Test-only reference computations. Everything here is deliberately
// independent of the spectral code paths it is used to check: derivatives are
// finite-difference stencils, transforms are naive DFTs, quadrature is plain
// nodal summation.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "bipep/field.hpp"
#include "bipep/grid.hpp"
#include "bipep/models.hpp"
#include "bipep/spectral.hpp"

namespace oracles {

using bipep::GridPtr;
using bipep::ScalarField;
using bipep::VectorField;

// ---------------------------------------------------------------------------
// Deterministic band-limited "random" functions, defined in continuous space
// so the same function can be sampled on grids of different resolution.
// ---------------------------------------------------------------------------

struct TrigMode {
    std::array<int, 3> k;
    double amp_cos;
    double amp_sin;
};

class RandomTrig {
  public:
    RandomTrig(int dim, int kmax, unsigned seed, double amplitude = 1.0) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        std::array<int, 3> k{0, 0, 0};
        const int lo = dim > 1 ? -kmax : 0;  // 1-d: nonnegative k suffices
        for (int k0 = 0; k0 <= kmax; ++k0)
            for (int k1 = (dim > 1 ? lo : 0); k1 <= (dim > 1 ? kmax : 0); ++k1)
                for (int k2 = (dim > 2 ? lo : 0); k2 <= (dim > 2 ? kmax : 0); ++k2) {
                    if (k0 == 0 && k1 == 0 && k2 == 0) continue;
                    k = {k0, k1, k2};
                    modes_.push_back({k, amplitude * coef(rng), amplitude * coef(rng)});
                }
    }

    double operator()(const std::array<double, 3>& x) const {
        double v = 0.0;
        for (const auto& m : modes_) {
            const double phase = m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2];
            v += m.amp_cos * std::cos(phase) + m.amp_sin * std::sin(phase);
        }
        return v;
    }

    // Analytic partial derivative, for derivative checks.
    double partial(const std::array<double, 3>& x, int axis) const {
        double v = 0.0;
        for (const auto& m : modes_) {
            const double phase = m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2];
            const double kj = static_cast<double>(m.k[static_cast<std::size_t>(axis)]);
            v += kj * (-m.amp_cos * std::sin(phase) + m.amp_sin * std::cos(phase));
        }
        return v;
    }

  private:
    std::vector<TrigMode> modes_;
};

// ---------------------------------------------------------------------------
// Sobolev norm the long way: repeated first derivatives, nodal quadrature.
// ---------------------------------------------------------------------------

inline double sobolev_norm_by_derivatives(const ScalarField& f, int l) {
    const int d = f.grid()->dim();
    std::vector<std::array<int, 3>> alphas;
    std::array<int, 3> a{0, 0, 0};
    const std::function<void(int, int)> rec = [&](int axis, int budget) {
        if (axis == d) {
            alphas.push_back(a);
            return;
        }
        for (int v = 0; v <= budget; ++v) {
            a[static_cast<std::size_t>(axis)] = v;
            rec(axis + 1, budget - v);
        }
        a[static_cast<std::size_t>(axis)] = 0;
    };
    rec(0, l);

    double total = 0.0;
    for (const auto& alpha : alphas) {
        ScalarField g = f;
        for (int axis = 0; axis < d; ++axis)
            for (int rep = 0; rep < alpha[static_cast<std::size_t>(axis)]; ++rep)
                g = bipep::partial_derivative(g, axis);
        const double n0 = bipep::l2_norm(g);
        total += n0 * n0;
    }
    return std::sqrt(total);
}

// ---------------------------------------------------------------------------
// 1-d periodic finite differences (2nd and 4th order) and a naive-DFT solve
// of the 4th-order Poisson stencil. Used as the spatial oracle for the model
// right-hand sides.
// ---------------------------------------------------------------------------

inline std::vector<double> fd_deriv2(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = (f[(j + 1) % n] - f[(j + n - 1) % n]) / (2.0 * h);
    return out;
}

inline std::vector<double> fd_deriv4(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double fp1 = f[(j + 1) % n], fp2 = f[(j + 2) % n];
        const double fm1 = f[(j + n - 1) % n], fm2 = f[(j + n - 2) % n];
        out[j] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
    }
    return out;
}

// Solves the periodic 4th-order Laplacian stencil system by diagonalizing the
// circulant with a naive O(n^2) DFT; zero-mean solution.
inline std::vector<double> fd_poisson4(const std::vector<double>& rhs, double h) {
    const std::size_t n = rhs.size();
    const double tau = 2.0 * std::acos(-1.0);
    std::vector<std::complex<double>> hat(n, {0.0, 0.0});
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t j = 0; j < n; ++j)
            hat[m] += rhs[j] * std::polar(1.0, -tau * double(m) * double(j) / double(n));
    for (std::size_t m = 1; m < n; ++m) {
        const double th = tau * double(m) / double(n);
        const double sym =
            (-2.0 * std::cos(2.0 * th) + 32.0 * std::cos(th) - 30.0) / (12.0 * h * h);
        hat[m] /= sym;
    }
    hat[0] = 0.0;
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> v{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m)
            v += hat[m] * std::polar(1.0, tau * double(m) * double(j) / double(n));
        out[j] = v.real() / double(n);
    }
    return out;
}

struct FdBepTendency {
    std::vector<double> drho_i, du_i, drho_e, du_e;
};

// 1-d finite-difference evaluation of the two-species right-hand side,
// O(h^4) accurate in space, no dealiasing, own Poisson solve.
inline FdBepTendency fd_bep_rhs(const std::vector<double>& rho_i,
                                const std::vector<double>& u_i,
                                const std::vector<double>& rho_e,
                                const std::vector<double>& u_e, double h, double eps,
                                const bipep::PressureLaw& ion_law,
                                const bipep::PressureLaw& electron_law) {
    const std::size_t n = rho_i.size();
    const double e2 = eps * eps;

    std::vector<double> diff(n);
    for (std::size_t j = 0; j < n; ++j) diff[j] = rho_i[j] - rho_e[j];
    const std::vector<double> phi = fd_poisson4(diff, h);
    const std::vector<double> ephi = fd_deriv4(phi, h);

    const auto species = [&](const std::vector<double>& rho, const std::vector<double>& u,
                             const bipep::PressureLaw& law, double pressure_scale,
                             double field_sign, std::vector<double>& drho,
                             std::vector<double>& du) {
        std::vector<double> flux(n), hfield(n);
        for (std::size_t j = 0; j < n; ++j) {
            flux[j] = rho[j] * u[j];
            hfield[j] = law.enthalpy(rho[j]);
        }
        const std::vector<double> dflux = fd_deriv4(flux, h);
        const std::vector<double> dh = fd_deriv4(hfield, h);
        const std::vector<double> dudx = fd_deriv4(u, h);
        drho.resize(n);
        du.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            drho[j] = -dflux[j];
            du[j] = -u[j] * dudx[j] - pressure_scale * dh[j] + field_sign * ephi[j] - u[j];
        }
    };

    FdBepTendency out;
    species(rho_i, u_i, ion_law, e2, e2, out.drho_i, out.du_i);
    species(rho_e, u_e, electron_law, 1.0, -1.0, out.drho_e, out.du_e);
    return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace oracles
