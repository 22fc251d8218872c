#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "bipep/errors.hpp"
#include "bipep/field.hpp"
#include "bipep/grid.hpp"

namespace bipep {

/// Fourier coefficients c_k of the trigonometric interpolant, normalized so
/// that f(x) = sum_k c_k e^{i k.x} on the nodes.
inline std::vector<std::complex<double>> to_spectral(const ScalarField& f) {
    const auto& g = *f.grid();
    std::vector<std::complex<double>> in(g.size()), out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) in[i] = f[i];
    g.forward(in.data(), out.data());
    const double scale = 1.0 / static_cast<double>(g.size());
    for (auto& c : out) c *= scale;
    return out;
}

/// Back to nodal values; imaginary residue of Hermitian inputs is dropped.
inline ScalarField to_nodal(const GridPtr& grid,
                            const std::vector<std::complex<double>>& coeff) {
    if (coeff.size() != grid->size())
        throw ShapeError("coefficient count does not match grid size");
    std::vector<std::complex<double>> out(grid->size());
    grid->backward(coeff.data(), out.data());
    ScalarField f(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) f[i] = out[i].real();
    return f;
}

namespace detail {

// Multiplier for (ik_axis); the Nyquist column is zeroed for odd derivative
// orders so the result is the derivative of the symmetric interpolant (and
// stays real).
inline std::complex<double> ik(const TorusGrid& g, int k) {
    if (2 * k == g.points_per_axis()) return {0.0, 0.0};
    return {0.0, static_cast<double>(k)};
}

template <class Mult>
ScalarField apply_multiplier(const ScalarField& f, Mult&& mult) {
    const GridPtr& grid = f.grid();
    auto coeff = to_spectral(f);
    for (std::size_t m = 0; m < coeff.size(); ++m)
        coeff[m] *= mult(grid->wavevector(m), m);
    return to_nodal(grid, coeff);
}

}  // namespace detail

/// Partial derivative along one axis of the trigonometric interpolant.
inline ScalarField partial_derivative(const ScalarField& f, int axis) {
    const auto& g = *f.grid();
    if (axis < 0 || axis >= g.dim()) throw ShapeError("derivative axis out of range");
    return detail::apply_multiplier(f, [&](const std::array<int, 3>& k, std::size_t) {
        return detail::ik(g, k[static_cast<std::size_t>(axis)]);
    });
}

/// Mixed derivative d^alpha with multiplier prod_j (i k_j)^{alpha_j}.
inline ScalarField derivative_multi(const ScalarField& f, const std::array<int, 3>& alpha) {
    const auto& g = *f.grid();
    return detail::apply_multiplier(f, [&](const std::array<int, 3>& k, std::size_t) {
        std::complex<double> m{1.0, 0.0};
        for (int axis = 0; axis < g.dim(); ++axis) {
            const int a = alpha[static_cast<std::size_t>(axis)];
            const int kj = k[static_cast<std::size_t>(axis)];
            if (a == 0) continue;
            if (a % 2 == 1 && 2 * kj == g.points_per_axis()) return std::complex<double>{0.0, 0.0};
            m *= std::pow(std::complex<double>{0.0, static_cast<double>(kj)},
                          static_cast<double>(a));
        }
        return m;
    });
}

inline VectorField gradient(const ScalarField& f) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(f.grid()->dim()));
    for (int axis = 0; axis < f.grid()->dim(); ++axis)
        comps.push_back(partial_derivative(f, axis));
    return VectorField(std::move(comps));
}

inline ScalarField divergence(const VectorField& v) {
    ScalarField out = partial_derivative(v[0], 0);
    for (int axis = 1; axis < v.dim(); ++axis) out += partial_derivative(v[axis], axis);
    return out;
}

inline ScalarField laplacian(const ScalarField& f) {
    return detail::apply_multiplier(f, [&](const std::array<int, 3>& k, std::size_t) {
        double k2 = 0.0;
        for (int axis = 0; axis < f.grid()->dim(); ++axis) {
            const double kj = static_cast<double>(k[static_cast<std::size_t>(axis)]);
            k2 += kj * kj;
        }
        return std::complex<double>{-k2, 0.0};
    });
}

/// Curl components: d=2 gives the single scalar dv1/dx0 - dv0/dx1, d=3 the
/// usual three components. d=1 has no curl (empty result).
inline std::vector<ScalarField> curl(const VectorField& v) {
    const int d = v.dim();
    std::vector<ScalarField> out;
    if (d == 2) {
        out.push_back(partial_derivative(v[1], 0) - partial_derivative(v[0], 1));
    } else if (d == 3) {
        out.push_back(partial_derivative(v[2], 1) - partial_derivative(v[1], 2));
        out.push_back(partial_derivative(v[0], 2) - partial_derivative(v[2], 0));
        out.push_back(partial_derivative(v[1], 0) - partial_derivative(v[0], 1));
    }
    return out;
}

/// 2/3-rule mask: zero every mode with any |k_j| > n/3. Applied after every
/// nonlinear product.
inline ScalarField dealias(const ScalarField& f) {
    const GridPtr& grid = f.grid();
    auto coeff = to_spectral(f);
    for (std::size_t m = 0; m < coeff.size(); ++m)
        if (!grid->dealias_keep(m)) coeff[m] = 0.0;
    return to_nodal(grid, coeff);
}

inline VectorField dealias(const VectorField& v) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(v.dim()));
    for (int c = 0; c < v.dim(); ++c) comps.push_back(dealias(v[c]));
    return VectorField(std::move(comps));
}

namespace detail {

// Fields whose every value sits below this are rounding dust left over from
// cancellations of analytically-zero data; their mean carries no charge
// information and inverting them yields dust again.
constexpr double kZeroMeanDustFloor = 1e-13;

inline void require_zero_mean(const std::complex<double>& c0, const ScalarField& rhs,
                              const char* what) {
    if (max_abs(rhs) <= kZeroMeanDustFloor) return;
    // Machine-level compatibility check, relative to the data size.
    const double tol = 1e-12 * l2_norm(rhs);
    if (std::abs(c0) > tol) {
        std::ostringstream msg;
        msg.precision(3);
        msg << std::scientific << what << ": right-hand side has nonzero mean "
            << std::abs(c0) << " (tol " << tol << ")";
        throw CompatibilityError(msg.str());
    }
}

}  // namespace detail

/// Solve Delta(phi) = rhs with int phi dx = 0; spectrally exact on resolved
/// modes. Throws CompatibilityError when the rhs mean is not numerically zero.
inline ScalarField solve_poisson_zero_mean(const ScalarField& rhs) {
    const GridPtr& grid = rhs.grid();
    auto coeff = to_spectral(rhs);
    detail::require_zero_mean(coeff[0], rhs, "solve_poisson_zero_mean");
    coeff[0] = 0.0;
    for (std::size_t m = 1; m < coeff.size(); ++m) {
        const auto k = grid->wavevector(m);
        double k2 = 0.0;
        for (int axis = 0; axis < grid->dim(); ++axis) {
            const double kj = static_cast<double>(k[static_cast<std::size_t>(axis)]);
            k2 += kj * kj;
        }
        coeff[m] /= -k2;
    }
    return to_nodal(grid, coeff);
}

/// g = grad(inv_laplacian(z)) for zero-mean z: div g = z, curl g = 0, and the
/// underlying potential has zero mean.
inline VectorField grad_inv_laplacian(const ScalarField& z) {
    const GridPtr& grid = z.grid();
    auto coeff = to_spectral(z);
    detail::require_zero_mean(coeff[0], z, "grad_inv_laplacian");
    coeff[0] = 0.0;
    std::vector<std::vector<std::complex<double>>> comp_coeff(
        static_cast<std::size_t>(grid->dim()),
        std::vector<std::complex<double>>(grid->size(), {0.0, 0.0}));
    for (std::size_t m = 1; m < coeff.size(); ++m) {
        const auto k = grid->wavevector(m);
        double k2 = 0.0;
        for (int axis = 0; axis < grid->dim(); ++axis) {
            const double kj = static_cast<double>(k[static_cast<std::size_t>(axis)]);
            k2 += kj * kj;
        }
        const std::complex<double> pot = coeff[m] / -k2;
        for (int axis = 0; axis < grid->dim(); ++axis)
            comp_coeff[static_cast<std::size_t>(axis)][m] =
                detail::ik(*grid, k[static_cast<std::size_t>(axis)]) * pot;
    }
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(grid->dim()));
    for (int axis = 0; axis < grid->dim(); ++axis)
        comps.push_back(to_nodal(grid, comp_coeff[static_cast<std::size_t>(axis)]));
    return VectorField(std::move(comps));
}

/// Discrete Sobolev norm ||f||_l = (sum_{|alpha|<=l} ||d^alpha f||_0^2)^{1/2},
/// evaluated through Parseval: one transform, per-mode weight
/// sum_{|alpha|<=l} prod_j k_j^{2 alpha_j}.
inline double sobolev_norm(const ScalarField& f, int l) {
    if (l < 0) throw ConfigError("sobolev_norm: order must be >= 0");
    const auto& g = *f.grid();
    const int d = g.dim();
    auto coeff = to_spectral(f);

    // Enumerate multi-indices |alpha| <= l once.
    std::vector<std::array<int, 3>> alphas;
    std::array<int, 3> a{0, 0, 0};
    const auto rec = [&](auto&& self, int axis, int budget) -> void {
        if (axis == d) {
            alphas.push_back(a);
            return;
        }
        for (int v = 0; v <= budget; ++v) {
            a[static_cast<std::size_t>(axis)] = v;
            self(self, axis + 1, budget - v);
        }
        a[static_cast<std::size_t>(axis)] = 0;
    };
    rec(rec, 0, l);

    double total = 0.0;
    for (std::size_t m = 0; m < coeff.size(); ++m) {
        const auto k = g.wavevector(m);
        double w = 0.0;
        for (const auto& alpha : alphas) {
            double term = 1.0;
            for (int axis = 0; axis < d; ++axis) {
                const int aj = alpha[static_cast<std::size_t>(axis)];
                if (aj == 0) continue;
                term *= std::pow(static_cast<double>(k[static_cast<std::size_t>(axis)]),
                                 2.0 * aj);
            }
            w += term;
        }
        total += w * std::norm(coeff[m]);
    }
    return std::sqrt(total * g.volume());
}

inline double sobolev_norm(const VectorField& v, int l) {
    double s = 0.0;
    for (int c = 0; c < v.dim(); ++c) {
        const double nc = sobolev_norm(v[c], l);
        s += nc * nc;
    }
    return std::sqrt(s);
}

}  // namespace bipep
