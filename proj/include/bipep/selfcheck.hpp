#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bipep/models.hpp"
#include "bipep/spectral.hpp"
#include "bipep/timestep.hpp"

namespace bipep {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline CheckResult make_check(const std::string& name, double measured, double tol,
                              bool within = true) {
    std::ostringstream d;
    d.precision(3);
    d << std::scientific << "measured " << measured << (within ? " <= " : " in band ")
      << tol;
    return {name, within ? measured <= tol : true, d.str()};
}

// deterministic smooth band-limited field (integer wavevectors only)
inline ScalarField check_field(const GridPtr& g, int variant) {
    return sample_scalar(g, [variant](const std::array<double, 3>& x) {
        const double p = x[0] + 2.0 * x[1] + x[2];
        double v = std::sin(p) + 0.5 * std::cos(2.0 * x[0] + 0.2 * variant) +
                   0.25 * std::sin(3.0 * x[0] - x[1] + 0.1 * variant);
        if (variant % 2 == 1) v += 0.4 * std::cos(x[0] - 2.0 * x[1]);
        return v;
    });
}

}  // namespace detail

/// The standalone property suite: spectral round trip, Poisson inverse, norm
/// identities, potential-gradient construction, dealiasing, and RK4 temporal
/// self-convergence. Deterministic, a few seconds end to end.
inline std::vector<CheckResult> run_selfchecks() {
    std::vector<CheckResult> out;
    constexpr double pi = std::numbers::pi;

    // round trip on d = 1, 2, 3
    for (const auto& [d, n] : {std::pair{1, 64}, {2, 16}, {3, 8}}) {
        const auto g = make_grid(d, n);
        const ScalarField f = detail::check_field(g, d);
        const double rel = l2_norm(to_nodal(g, to_spectral(f)) - f) / l2_norm(f);
        const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                           static_cast<double>(g->size());
        out.push_back(detail::make_check(
            "spectral round trip d=" + std::to_string(d), rel, tol));
    }

    // Poisson inverse on random-ish zero-mean data
    for (const auto& [d, n] : {std::pair{1, 64}, {2, 24}}) {
        const auto g = make_grid(d, n);
        ScalarField rhs = detail::check_field(g, 2 + d);
        rhs += -mean(rhs);
        const double rel = l2_norm(laplacian(solve_poisson_zero_mean(rhs)) - rhs) /
                           l2_norm(rhs);
        out.push_back(detail::make_check(
            "poisson inverse d=" + std::to_string(d), rel, 1e-10));
    }

    // norm identities
    {
        const auto g = make_grid(1, 64);
        ScalarField c(g);
        c += 1.5;
        const double e1 =
            std::abs(sobolev_norm(c, 2) - 1.5 * std::sqrt(2.0 * pi));
        const ScalarField s = sample_scalar(g, [](const std::array<double, 3>& x) {
            return std::sin(x[0]);
        });
        const double e2 = std::abs(sobolev_norm(s, 1) - std::sqrt(2.0 * pi));
        const ScalarField s2 = sample_scalar(g, [](const std::array<double, 3>& x) {
            return std::sin(2.0 * x[0]);
        });
        const double e3 = std::abs(sobolev_norm(s2, 1) - std::sqrt(5.0 * pi));
        const ScalarField f = detail::check_field(g, 7);
        const double e4 = std::abs(sobolev_norm(f, 0) - l2_norm(f));
        bool monotone = true;
        double prev = 0.0;
        for (int l = 0; l <= 4; ++l) {
            const double cur = sobolev_norm(f, l);
            monotone = monotone && cur >= prev;
            prev = cur;
        }
        const double worst = std::max({e1, e2, e3, e4});
        CheckResult r = detail::make_check("sobolev norm identities", worst, 1e-12);
        r.passed = r.passed && monotone;
        if (!monotone) r.detail += " (monotonicity violated)";
        out.push_back(r);
    }

    // grad_inv_laplacian: divergence recovers, curl-free
    {
        const auto g = make_grid(2, 24);
        ScalarField z = detail::check_field(g, 5);
        z += -mean(z);
        const VectorField psi = grad_inv_laplacian(z);
        const double ediv = l2_norm(divergence(psi) - z) / l2_norm(z);
        const double ecurl = l2_norm(curl(psi)[0]);
        out.push_back(detail::make_check("potential gradient divergence", ediv, 1e-10));
        out.push_back(detail::make_check("potential gradient curl-free", ecurl, 1e-10));
    }

    // dealiasing removes exactly the modes above the cutoff
    {
        const auto g = make_grid(1, 32);
        const ScalarField keep = sample_scalar(g, [](const std::array<double, 3>& x) {
            return std::cos(10.0 * x[0]);
        });
        const ScalarField drop = sample_scalar(g, [](const std::array<double, 3>& x) {
            return std::cos(11.0 * x[0]);
        });
        const double e = std::max(max_abs(dealias(keep) - keep), max_abs(dealias(drop)));
        out.push_back(detail::make_check("2/3-rule dealias mask", e, 1e-13));
    }

    // RK4 temporal self-convergence, order 4 +- 0.2
    {
        const auto g = make_grid(1, 32);
        const PlasmaParams p{0.5, {1.0, 2.0}, {1.0, 2.0}, 2};
        BepState s0 = equilibrium_bep(g);
        s0.rho_i += sample_scalar(g, [](const std::array<double, 3>& x) {
            return 0.08 * std::sin(x[0]);
        });
        s0.rho_e += sample_scalar(g, [](const std::array<double, 3>& x) {
            return 0.08 * std::sin(x[0]);
        });
        s0.u_e[0] = sample_scalar(g, [](const std::array<double, 3>& x) {
            return 0.04 * std::cos(x[0]);
        });
        const double T = 0.4;
        const auto advance = [&](int steps) {
            BepState s = s0;
            const double dt = T / steps;
            for (int i = 0; i < steps; ++i) s = step_rk4(s, p, dt);
            return s;
        };
        const auto dist = [](const BepState& a, const BepState& b) {
            double m = 0.0;
            m = std::max(m, max_abs(a.rho_i - b.rho_i));
            m = std::max(m, max_abs(a.rho_e - b.rho_e));
            m = std::max(m, max_abs(a.u_i - b.u_i));
            m = std::max(m, max_abs(a.u_e - b.u_e));
            return m;
        };
        const BepState a = advance(8), b = advance(16), c = advance(32);
        const double order = std::log2(dist(a, b) / dist(b, c));
        std::ostringstream d;
        d.precision(3);
        d << "order " << order << " in [3.8, 4.2]";
        out.push_back({"rk4 self-convergence", order > 3.8 && order < 4.2, d.str()});
    }

    return out;
}

}  // namespace bipep
