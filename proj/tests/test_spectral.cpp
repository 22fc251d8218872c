#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "bipep/field.hpp"
#include "bipep/grid.hpp"
#include "bipep/spectral.hpp"
#include "oracles.hpp"

using namespace bipep;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

double rel_l2_error(const ScalarField& got, const ScalarField& want) {
    const double denom = l2_norm(want);
    return l2_norm(got - want) / (denom > 0.0 ? denom : 1.0);
}
}  // namespace

TEST_CASE("make_grid populates spacing, wavenumbers and mask", "[spectral]") {
    const auto g = make_grid(1, 8);
    CHECK(g->size() == 8);
    CHECK(g->spacing() == Approx(pi / 4.0));
    CHECK(g->dim() == 1);

    const auto g2 = make_grid(2, 16);
    CHECK(g2->size() == 256);
    int kmin = 100, kmax = -100;
    for (int m = 0; m < 16; ++m) {
        kmin = std::min(kmin, g2->wavenumber(m));
        kmax = std::max(kmax, g2->wavenumber(m));
    }
    CHECK(kmin == -7);
    CHECK(kmax == 8);

    // 2/3 rule: n=16 keeps |k| <= 5
    CHECK(g2->dealias_cutoff() == 5);
    for (std::size_t flat = 0; flat < g2->size(); ++flat) {
        const auto k = g2->wavevector(flat);
        const bool keep = std::abs(k[0]) <= 5 && std::abs(k[1]) <= 5;
        CHECK(g2->dealias_keep(flat) == keep);
    }
}

TEST_CASE("make_grid rejects bad arguments", "[spectral]") {
    CHECK_THROWS_AS(make_grid(1, 7), InvalidGridError);
    CHECK_THROWS_AS(make_grid(1, 6), InvalidGridError);
    CHECK_THROWS_AS(make_grid(0, 16), InvalidDimensionError);
    CHECK_THROWS_AS(make_grid(4, 16), InvalidDimensionError);
}

TEST_CASE("forward/inverse round trip reproduces real fields", "[spectral]") {
    struct Case {
        int d, n;
    };
    for (const Case c : {Case{1, 64}, Case{2, 16}, Case{3, 8}}) {
        const auto g = make_grid(c.d, c.n);
        const oracles::RandomTrig fn(c.d, 2, 42u);
        const ScalarField f = sample_scalar(g, fn);
        const ScalarField back = to_nodal(g, to_spectral(f));
        const double tol =
            10.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(g->size());
        CHECK(rel_l2_error(back, f) <= tol);
    }
}

TEST_CASE("differential operators on analytic fields", "[spectral]") {
    const auto g = make_grid(2, 32);
    const ScalarField s1 = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    const VectorField grad_s1 = gradient(s1);
    const ScalarField c1 = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::cos(x[0]);
    });
    CHECK(max_abs(grad_s1[0] - c1) < 1e-13);
    CHECK(max_abs(grad_s1[1]) < 1e-13);

    VectorField constant(g);
    constant[0] += 3.0;
    constant[1] += -2.0;
    CHECK(max_abs(divergence(constant)) < 1e-13);

    const ScalarField s2 = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::sin(2.0 * x[0]);
    });
    CHECK(max_abs(laplacian(s2) - (-4.0) * s2) < 1e-12);
}

TEST_CASE("spectral derivative agrees with centered differences at O(dx^2)",
          "[spectral]") {
    const oracles::RandomTrig fn(1, 3, 7u, 0.3);
    double err_prev = 0.0;
    int idx = 0;
    for (const int n : {32, 64}) {
        const auto g = make_grid(1, n);
        const ScalarField f = sample_scalar(g, fn);
        const ScalarField ds = partial_derivative(f, 0);
        const std::vector<double> fd = oracles::fd_deriv2(f.values(), g->spacing());
        double err = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j)
            err = std::max(err, std::abs(ds[j] - fd[j]));
        if (idx == 1) {
            const double ratio = err_prev / err;
            CHECK(ratio > 3.5);
            CHECK(ratio < 4.5);
        }
        err_prev = err;
        ++idx;
    }
}

TEST_CASE("zero-mean Poisson solve", "[spectral]") {
    const auto g = make_grid(1, 64);
    const ScalarField rhs = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    const ScalarField phi = solve_poisson_zero_mean(rhs);
    CHECK(max_abs(phi - (-1.0) * rhs) < 1e-13);
    CHECK(std::abs(mean(phi)) < 1e-14);

    const ScalarField zero(g);
    CHECK(max_abs(solve_poisson_zero_mean(zero)) == 0.0);

    ScalarField ones(g);
    ones += 1.0;
    CHECK_THROWS_AS(solve_poisson_zero_mean(ones), CompatibilityError);
}

TEST_CASE("Poisson then laplacian recovers random zero-mean data", "[spectral]") {
    for (const int d : {1, 2}) {
        const auto g = make_grid(d, d == 1 ? 64 : 24);
        const oracles::RandomTrig fn(d, 3, 11u);
        ScalarField rhs = sample_scalar(g, fn);
        rhs += -mean(rhs);
        const ScalarField back = laplacian(solve_poisson_zero_mean(rhs));
        CHECK(rel_l2_error(back, rhs) < 1e-10);
    }
}

TEST_CASE("grad_inv_laplacian", "[spectral]") {
    const auto g = make_grid(1, 64);
    const ScalarField z = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    const VectorField gil = grad_inv_laplacian(z);
    const ScalarField want = sample_scalar(g, [](const std::array<double, 3>& x) {
        return -std::cos(x[0]);
    });
    CHECK(max_abs(gil[0] - want) < 1e-13);

    CHECK(max_abs(grad_inv_laplacian(ScalarField(g))) == 0.0);

    ScalarField ones(g);
    ones += 1.0;
    CHECK_THROWS_AS(grad_inv_laplacian(ones), CompatibilityError);

    const ScalarField z2 = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::cos(x[0]) + std::cos(2.0 * x[0]);
    });
    CHECK(rel_l2_error(divergence(grad_inv_laplacian(z2)), z2) < 1e-10);
}

TEST_CASE("grad_inv_laplacian is curl-free with matching divergence in 2-d",
          "[spectral]") {
    const auto g = make_grid(2, 24);
    const oracles::RandomTrig fn(2, 3, 13u);
    ScalarField z = sample_scalar(g, fn);
    z += -mean(z);
    const VectorField gil = grad_inv_laplacian(z);
    CHECK(rel_l2_error(divergence(gil), z) < 1e-10);
    const auto curls = curl(gil);
    REQUIRE(curls.size() == 1);
    CHECK(l2_norm(curls[0]) < 1e-10);
}

TEST_CASE("sobolev_norm closed forms", "[spectral]") {
    const auto g = make_grid(1, 64);
    ScalarField c(g);
    c += -2.5;
    for (const int l : {0, 1, 3})
        CHECK(sobolev_norm(c, l) == Approx(2.5 * std::sqrt(2.0 * pi)));

    const ScalarField s = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::sin(x[0]);
    });
    CHECK(sobolev_norm(s, 1) == Approx(std::sqrt(2.0 * pi)));

    const ScalarField s2 = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::sin(2.0 * x[0]);
    });
    CHECK(sobolev_norm(s2, 1) == Approx(std::sqrt(5.0 * pi)));
}

TEST_CASE("sobolev_norm equals the derivative-sum evaluation", "[spectral]") {
    for (const int d : {1, 2}) {
        const auto g = make_grid(d, d == 1 ? 64 : 20);
        const oracles::RandomTrig fn(d, 2, 5u);
        const ScalarField f = sample_scalar(g, fn);
        for (const int l : {0, 1, 2, 3}) {
            const double got = sobolev_norm(f, l);
            const double want = oracles::sobolev_norm_by_derivatives(f, l);
            CHECK(got == Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("sobolev_norm is monotone in the order and matches l2 at order 0",
          "[spectral]") {
    const auto g = make_grid(1, 64);
    const oracles::RandomTrig fn(1, 4, 21u);
    const ScalarField f = sample_scalar(g, fn);
    CHECK(sobolev_norm(f, 0) == Approx(l2_norm(f)).epsilon(1e-13));
    double prev = 0.0;
    for (int l = 0; l <= 4; ++l) {
        const double cur = sobolev_norm(f, l);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("dealias removes modes above the 2/3 cutoff and nothing else",
          "[spectral]") {
    const auto g = make_grid(1, 32);  // cutoff |k| <= 10
    const ScalarField low = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::sin(3.0 * x[0]) + 0.5 * std::cos(10.0 * x[0]);
    });
    CHECK(max_abs(dealias(low) - low) < 1e-13);

    const ScalarField high = sample_scalar(g, [](const std::array<double, 3>& x) {
        return std::cos(11.0 * x[0]);
    });
    CHECK(max_abs(dealias(high)) < 1e-13);
}

TEST_CASE("vector sobolev norm sums component squares", "[spectral]") {
    const auto g = make_grid(2, 16);
    VectorField v(g);
    v[0] = sample_scalar(g, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
    v[1] = sample_scalar(g, [](const std::array<double, 3>& x) { return std::cos(x[1]); });
    const double n0 = sobolev_norm(v[0], 1);
    const double n1 = sobolev_norm(v[1], 1);
    CHECK(sobolev_norm(v, 1) == Approx(std::sqrt(n0 * n0 + n1 * n1)));
}
