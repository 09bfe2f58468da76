#include <doctest.h>

#include <cmath>

#include "gendiff/bessel.hpp"
#include "gendiff/quadrature.hpp"

using namespace gendiff;

namespace {

// independent oracle: direct 30-term series summation
double series_oracle(int nu, double x) {
    double sum = 0.0;
    double fact_n = 1.0, fact_nnu = nu == 0 ? 1.0 : 1.0;
    for (int n = 0; n < 30; ++n) {
        if (n > 0) fact_n *= n;
        double gamma_term = 1.0;
        for (int j = 1; j <= n + nu; ++j) gamma_term *= j;
        sum += std::pow(0.5 * x, nu + 2 * n) / (fact_n * gamma_term);
    }
    (void)fact_nnu;
    return sum;
}

} // namespace

TEST_CASE("I_nu at special points") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(1, 0.0) == 0.0);
    CHECK(bessel_i(0, 1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-14));
    CHECK(bessel_i(0, 1.0) == doctest::Approx(series_oracle(0, 1.0)).epsilon(1e-14));
    CHECK(bessel_i(1, 2.5) == doctest::Approx(series_oracle(1, 2.5)).epsilon(1e-13));
}

TEST_CASE("positivity and the large-x normalization") {
    for (double x : {1e-3, 0.5, 5.0, 50.0, 500.0}) {
        CHECK(bessel_i(0, x) > 0.0);
        CHECK(bessel_i(1, x) > 0.0);
    }
    // I_0(x) sqrt(2 pi x) e^{-x} -> 1
    for (double x : {200.0, 2000.0, 20000.0}) {
        const double v = bessel_i_scaled(0, x) * std::sqrt(2.0 * M_PI * x);
        CHECK(std::abs(v - 1.0) < 0.2 / x);
    }
}

TEST_CASE("series and asymptotic branches agree at the crossover") {
    const double xc = bessel_crossover();
    const double dx = xc * 1e-9;
    // compare the jump across the branch switch against the smooth change
    // predicted by the derivative (I_0' = I_1, I_1' = I_0 - I_1/x)
    const double jump0 = bessel_i(0, xc + dx) - bessel_i(0, xc - dx);
    CHECK(std::abs(jump0 - 2.0 * dx * bessel_i(1, xc)) / bessel_i(0, xc) < 1e-10);
    const double jump1 = bessel_i(1, xc + dx) - bessel_i(1, xc - dx);
    const double di1 = bessel_i(0, xc) - bessel_i(1, xc) / xc;
    CHECK(std::abs(jump1 - 2.0 * dx * di1) / bessel_i(1, xc) < 1e-10);
}

TEST_CASE("d/dx I_0 = I_1 by central differences") {
    for (int i = 0; i < 20; ++i) {
        const double x = 0.1 + (50.0 - 0.1) * i / 19.0;
        const double h = 1e-6 * (1.0 + x);
        const double dd = (bessel_i(0, x + h) - bessel_i(0, x - h)) / (2.0 * h);
        CHECK(dd == doctest::Approx(bessel_i(1, x)).epsilon(1e-6));
    }
}

TEST_CASE("rho normalization: atom + integral = 1") {
    for (double a : {0.5, 1.0, 2.0})
        for (double u : {0.5, 1.0, 2.0}) {
            QuadOptions opts;
            opts.abs_tol = 1e-12;
            opts.rel_tol = 1e-10;
            const double mass =
                integrate_to_infinity([&](double y) { return rho_density(a, u, y); }, 0.0, opts)
                    .value;
            CHECK(std::exp(-u / a) + mass == doctest::Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("rho Laplace transform matches the compound-Poisson closed form") {
    for (double a : {0.5, 1.0, 2.0})
        for (double u : {0.5, 1.0, 2.0})
            for (double beta : {0.5, 1.0, 2.0}) {
                QuadOptions opts;
                opts.abs_tol = 1e-12;
                opts.rel_tol = 1e-10;
                const double lap =
                    std::exp(-u / a) +
                    integrate_to_infinity(
                        [&](double y) { return std::exp(-beta * y) * rho_density(a, u, y); },
                        0.0, opts)
                        .value;
                CHECK(lap ==
                      doctest::Approx(std::exp(-u * beta / (1.0 + beta * a))).epsilon(1e-8));
            }
    // the printed target at (1,1,1)
    CHECK(std::exp(-1.0 / (1.0 + 1.0)) == doctest::Approx(0.6065306597126334));
}

TEST_CASE("kernel bounds with the fitted constant") {
    const double c = bessel_bound_constant();
    CHECK(c >= 1.0);
    for (double a : {0.5, 1.0, 4.0})
        for (double u : {0.25, 1.0, 3.0})
            for (double y : {1e-4, 0.1, 1.0, 10.0, 100.0}) {
                CHECK(rho_density(a, u, y) <= 2.0 * c * u / (a * a) * (1.0 + 1e-12));
                CHECK(rho_tilde_density(a, u, y) <= c * (1.0 + 1e-12));
            }
}

TEST_CASE("rho_tilde limits") {
    // fixed (u, y), a -> inf: converges to 1
    for (double a : {10.0, 100.0, 1000.0})
        CHECK(std::abs(rho_tilde_density(a, 1.0, 1.0) - 1.0) < 5.0 / a);
    // (1/a) integral rho~ = 1
    QuadOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    const double mass =
        integrate_to_infinity([&](double y) { return rho_tilde_density(1.0, 1.0, y); }, 0.0,
                              opts)
            .value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rho vanishes as u -> 0 with y, a fixed") {
    CHECK(rho_density(1.0, 1e-12, 1.0) < 1e-5);
    CHECK(rho_density(1.0, 1e-8, 1.0) < rho_density(1.0, 1e-4, 1.0));
}
