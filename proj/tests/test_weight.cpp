#include <doctest.h>

#include <cmath>

#include "gendiff/errors.hpp"
#include "gendiff/quadrature.hpp"
#include "gendiff/weight.hpp"

using namespace gendiff;

TEST_CASE("exponential weight closed forms") {
    Weight f = Weight::exponential(2.0);
    CHECK(f(0.0) == 1.0);
    CHECK(f.total() == doctest::Approx(0.5));
    CHECK(f.tail(1.0) == doctest::Approx(std::exp(-2.0) / 2.0));
    // int e^{-r u} f(s + u) du = e^{-cs}/(c + r)
    CHECK(f.exp_tail(0.5, 3.0) == doctest::Approx(std::exp(-1.0) / 5.0));
    CHECK(f.normalized().total() == doctest::Approx(1.0));
}

TEST_CASE("indicator weight is handled symbolically") {
    Weight f = Weight::indicator_at_zero();
    CHECK(f(0.0) == 1.0);
    CHECK(f(1e-12) == 0.0);
    CHECK(f.total() == 0.0);
    CHECK(f.exp_tail(0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(f.normalized(), SpecError);
    Rng rng(1, 1);
    CHECK_THROWS_AS(f.sample(rng), SpecError);
}

TEST_CASE("tabulated weight: exact piecewise integrals") {
    // triangle on [0, 2]
    Weight f = Weight::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    CHECK(f.total() == doctest::Approx(1.0));
    CHECK(f(0.5) == doctest::Approx(0.5));
    CHECK(f(1.5) == doctest::Approx(0.5));
    CHECK(f(2.5) == 0.0);
    CHECK(f.tail(1.0) == doctest::Approx(0.5));

    // exp_tail against quadrature
    for (double shift : {0.0, 0.4, 1.3})
        for (double rate : {0.0, 0.7, 2.0}) {
            QuadOptions opts;
            opts.abs_tol = 1e-13;
            opts.rel_tol = 1e-12;
            const double oracle =
                integrate([&](double u) { return std::exp(-rate * u) * f(shift + u); }, 0.0,
                          3.0, opts)
                    .value;
            CHECK(f.exp_tail(shift, rate) == doctest::Approx(oracle).epsilon(1e-10));
        }
}

TEST_CASE("tail integral by parts identity") {
    // int_0^inf e^{-ru} f(s+u) du = tail(s) - r int_0^inf e^{-ru} tail(s+u) du
    Weight f = Weight::tabulated({0.0, 1.0, 2.0}, {0.5, 1.0, 0.0});
    const double s = 0.3, r = 1.7;
    QuadOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-12;
    const double rhs =
        f.tail(s) -
        r * integrate([&](double u) { return std::exp(-r * u) * f.tail(s + u); }, 0.0, 3.0,
                      opts)
                .value;
    CHECK(f.exp_tail(s, r) == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("weight sampling matches the density") {
    Weight f = Weight::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    Rng rng(42, 0);
    const int n = 20000;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += f.sample(rng);
    mean /= n;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02)); // symmetric triangle
    Weight e = Weight::exponential(2.0);
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) m2 += e.sample(rng);
    CHECK(m2 / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("tabulated weight validation") {
    CHECK_THROWS_AS(Weight::tabulated({0.0}, {1.0}), SpecError);
    CHECK_THROWS_AS(Weight::tabulated({0.0, 1.0}, {1.0, -0.5}), SpecError);
    CHECK_THROWS_AS(Weight::tabulated({1.0, 0.5}, {1.0, 1.0}), SpecError);
    CHECK_THROWS_AS(Weight::exponential(0.0), SpecError);
}
