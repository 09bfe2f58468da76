#include <doctest.h>

#include <cmath>

#include "gendiff/quadrature.hpp"

using namespace gendiff;

TEST_CASE("adaptive GK on smooth integrands") {
    auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    r = integrate([](double x) { return std::exp(-x); }, 0.0, 30.0);
    CHECK(r.value == doctest::Approx(1.0 - std::exp(-30.0)).epsilon(1e-11));
}

TEST_CASE("integrable endpoint behaviour") {
    // sqrt singularity in the derivative
    auto r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("improper integral over [0, inf)") {
    auto r = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));

    r = integrate_to_infinity([](double x) { return x * std::exp(-2.0 * x); }, 0.0);
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("tail certification: clear-cut families") {
    // geometric decay
    auto rep = classify_tail([](int k) { return std::pow(2.0, -k); });
    CHECK(rep.verdict == TailVerdict::Convergent);

    // constant window masses (log divergence)
    rep = classify_tail([](int) { return 0.7; });
    CHECK(rep.verdict == TailVerdict::Divergent);

    // growing masses
    rep = classify_tail([](int k) { return std::pow(2.0, k); });
    CHECK(rep.verdict == TailVerdict::Divergent);
}

TEST_CASE("tail certification: borderline exponents") {
    // integrand ~ 1/(x log^{4/3} x): window masses ~ k^{-4/3}, summable
    auto rep = classify_tail(
        [](int k) { return std::pow(static_cast<double>(k + 1), -4.0 / 3.0); });
    CHECK(rep.verdict == TailVerdict::Convergent);

    // integrand ~ 1/(x log x): masses ~ 1/k, not summable
    rep = classify_tail([](int k) { return 1.0 / (k + 1.0); });
    CHECK(rep.verdict == TailVerdict::Divergent);

    // in the declared grey zone the machinery must refuse to guess
    rep = classify_tail([](int k) { return std::pow(static_cast<double>(k + 1), -1.10); });
    CHECK(rep.verdict == TailVerdict::Undetermined);
}

TEST_CASE("tail certification respects the window budget") {
    TailOptions opts;
    opts.max_windows = 6; // too few windows to resolve a borderline decay
    auto rep = classify_tail(
        [](int k) { return std::pow(static_cast<double>(k + 1), -4.0 / 3.0); }, opts);
    CHECK(rep.verdict == TailVerdict::Undetermined);
}
