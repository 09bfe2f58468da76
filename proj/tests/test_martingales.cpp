#include <doctest.h>

#include <cmath>

#include "gendiff/errors.hpp"
#include "gendiff/martingales.hpp"

using namespace gendiff;

namespace {

const DiffusionSpec& rbm() {
    static DiffusionSpec s = build_spec(SpeedMeasure::reflected_bm());
    return s;
}
const DiffusionSpec& exp_decay_spec() {
    static DiffusionSpec s = build_spec(SpeedMeasure::exp_decay());
    return s;
}

} // namespace

TEST_CASE("initial values of the limit martingales") {
    const Weight f = Weight::exponential(1.0); // int f = 1
    // N_0 at x = 0 is the full tail mass
    CHECK(eval_N_h0f(rbm(), f, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(eval_M_sf(rbm(), f, 0.0, 0.0) == doctest::Approx(1.0));
    // reflected BM state (X, L) = (1, 0): 1*1 + 1
    CHECK(eval_N_h0f(rbm(), f, 1.0, 0.0) == doctest::Approx(2.0));
    CHECK(eval_M_beta_a(1.0, 1.0, 0.0, 0.0, 0.0) == doctest::Approx(0.5));
    CHECK(eval_M_inf_a(2.0, 3.0, 0.0, false) == doctest::Approx(1.0)); // x >= a
    CHECK(eval_M_inf_a(2.0, 0.0, 0.0, true) == 0.0); // started at 0: instant hit
}

TEST_CASE("Doob-Meyer split holds pathwise by construction") {
    const Weight f = Weight::exponential(0.7);
    const auto& spec = exp_decay_spec();
    for (double x : {0.0, 0.5, 2.0})
        for (double l : {0.0, 0.3, 1.5})
            for (double comp : {0.0, 0.8}) {
                const double n = eval_N_h0f(spec, f, x, l);
                const double m = eval_M_h0f(spec, f, x, l, comp);
                CHECK(m - n == doctest::Approx(spec.pi0 * comp).epsilon(1e-14));
            }
}

TEST_CASE("Azema-Yor reduction when pi0 = 0") {
    const Weight f = Weight::exponential(1.3);
    for (double x : {0.0, 0.4, 1.7, 5.0})
        for (double l : {0.0, 0.2, 2.5}) {
            const double msf = eval_M_sf(rbm(), f, x, l);
            const double mh0 = eval_M_h0f(rbm(), f, x, l, 123.0); // compensator inert
            CHECK(std::abs(msf - mh0) <= 1e-12 * (1.0 + std::abs(msf)));
        }
}

TEST_CASE("beta -> infinity limit of M^{beta,a}") {
    // on {L_t = 0} the limit is M^{inf,a}; any positive L kills it
    const double a = 2.0, x = 1.2, la = 0.7;
    const double target = eval_M_inf_a(a, x, la, false);
    double prev = kInf;
    for (double beta : {10.0, 100.0, 1000.0}) {
        const double gap = std::abs(eval_M_beta_a(beta, a, x, 0.0, la) - target);
        CHECK(gap < prev + 1e-15);
        prev = gap;
    }
    CHECK(prev < 1e-3);
    CHECK(eval_M_beta_a(1000.0, a, x, 0.5, la) < 1e-100);
}

TEST_CASE("M^{s,f} is rejected outside its boundary scope") {
    auto truncated = build_spec(SpeedMeasure::tabulated({0.0, 1.0}, {2.0, 2.0}, 1.0, kInf));
    CHECK_THROWS_AS(eval_M_sf(truncated, Weight::exponential(1.0), 0.5, 0.0), SpecError);
}

TEST_CASE("bounded functional library") {
    CHECK(BoundedFunctional::one()(3.0, 5.0) == 1.0);
    CHECK(BoundedFunctional::indicator_x_below(1.0)(0.5, 0.0) == 1.0);
    CHECK(BoundedFunctional::indicator_x_below(1.0)(1.5, 0.0) == 0.0);
    CHECK(BoundedFunctional::indicator_x_above(1.0)(1.5, 0.0) == 1.0);
    CHECK(BoundedFunctional::exp_minus_l()(0.0, 2.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(BoundedFunctional::indicator_l_below(1.0)(0.0, 0.5) == 1.0);
}

TEST_CASE("closed-form route of the exponential-clock limit") {
    VerifyConfig cfg;
    cfg.family = ClockFamily::ExponentialQDown;
    cfg.f = Weight::exponential(1.0);
    cfg.x0 = 0.0;
    cfg.functional = BoundedFunctional::one();
    cfg.schedule = {1e-1, 1e-2, 1e-3};
    cfg.analytic_tol = 5e-2;
    auto rep = verify_penalization_limit(rbm(), cfg);
    CHECK(rep.target == doctest::Approx(1.0));
    // the sequence is H/(1+H) with H = 1/sqrt(2q)
    for (std::size_t i = 0; i < cfg.schedule.size(); ++i) {
        const double H = 1.0 / std::sqrt(2.0 * cfg.schedule[i]);
        CHECK(rep.rows[i].estimate == doctest::Approx(H / (1.0 + H)).epsilon(1e-7));
    }
    CHECK(rep.shrinking);
    CHECK(rep.pass);
}

TEST_CASE("hitting-clock weighted law grows to the full mass algebraically") {
    // a E_0[f(L_{T_a})] = 1/(beta + 1/a) increases to int f = 1/beta
    const double beta = 2.0;
    double prev = 0.0;
    for (double a : {1.0, 4.0, 16.0, 64.0}) {
        const double v =
            a * law_hitting_clock(rbm(), Weight::exponential(beta), 0.0, a).value;
        CHECK(v == doctest::Approx(1.0 / (beta + 1.0 / a)).epsilon(1e-12));
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("verify rejects bad schedules") {
    VerifyConfig cfg;
    cfg.family = ClockFamily::ExponentialQDown;
    cfg.schedule = {};
    CHECK_THROWS_AS(verify_penalization_limit(rbm(), cfg), SpecError);
    cfg.schedule = {1e-2, 1e-1}; // wrong direction for q down
    CHECK_THROWS_AS(verify_penalization_limit(rbm(), cfg), SpecError);
}
