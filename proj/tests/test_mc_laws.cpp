#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "gendiff/laws.hpp"
#include "gendiff/errors.hpp"
#include "gendiff/quadrature.hpp"
#include "gendiff/martingales.hpp"
#include "gendiff/pathsim.hpp"

using namespace gendiff;

// Monte-Carlo cross-checks of the closed-form laws. Sizes default to a fast
// profile; GENDIFF_TEST_FULL=1 switches to the spec-scale parameters
// (n = 1e5, dt = 1e-4).
namespace {

bool full_profile() {
    const char* env = std::getenv("GENDIFF_TEST_FULL");
    return env && env[0] == '1';
}
std::uint64_t paths(std::uint64_t fast) { return full_profile() ? 100000 : fast; }
double step() { return full_profile() ? 1e-4 : 2e-4; }

const DiffusionSpec& rbm() {
    static DiffusionSpec s = build_spec(SpeedMeasure::reflected_bm());
    return s;
}
const DiffusionSpec& exp_decay_spec() {
    static DiffusionSpec s = build_spec(SpeedMeasure::exp_decay());
    return s;
}

void check_within(const MCEstimate& est, double target, double k = 3.0) {
    CHECK(std::abs(est.mean - target) <= k * est.std_error);
}

} // namespace

TEST_CASE("exponential-clock law vs simulation") {
    const double q = 1.0;
    auto sol = solve_eigen(rbm(), q);
    const Weight f = Weight::exponential(1.0);
    for (double x : {0.0, 1.0}) {
        const double target = law_exp_clock(rbm(), sol, f, x);
        auto est = mc_expect(
            [&](std::uint64_t, Rng& rng) {
                const double eq = rng.exponential(q);
                Simulator sim(rbm(), x, step(), rng);
                sim.run_to(eq);
                return f(sim.lt_zero());
            },
            paths(20000), 1001, {});
        check_within(est, target);
    }
}

TEST_CASE("hitting-clock law vs simulation") {
    const Weight f = Weight::exponential(1.0);
    const double a = 2.0, x = 1.0;
    const double target = law_hitting_clock(rbm(), f, x, a).value;
    auto est = mc_expect(
        [&](std::uint64_t, Rng& rng) {
            Simulator sim(rbm(), x, step(), rng);
            auto hit = sim.run_to_hitting(a, 1 << 16);
            if (hit.exhausted) throw PathError("budget");
            return f(sim.lt_zero_at_last_clock());
        },
        paths(20000), 1003, {});
    check_within(est, target);
}

TEST_CASE("inverse-local-time laws vs simulation") {
    const Weight f = Weight::exponential(1.0);
    const double a = 1.0, u = 1.0;
    // started at a
    {
        LocalTimeLaw law = law_inverse_lt_clock(a, u);
        const double target = law.atom_at_zero() * f.f0() + [&] {
            QuadOptions opts;
            return integrate_to_infinity([&](double y) { return f(y) * law.density(y); },
                                         0.0, opts)
                .value;
        }();
        auto est = mc_expect(
            [&](std::uint64_t, Rng& rng) {
                Simulator sim(rbm(), a, step(), rng, {a});
                auto hit = sim.run_to_ilt(a, u, 1 << 26);
                if (hit.exhausted) throw PathError("budget");
                return f(sim.lt_zero_at_last_clock());
            },
            paths(20000), 1005, {});
        check_within(est, target);
    }
    // started strictly below a
    {
        const double x = 0.4;
        const double target = law_inverse_lt_clock_from_x(rbm(), x, a, u, f);
        auto est = mc_expect(
            [&](std::uint64_t, Rng& rng) {
                Simulator sim(rbm(), x, step(), rng, {a});
                auto hit = sim.run_to_ilt(a, u, 1 << 26);
                if (hit.exhausted) throw PathError("budget");
                return f(sim.lt_zero_at_last_clock());
            },
            paths(20000), 1007, {});
        check_within(est, target);
    }
}

TEST_CASE("Revuz consistency: discounted local time matches the resolvent") {
    const double q = 1.0, x = 0.7;
    auto sol = solve_eigen(rbm(), q);
    const double target = sol.resolvent(x, 0.0);
    auto est = mc_expect(
        [&](std::uint64_t, Rng& rng) {
            Simulator sim(rbm(), x, step(), rng);
            sim.set_discount(q);
            sim.run_to(14.0);
            return sim.discounted_lt_zero();
        },
        paths(20000), 1009, {});
    check_within(est, target);
}

TEST_CASE("Laplace exponent of the inverse local time at 0") {
    const double q = 1.0, u = 0.5;
    auto sol = solve_eigen(rbm(), q);
    const double target = std::exp(-u / sol.H);
    auto est = mc_expect(
        [&](std::uint64_t, Rng& rng) {
            Simulator sim(rbm(), 0.0, step(), rng);
            auto hit = sim.run_to_ilt(0.0, u, 1 << 26);
            // exhausted paths contribute e^{-q * huge} = 0
            return hit.exhausted ? 0.0 : std::exp(-q * hit.time);
        },
        paths(20000), 1011, {});
    check_within(est, target);
}

TEST_CASE("green occupation vs a growing-horizon simulation") {
    const Weight f = Weight::exponential(1.0);
    const double x = 1.0;
    const double target = green_occupation(exp_decay_spec(), f, x);
    double prev_gap = kInf;
    MCEstimate last{};
    for (double horizon : {10.0, 30.0}) {
        last = mc_expect(
            [&](std::uint64_t, Rng& rng) {
                Simulator sim(exp_decay_spec(), x, full_profile() ? 2e-4 : 1e-3, rng);
                sim.enable_compensator(&f);
                sim.run_to(horizon);
                return sim.compensator();
            },
            paths(4000), 1013, {});
        const double gap = std::abs(last.mean - target);
        CHECK(gap <= prev_gap + 3.0 * last.std_error); // monotone truncation
        prev_gap = gap;
    }
    check_within(last, target);
}

TEST_CASE("total local time law on a transient spec vs simulation") {
    auto spec = build_spec(SpeedMeasure::edge_blowup(2.0, 2.0, 1.0));
    const Weight f = Weight::exponential(1.0);
    const double x = 0.3;
    const double target = law_L_infty(spec, f, x);
    double prev_gap = kInf;
    MCEstimate last{};
    for (double horizon : {30.0, 90.0}) {
        last = mc_expect(
            [&](std::uint64_t, Rng& rng) {
                Simulator sim(spec, x, full_profile() ? 2e-4 : 1e-3, rng);
                sim.run_to(horizon);
                return f(sim.lt_zero());
            },
            paths(4000), 1015, {});
        const double gap = std::abs(last.mean - target);
        CHECK(gap <= prev_gap + 3.0 * last.std_error);
        prev_gap = gap;
    }
    check_within(last, target, 4.0); // truncation leaves a small one-sided bias
}

TEST_CASE("martingale verification by Monte Carlo at small scale") {
    // theorem 1.4 clock: u upwards at fixed a, exponential weight
    VerifyConfig cfg;
    cfg.family = ClockFamily::IltUUp;
    cfg.beta = 1.0;
    cfg.a = 1.0;
    cfg.x0 = 0.0;
    cfg.t = 0.25;
    cfg.functional = BoundedFunctional::indicator_x_below(1.0);
    cfg.schedule = {1.0, 2.0, 4.0};
    cfg.n_paths = paths(8000);
    cfg.dt = step();
    cfg.seed = 1017;
    auto rep = verify_penalization_limit(rbm(), cfg);
    CHECK(rep.final_within);
    CHECK(rep.shrinking);
}
