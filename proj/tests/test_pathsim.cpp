#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "gendiff/errors.hpp"
#include "gendiff/laws.hpp"
#include "gendiff/pathsim.hpp"

using namespace gendiff;

namespace {

const DiffusionSpec& rbm() {
    static DiffusionSpec s = build_spec(SpeedMeasure::reflected_bm());
    return s;
}

} // namespace

TEST_CASE("zero horizon gives an empty path") {
    SimConfig cfg;
    cfg.horizon = 0.0;
    Path p = simulate(rbm(), cfg);
    REQUIRE(p.times.size() == 1);
    CHECK(p.times[0] == 0.0);
    CHECK(p.lt_zero[0] == 0.0);
}

TEST_CASE("path invariants: positions in range, local times nondecreasing") {
    SimConfig cfg;
    cfg.x0 = 0.5;
    cfg.horizon = 2.0;
    cfg.dt = 1e-3;
    cfg.tracked_levels = {1.0};
    cfg.seed = 5;
    Path p = simulate(rbm(), cfg);
    REQUIRE(p.times.size() > 100);
    for (std::size_t k = 1; k < p.times.size(); ++k) {
        CHECK(p.times[k] > p.times[k - 1]);
        CHECK(p.positions[k] >= 0.0);
        CHECK(p.lt_zero[k] >= p.lt_zero[k - 1]);
        CHECK(p.lt_levels[0][k] >= p.lt_levels[0][k - 1]);
    }
    // local time at 0 only accrues inside the band: check via increments
    for (std::size_t k = 1; k < p.times.size(); ++k)
        if (p.lt_zero[k] > p.lt_zero[k - 1])
            CHECK(std::min(p.positions[k - 1], p.positions[k]) <=
                  cfg.band_eps0 * std::sqrt(cfg.dt) * (1.0 + 1e-12));
}

TEST_CASE("simulate is reproducible bit for bit") {
    SimConfig cfg;
    cfg.x0 = 0.0;
    cfg.horizon = 1.0;
    cfg.dt = 1e-3;
    cfg.seed = 17;
    Path a = simulate(rbm(), cfg);
    Path b = simulate(rbm(), cfg);
    REQUIRE(a.positions.size() == b.positions.size());
    for (std::size_t k = 0; k < a.positions.size(); ++k) {
        CHECK(a.positions[k] == b.positions[k]);
        CHECK(a.lt_zero[k] == b.lt_zero[k]);
    }
}

TEST_CASE("mc_expect is deterministic across worker counts") {
    auto fn = [&](std::uint64_t, Rng& rng) {
        Simulator sim(rbm(), 0.0, 1e-3, rng);
        sim.run_to(0.5);
        return sim.lt_zero() + sim.x();
    };
    McOptions one;
    one.threads = 1;
    McOptions four;
    four.threads = 4;
    MCEstimate a = mc_expect(fn, 4000, 99, one);
    MCEstimate b = mc_expect(fn, 4000, 99, four);
    CHECK(a.mean == b.mean);         // bitwise
    CHECK(a.std_error == b.std_error);
    CHECK(a.n_samples == b.n_samples);
}

TEST_CASE("mc_expect of a constant and its failure policy") {
    auto est = mc_expect([](std::uint64_t, Rng&) { return 1.0; }, 1000, 1, {});
    CHECK(est.mean == 1.0);
    CHECK(est.std_error == 0.0);

    // > 0.1% failing paths aborts the estimate
    CHECK_THROWS_AS(mc_expect(
                        [](std::uint64_t i, Rng&) -> double {
                            if (i % 100 == 0) throw PathError("bad path");
                            return 1.0;
                        },
                        2000, 1, {}),
                    NonConvergence);
}

TEST_CASE("exponential clock realizations have mean 1/q") {
    const double q = 2.0;
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 1.0;
    cfg.seed = 3;
    Accumulator acc;
    for (std::uint64_t i = 0; i < 4000; ++i)
        acc.add(sample_clock(rbm(), 0.0, ClockSpec::exponential(q), cfg, i).time);
    CHECK(std::abs(acc.mean() - 0.5) <= 3.0 * acc.std_error());
}

TEST_CASE("clock ordering: eta^a_u fires after T_a on the same stream") {
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng rng_hit(11, i);
        Simulator sim_hit(rbm(), 0.5, 1e-3, rng_hit, {1.0});
        auto hit = sim_hit.run_to_hitting(1.0, 1 << 12);
        REQUIRE_FALSE(hit.exhausted);

        Rng rng_ilt(11, i);
        Simulator sim_ilt(rbm(), 0.5, 1e-3, rng_ilt, {1.0});
        auto ilt = sim_ilt.run_to_ilt(1.0, 0.5, 1 << 12);
        REQUIRE_FALSE(ilt.exhausted);
        CHECK(ilt.time >= hit.time);
    }
}

TEST_CASE("budget exhaustion is reported distinctly") {
    Rng rng(1, 1);
    Simulator sim(rbm(), 0.0, 1e-3, rng);
    auto hit = sim.run_to_hitting(50.0, 0.25); // nowhere near reachable
    CHECK(hit.exhausted);
    CHECK(hit.time >= 0.25);
}

TEST_CASE("hitting times from 0 match the reflection series") {
    // P_0(T_a > t) = (4/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 t/(8a^2))
    const double a = 1.0;
    auto survival = [&](double t) {
        double s = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double lam = (2 * k + 1) * (2 * k + 1) * M_PI * M_PI / (8.0 * a * a);
            s += ((k % 2 == 0) ? 1.0 : -1.0) / (2 * k + 1) * std::exp(-lam * t);
        }
        return 4.0 / M_PI * s;
    };
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 1.0;
    cfg.seed = 23;
    std::vector<double> samples;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        auto r = sample_clock(rbm(), 0.0, ClockSpec::hitting(a), cfg, i);
        REQUIRE_FALSE(r.exhausted);
        samples.push_back(r.time);
    }
    auto ks = ks_test(samples, [&](double t) { return 1.0 - survival(t); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("local time at the inverse clock matches the compound-Poisson law") {
    const double a = 1.0, u = 1.0;
    SimConfig cfg;
    cfg.dt = 2.5e-4;
    cfg.horizon = 16384.0; // budget auto-extends to 4096x this; sqrt tails need room
    cfg.seed = 31;
    std::vector<double> sim_samples;
    int exhausted = 0;
    for (std::uint64_t i = 0; i < 3000; ++i) {
        auto r = sample_clock(rbm(), a, ClockSpec::inverse_local_time(a, u), cfg, i);
        if (r.exhausted) { ++exhausted; continue; }
        sim_samples.push_back(r.lt_zero_at_clock);
    }
    CHECK(exhausted < 6);
    LocalTimeLaw law = law_inverse_lt_clock(a, u);
    std::vector<double> law_samples;
    Rng rng(32, 0);
    for (int i = 0; i < 3000; ++i) law_samples.push_back(law.sample(rng));
    auto ks = ks_two_sample(sim_samples, {}, law_samples, {});
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("E[L_1] approaches sqrt(2/pi) as dt shrinks") {
    const double target = std::sqrt(2.0 / M_PI);
    double prev_gap = kInf, prev_se = 0.0;
    for (double dt : {4e-3, 1e-3, 2.5e-4}) {
        auto est = mc_expect(
            [&](std::uint64_t, Rng& rng) {
                Simulator sim(rbm(), 0.0, dt, rng);
                sim.run_to(1.0);
                return sim.lt_zero();
            },
            30000, 41, {});
        const double gap = std::abs(est.mean - target);
        CHECK(gap <= prev_gap + 3.0 * (est.std_error + prev_se));
        prev_gap = gap;
        prev_se = est.std_error;
    }
    CHECK(prev_gap <= 4.0 * prev_se + 2e-3);
}

TEST_CASE("simulation rejections") {
    auto atomic = build_spec(SpeedMeasure::exp_decay().with_atoms({{0.5, 1.0}}));
    SimConfig cfg;
    CHECK_THROWS_AS(simulate(atomic, cfg), SpecError);

    // density vanishing at the origin (Bessel alpha < 1/2)
    auto thin = build_spec(SpeedMeasure::bessel(0.25));
    CHECK_THROWS_AS(simulate(thin, cfg), SpecError);

    cfg.dt = -1.0;
    CHECK_THROWS_AS(simulate(rbm(), cfg), SpecError);
}
