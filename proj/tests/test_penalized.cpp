#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "gendiff/errors.hpp"
#include "gendiff/penalized.hpp"

using namespace gendiff;

namespace {

bool full_profile() {
    const char* env = std::getenv("GENDIFF_TEST_FULL");
    return env && env[0] == '1';
}

const DiffusionSpec& rbm() {
    static DiffusionSpec s = build_spec(SpeedMeasure::reflected_bm());
    return s;
}
const DiffusionSpec& exp_decay_spec() {
    static DiffusionSpec s = build_spec(SpeedMeasure::exp_decay());
    return s;
}

} // namespace

TEST_CASE("transform closed forms on reflected BM, c = 1") {
    auto sol = solve_eigen(rbm(), 1.0);
    TransformedSpec tr = transform_spec(rbm(), sol, {HKind::Scale, 1.0});
    CHECK(tr.hc0() == doctest::Approx(1.0));
    for (double x : {0.0, 0.5, 2.0, 5.0}) {
        CHECK(tr.hc(x) == doctest::Approx(x + 1.0));
        CHECK(tr.m_hc_density(x) == doctest::Approx(2.0 * (x + 1.0) * (x + 1.0)));
        CHECK(tr.s_hc(x) == doctest::Approx(x / (x + 1.0)).epsilon(1e-10));
        CHECK(tr.s_hc_inverse(tr.s_hc(x)) == doctest::Approx(x).epsilon(1e-9));
    }
    CHECK(tr.phi_hc(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.rho_hc(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    // phi increasing, rho decreasing
    double prev_phi = 0.0, prev_rho = 2.0;
    for (double x = 0.0; x <= 6.0; x += 0.25) {
        const double p = tr.phi_hc(x), r = tr.rho_hc(x);
        CHECK(p > prev_phi);
        CHECK(r < prev_rho + 1e-12);
        prev_phi = p;
        prev_rho = r;
    }
}

TEST_CASE("transform rejections") {
    auto sol = solve_eigen(rbm(), 1.0);
    CHECK_THROWS_AS(transform_spec(rbm(), sol, {HKind::Scale, 1e-7}), SpecError);
    CHECK_THROWS_AS(transform_spec(rbm(), sol, {HKind::Scale, 0.0}), SpecError);
}

TEST_CASE("transformed resolvent values") {
    const double q = 1.0;
    auto sol = solve_eigen(rbm(), q);
    TransformedSpec tr = transform_spec(rbm(), sol, {HKind::Scale, 1.0});
    const double H = sol.H; // = 1/sqrt(2)
    CHECK(tr.resolvent_hc(0.0, 0.0) == doctest::Approx(H / (H + 1.0)).epsilon(1e-9));
    for (auto [x, y] : {std::pair{0.3, 1.9}, {1.0, 2.5}})
        CHECK(tr.resolvent_hc(x, y) == doctest::Approx(tr.resolvent_hc(y, x)).epsilon(1e-12));
}

TEST_CASE("two independent routes to the transformed eigenfunctions") {
    // route A: division formula; route B: solve on the transformed generator
    const double q = 1.0;

    SUBCASE("h = s on reflected BM") {
        auto sol = solve_eigen(rbm(), q);
        TransformedSpec tr = transform_spec(rbm(), sol, {HKind::Scale, 1.0});
        SolverMeasure sm = tr.to_solver_measure();
        GridPolicy pol;
        pol.n = 8192;
        pol.r_max = tr.s_hc(12.0);
        auto hat = solve_eigen_measure(sm, q, 0.0, kInf, pol);
        for (double x = 0.0; x <= 8.0; x += 0.5) {
            CHECK(hat.phi_at(tr.s_hc(x)) ==
                  doctest::Approx(tr.phi_hc(x)).epsilon(1e-6));
        }
    }

    SUBCASE("h = h0 with the killing term on the exp-decay spec") {
        auto sol = solve_eigen(exp_decay_spec(), q);
        TransformedSpec tr = transform_spec(exp_decay_spec(), sol, {HKind::H0, 1.0});
        CHECK(tr.killing_rate(0.0) == doctest::Approx(exp_decay_spec().pi0 / tr.hc(0.0)));
        SolverMeasure sm = tr.to_solver_measure();
        GridPolicy pol;
        pol.n = 8192;
        pol.r_max = tr.s_hc(10.0);
        auto hat = solve_eigen_measure(sm, q, 0.0, kInf, pol);
        for (double x = 0.0; x <= 6.0; x += 0.5) {
            CHECK(hat.phi_at(tr.s_hc(x)) ==
                  doctest::Approx(tr.phi_hc(x)).epsilon(1e-6));
        }
    }
}

TEST_CASE("decomposition sampler basics") {
    const Weight f = Weight::exponential(1.0);
    DecompositionConfig cfg;
    cfg.x0 = 0.0;
    cfg.t = 0.5;
    cfg.dt = 1e-3;
    cfg.seed = 7;

    int bridge = 0;
    double min_post = kInf;
    for (std::uint64_t i = 0; i < 400; ++i) {
        Rng rng(cfg.seed, i);
        auto s = sample_decomposition_state(rbm(), f, cfg, rng);
        if (s.bridge_branch) ++bridge;
        if (std::isfinite(s.g) && s.g > 0.0) min_post = std::min(min_post, s.min_post_g);
        CHECK(s.x_t >= 0.0);
    }
    CHECK(bridge == 400); // x0 = 0 always starts with the weighted bridge
    CHECK(min_post > 0.0);

    // the indicator weight has no density part to sample
    DecompositionConfig bad = cfg;
    Rng rng(1, 1);
    CHECK_THROWS_AS(sample_decomposition_state(rbm(), Weight::indicator_at_zero(), bad, rng),
                    SpecError);
}

TEST_CASE("Bessel(3) leg from 0 has the chi-3 mean") {
    // concentrate the threshold near 0 so g ~ 0 and the whole window is the
    // Bessel(3) leg: E[X_t] = 2 sqrt(2t/pi)
    Weight spike = Weight::tabulated({0.0, 0.01}, {1.0, 1.0});
    DecompositionConfig cfg;
    cfg.x0 = 0.0;
    cfg.t = 1.0;
    cfg.dt = 1e-3;
    cfg.seed = 9;
    Accumulator acc;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        Rng rng(cfg.seed, i);
        auto s = sample_decomposition_state(rbm(), spike, cfg, rng);
        REQUIRE(std::isfinite(s.g));
        acc.add(s.x_t);
    }
    const double target = 2.0 * std::sqrt(2.0 / M_PI); // g ~ 0, so duration ~ t = 1
    CHECK(std::abs(acc.mean() - target) <= 3.0 * acc.std_error() + 0.02);
}

TEST_CASE("full concatenated trajectory") {
    const Weight f = Weight::exponential(1.0);
    DecompositionConfig cfg;
    cfg.x0 = 1.0;
    cfg.t = 1.0;
    cfg.dt = 1e-3;
    cfg.seed = 11;
    for (std::uint64_t i = 0; i < 20; ++i) {
        Path p = sample_decomposition(rbm(), f, cfg, i);
        REQUIRE(p.times.size() > 10);
        for (std::size_t k = 1; k < p.times.size(); ++k) {
            CHECK(p.times[k] > p.times[k - 1]);
            CHECK(p.positions[k] >= 0.0);
            CHECK(p.lt_zero[k] >= p.lt_zero[k - 1]);
        }
        CHECK(p.times.back() == doctest::Approx(cfg.t).epsilon(1e-9));
    }
}

TEST_CASE("decomposition vs reweighting at small scale") {
    DecompositionConfig cfg;
    cfg.x0 = 0.0;
    cfg.t = 1.0;
    cfg.dt = full_profile() ? 1e-4 : 5e-4;
    cfg.n = full_profile() ? 10000 : 3000;
    cfg.seed = 13;
    auto rep = compare_decomposition_vs_reweighting(rbm(), Weight::exponential(1.0), cfg);
    CHECK(rep.ks_x.p_value > 0.01);
    CHECK(rep.ks_l.p_value > 0.01);
    CHECK(rep.min_post_g_positive);
    CHECK(std::abs(rep.mean_x_decomposition - rep.mean_x_reweighted) < 0.1);
    CHECK(rep.pass);
}

TEST_CASE("short horizons concentrate at the start point") {
    DecompositionConfig cfg;
    cfg.x0 = 1.0;
    cfg.t = 0.01;
    cfg.dt = 1e-4;
    cfg.n = 500;
    cfg.seed = 15;
    auto rep = compare_decomposition_vs_reweighting(rbm(), Weight::exponential(1.0), cfg);
    CHECK(rep.mean_x_decomposition == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rep.mean_x_reweighted == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("reweighting arm reports a starved effective sample size") {
    DecompositionConfig cfg;
    cfg.x0 = 0.0;
    cfg.t = 30.0; // heavy weight spread at long horizons
    cfg.dt = 2e-3;
    cfg.n = 600;
    cfg.seed = 17;
    CHECK_THROWS_AS(
        compare_decomposition_vs_reweighting(rbm(), Weight::exponential(1.0), cfg),
        NonConvergence);
}
