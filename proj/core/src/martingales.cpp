#include "gendiff/martingales.hpp"

#include <cmath>
#include <sstream>

#include "gendiff/errors.hpp"

namespace gendiff {

namespace {

double scaled_tail(const DiffusionSpec& spec, const Weight& f, double x, double l) {
    const double ell = spec.ell();
    const double rate = std::isfinite(ell) ? 1.0 / ell : 0.0;
    const double factor = std::isfinite(ell) ? 1.0 - x / ell : 1.0;
    return factor * f.exp_tail(l, rate);
}

} // namespace

double eval_N_h0f(const DiffusionSpec& spec, const Weight& f, double x, double l) {
    return h0(spec, x) * f(l) + scaled_tail(spec, f, x, l);
}

double eval_M_h0f(const DiffusionSpec& spec, const Weight& f, double x, double l,
                  double compensator) {
    return eval_N_h0f(spec, f, x, l) + spec.pi0 * compensator;
}

double eval_M_sf(const DiffusionSpec& spec, const Weight& f, double x, double l) {
    if (!is_inaccessible(spec.boundary_class))
        throw SpecError("M^{s,f} requires an entrance or natural right boundary");
    return x * f(l) + scaled_tail(spec, f, x, l);
}

double eval_M_beta_a(double beta, double a, double x, double l, double la) {
    if (!(beta > 0.0) || !(a > 0.0)) throw SpecError("M^{beta,a} needs beta, a > 0");
    return (1.0 + beta * std::min(x, a)) / (1.0 + beta * a) *
           std::exp(-beta * l + beta / (1.0 + beta * a) * la);
}

double eval_M_inf_a(double a, double x, double la, bool t0_passed) {
    if (!(a > 0.0)) throw SpecError("M^{inf,a} needs a > 0");
    if (t0_passed) return 0.0;
    return std::min(x, a) / a * std::exp(la / a);
}

double BoundedFunctional::operator()(double x, double l) const {
    switch (kind) {
        case Kind::One: return 1.0;
        case Kind::IndicatorXBelow: return x < param ? 1.0 : 0.0;
        case Kind::IndicatorXAbove: return x > param ? 1.0 : 0.0;
        case Kind::ExpMinusL: return std::exp(-l);
        case Kind::IndicatorLBelow: return l < param ? 1.0 : 0.0;
    }
    return 1.0;
}

namespace {

// E[F_t M_t] for the limit martingale of the family. F = 1 uses the
// martingale property (E[M_t] = M_0, exact); otherwise Monte Carlo.
MCEstimate target_expectation(const DiffusionSpec& spec, const VerifyConfig& cfg) {
    McOptions mc;
    mc.threads = cfg.threads;
    const bool trivial_f = cfg.functional.kind == BoundedFunctional::Kind::One;
    switch (cfg.family) {
        case ClockFamily::ExponentialQDown: {
            if (trivial_f) return {eval_N_h0f(spec, cfg.f, cfg.x0, 0.0), 0.0, 0, cfg.seed};
            return mc_expect(
                [&](std::uint64_t, Rng& rng) {
                    Simulator sim(spec, cfg.x0, cfg.dt, rng, {}, cfg.band_eps0);
                    sim.enable_compensator(&cfg.f);
                    sim.run_to(cfg.t);
                    const double F = cfg.functional(sim.x(), sim.lt_zero());
                    return F * eval_M_h0f(spec, cfg.f, sim.x(), sim.lt_zero(),
                                          sim.compensator());
                },
                cfg.n_paths, cfg.seed + 0x51ed, mc);
        }
        case ClockFamily::HittingAUp:
        case ClockFamily::IltAUp: {
            if (trivial_f) return {eval_M_sf(spec, cfg.f, cfg.x0, 0.0), 0.0, 0, cfg.seed};
            return mc_expect(
                [&](std::uint64_t, Rng& rng) {
                    Simulator sim(spec, cfg.x0, cfg.dt, rng, {}, cfg.band_eps0);
                    sim.run_to(cfg.t);
                    const double F = cfg.functional(sim.x(), sim.lt_zero());
                    return F * eval_M_sf(spec, cfg.f, sim.x(), sim.lt_zero());
                },
                cfg.n_paths, cfg.seed + 0x51ed, mc);
        }
        case ClockFamily::IltUUp: {
            if (trivial_f)
                return {eval_M_beta_a(cfg.beta, cfg.a, cfg.x0, 0.0, 0.0), 0.0, 0, cfg.seed};
            return mc_expect(
                [&](std::uint64_t, Rng& rng) {
                    Simulator sim(spec, cfg.x0, cfg.dt, rng, {cfg.a}, cfg.band_eps0);
                    sim.run_to(cfg.t);
                    const double F = cfg.functional(sim.x(), sim.lt_zero());
                    return F * eval_M_beta_a(cfg.beta, cfg.a, sim.x(), sim.lt_zero(),
                                             sim.lt(cfg.a));
                },
                cfg.n_paths, cfg.seed + 0x51ed, mc);
        }
    }
    throw SpecError("unknown clock family");
}

MCEstimate weighted_estimate(const DiffusionSpec& spec, const VerifyConfig& cfg,
                             double lambda, std::uint64_t seed_shift) {
    McOptions mc;
    mc.threads = cfg.threads;
    const std::uint64_t seed = cfg.seed + seed_shift;
    // hitting times have exponential tails on the diffusive scale a^2; the
    // inverse-local-time clocks have sqrt tails, so their budget is generous
    // (strides make long quiet stretches nearly free)
    double budget = 4096.0 * std::max(1.0, cfg.t);
    if (cfg.family == ClockFamily::HittingAUp)
        budget = 4096.0 * std::max({1.0, cfg.t, lambda * lambda});
    if (cfg.family == ClockFamily::IltAUp || cfg.family == ClockFamily::IltUUp)
        budget = 6.7e7 * std::max(1.0, cfg.t);
    switch (cfg.family) {
        case ClockFamily::ExponentialQDown: {
            const double q = lambda;
            auto sol = solve_eigen(spec, q);
            if (cfg.functional.kind == BoundedFunctional::Kind::One) {
                // closed-form route through the laws layer
                return {sol.H * law_exp_clock(spec, sol, cfg.f, cfg.x0), 0.0, 0, seed};
            }
            const double H = sol.H;
            return mc_expect(
                [&, H, q](std::uint64_t, Rng& rng) {
                    const double eq = rng.exponential(q);
                    Simulator sim(spec, cfg.x0, cfg.dt, rng, {}, cfg.band_eps0);
                    double F, l_clock;
                    if (eq <= cfg.t) {
                        sim.run_to(eq);
                        l_clock = sim.lt_zero();
                        sim.run_to(cfg.t);
                        F = cfg.functional(sim.x(), sim.lt_zero());
                    } else {
                        sim.run_to(cfg.t);
                        F = cfg.functional(sim.x(), sim.lt_zero());
                        sim.run_to(eq);
                        l_clock = sim.lt_zero();
                    }
                    return H * F * cfg.f(l_clock);
                },
                cfg.n_paths, seed, mc);
        }
        case ClockFamily::HittingAUp: {
            const double a = lambda;
            return mc_expect(
                [&, a](std::uint64_t, Rng& rng) {
                    Simulator sim(spec, cfg.x0, cfg.dt, rng, {}, cfg.band_eps0);
                    sim.arm_hitting(a);
                    sim.run_to(cfg.t);
                    const double F = cfg.functional(sim.x(), sim.lt_zero());
                    if (!sim.clock_fired() && !sim.run_until_clock(budget))
                        throw PathError("hitting clock exhausted its budget");
                    return a * F * cfg.f(sim.clock_lt0());
                },
                cfg.n_paths, seed, mc);
        }
        case ClockFamily::IltAUp: {
            const double a = lambda;
            return mc_expect(
                [&, a](std::uint64_t, Rng& rng) {
                    Simulator sim(spec, cfg.x0, cfg.dt, rng, {a}, cfg.band_eps0);
                    sim.arm_ilt(a, cfg.u);
                    sim.run_to(cfg.t);
                    const double F = cfg.functional(sim.x(), sim.lt_zero());
                    if (!sim.clock_fired() && !sim.run_until_clock(budget))
                        throw PathError("inverse local time clock exhausted its budget");
                    return a * F * cfg.f(sim.clock_lt0());
                },
                cfg.n_paths, seed, mc);
        }
        case ClockFamily::IltUUp: {
            const double u = lambda;
            const double norm = std::exp(cfg.beta * u / (1.0 + cfg.beta * cfg.a));
            return mc_expect(
                [&, u, norm](std::uint64_t, Rng& rng) {
                    Simulator sim(spec, cfg.x0, cfg.dt, rng, {cfg.a}, cfg.band_eps0);
                    sim.arm_ilt(cfg.a, u);
                    sim.run_to(cfg.t);
                    const double F = cfg.functional(sim.x(), sim.lt_zero());
                    if (!sim.clock_fired() && !sim.run_until_clock(budget))
                        throw PathError("inverse local time clock exhausted its budget");
                    return norm * F * std::exp(-cfg.beta * sim.clock_lt0());
                },
                cfg.n_paths, seed, mc);
        }
    }
    throw SpecError("unknown clock family");
}

} // namespace

ConvergenceReport verify_penalization_limit(const DiffusionSpec& spec,
                                            const VerifyConfig& cfg) {
    if (cfg.schedule.empty()) throw SpecError("verify: empty schedule");
    for (std::size_t i = 1; i < cfg.schedule.size(); ++i) {
        const bool down = cfg.family == ClockFamily::ExponentialQDown;
        if (down ? !(cfg.schedule[i] < cfg.schedule[i - 1])
                 : !(cfg.schedule[i] > cfg.schedule[i - 1]))
            throw SpecError("verify: schedule must be monotone in the clock direction");
    }

    ConvergenceReport rep;
    MCEstimate target = target_expectation(spec, cfg);
    rep.target = target.mean;
    rep.target_std_error = target.std_error;

    for (std::size_t i = 0; i < cfg.schedule.size(); ++i) {
        MCEstimate est = weighted_estimate(spec, cfg, cfg.schedule[i], 0x100 * (i + 1));
        VerifyRow row;
        row.lambda = cfg.schedule[i];
        row.estimate = est.mean;
        row.std_error = est.std_error;
        row.gap = std::abs(est.mean - target.mean);
        const double comb = std::sqrt(est.std_error * est.std_error +
                                      target.std_error * target.std_error);
        // noise-free (closed form) routes are judged against an absolute gap
        row.within = comb > 0.0 ? row.gap <= 3.0 * comb : row.gap <= cfg.analytic_tol;
        rep.rows.push_back(row);
    }

    rep.shrinking = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        const double noise = 3.0 * (rep.rows[i].std_error + rep.rows[i - 1].std_error +
                                    rep.target_std_error);
        if (rep.rows[i].gap > rep.rows[i - 1].gap + noise) rep.shrinking = false;
    }
    rep.final_within = rep.rows.back().within;
    rep.pass = rep.shrinking && rep.final_within;

    std::ostringstream os;
    os << "target " << rep.target << " +- " << rep.target_std_error << "; rows:";
    for (const auto& r : rep.rows)
        os << " (" << r.lambda << ": " << r.estimate << " +- " << r.std_error << ", gap "
           << r.gap << ")";
    rep.detail = os.str();
    return rep;
}

} // namespace gendiff
