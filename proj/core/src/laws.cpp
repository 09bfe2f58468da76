#include "gendiff/laws.hpp"

#include <cmath>

#include "gendiff/bessel.hpp"
#include "gendiff/errors.hpp"
#include "gendiff/quadrature.hpp"

namespace gendiff {

ClockSpec ClockSpec::exponential(double q) {
    if (!(q > 0.0)) throw SpecError("exponential clock needs q > 0");
    ClockSpec c;
    c.kind = Kind::Exponential;
    c.q = q;
    return c;
}

ClockSpec ClockSpec::hitting(double a) {
    if (!(a > 0.0)) throw SpecError("hitting clock needs a > 0");
    ClockSpec c;
    c.kind = Kind::Hitting;
    c.a = a;
    return c;
}

ClockSpec ClockSpec::inverse_local_time(double a, double u) {
    if (!(a >= 0.0) || !(u > 0.0)) throw SpecError("inverse local time clock needs a >= 0, u > 0");
    ClockSpec c;
    c.kind = Kind::InverseLocalTime;
    c.a = a;
    c.u = u;
    return c;
}

double law_exp_clock(const DiffusionSpec&, const EigenSolution& sol, const Weight& f,
                     double x) {
    const double hq = sol.h_q(x);
    const double ratio = sol.rho_at(x); // r_q(x,0)/r_q(0,0)
    const double lap = f.exp_tail(0.0, 1.0 / sol.H);
    return (hq * f.f0() + ratio * lap) / sol.H;
}

double law_L_infty(const DiffusionSpec& spec, const Weight& f, double x) {
    const double l = spec.ell();
    if (!std::isfinite(l)) throw SpecError("law_L_infty: 0 must be transient (ell < inf)");
    if (x < 0.0 || x > l) throw SpecError("law_L_infty: x outside [0, ell]");
    return (x * f.f0() + (1.0 - x / l) * f.exp_tail(0.0, 1.0 / l)) / l;
}

double green_occupation(const DiffusionSpec& spec, const Weight& f, double x) {
    if (!(spec.pi0 > 0.0))
        throw SpecError("green_occupation: 0 must be positive recurrent (pi0 > 0)");
    return (h0(spec, x) * f.f0() + f.total()) / spec.pi0;
}

HittingLawValue law_hitting_clock(const DiffusionSpec& spec, const Weight& f, double x,
                                  double a) {
    if (x < 0.0) throw SpecError("law_hitting_clock: x must be >= 0");
    if (!(a > 0.0) || a >= spec.ell()) throw SpecError("law_hitting_clock: need 0 < a < ell");
    if (a <= x) return {f.f0(), true}; // L_{T_a} = 0 on that path
    return {(x * f.f0() + (1.0 - x / a) * f.exp_tail(0.0, 1.0 / a)) / a, false};
}

LocalTimeLaw::LocalTimeLaw(double a, double u) : a_(a), u_(u), atom_(std::exp(-u / a)) {
    if (!(a > 0.0) || !(u > 0.0)) throw SpecError("LocalTimeLaw needs a > 0, u > 0");
}

double LocalTimeLaw::density(double y) const { return rho_density(a_, u_, y); }

double LocalTimeLaw::laplace(double beta) const {
    return std::exp(-u_ * beta / (1.0 + beta * a_));
}

double LocalTimeLaw::cdf(double y) const {
    if (y <= 0.0) return atom_;
    QuadOptions opts;
    opts.abs_tol = 1e-11;
    opts.rel_tol = 1e-9;
    return atom_ + integrate([&](double s) { return density(s); }, 0.0, y, opts).value;
}

double LocalTimeLaw::normalization() const {
    QuadOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    return atom_ + integrate_to_infinity([&](double s) { return density(s); }, 0.0, opts).value;
}

double LocalTimeLaw::sample(Rng& rng) const {
    // compound Poisson with Exp(1/a) jumps and jump rate u/a
    if (rng.uniform() <= atom_) return 0.0;
    // N >= 1 conditioned Poisson(u/a)
    const double lambda = u_ / a_;
    double p = std::exp(-lambda);
    const double v = p + rng.uniform() * (1.0 - p); // cdf position past the atom
    double cum = p;
    int n = 0;
    while (cum < v && n < 10000) {
        ++n;
        p *= lambda / n;
        cum += p;
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rng.exponential(1.0 / a_);
    return s;
}

LocalTimeLaw law_inverse_lt_clock(double a, double u) { return LocalTimeLaw(a, u); }

double law_inverse_lt_clock_from_x(const DiffusionSpec& spec, double x, double a, double u,
                                   const Weight& f) {
    if (std::isfinite(spec.ell()))
        throw SpecError("law_inverse_lt_clock_from_x: needs ell = inf");
    if (x < 0.0 || !(a > 0.0) || !(u > 0.0))
        throw SpecError("law_inverse_lt_clock_from_x: need x >= 0, a > 0, u > 0");
    LocalTimeLaw base(a, u);
    const double at_a = base.atom_at_zero() * f.f0() +
                        [&] {
                            QuadOptions opts;
                            opts.abs_tol = 1e-12;
                            opts.rel_tol = 1e-9;
                            return integrate_to_infinity(
                                       [&](double y) { return f(y) * base.density(y); }, 0.0,
                                       opts)
                                .value;
                        }();
    const double frac = std::min(x, a) / a;
    double tail_term = 0.0;
    if (x < a) {
        QuadOptions opts;
        opts.abs_tol = 1e-12;
        opts.rel_tol = 1e-9;
        tail_term = (1.0 - x / a) / a *
                    integrate_to_infinity(
                        [&](double y) { return f(y) * rho_tilde_density(a, u, y); }, 0.0, opts)
                        .value;
    }
    return frac * at_a + tail_term;
}

double TotalLocalTimeLaw::tail(double u) const {
    if (kind == Kind::DegenerateInfinity) return 1.0;
    return density.tail(u);
}

TotalLocalTimeLaw q_total_local_time(const DiffusionSpec& spec, HKind h, const Weight& f) {
    if (std::abs(f.total() - 1.0) > 1e-9)
        throw SpecError("q_total_local_time: f must integrate to 1");
    TotalLocalTimeLaw law;
    if (h == HKind::Scale || spec.pi0 == 0.0) {
        law.kind = TotalLocalTimeLaw::Kind::Density;
        law.density = f;
    } else {
        law.kind = TotalLocalTimeLaw::Kind::DegenerateInfinity;
    }
    return law;
}

TotalLocalTimeLaw q_total_local_time(const DiffusionSpec&, double beta, double a) {
    if (!(beta > 0.0) || !(a > 0.0)) throw SpecError("q_total_local_time: beta, a > 0");
    TotalLocalTimeLaw law;
    law.kind = TotalLocalTimeLaw::Kind::DegenerateInfinity;
    return law;
}

} // namespace gendiff
