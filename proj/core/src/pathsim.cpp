#include "gendiff/pathsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gendiff/errors.hpp"

namespace gendiff {

namespace {

double sigma_of(const DiffusionSpec& spec, double x) {
    const double d = spec.measure.density(x);
    if (!(d > 0.0)) throw PathError("simulate: vanishing speed density at x=" + std::to_string(x));
    return std::sqrt(2.0 / d);
}

} // namespace

Simulator::Simulator(const DiffusionSpec& spec, double x0, double dt, Rng rng,
                     std::vector<double> tracked_levels, double band_eps0)
    : spec_(&spec), rng_(rng), dt_(dt) {
    if (!spec.measure.absolutely_continuous())
        throw SpecError("simulate: speed measures with atoms are not supported");
    if (!(dt > 0.0)) throw SpecError("simulate: dt must be > 0");
    if (x0 < 0.0 || x0 >= spec.ell()) throw SpecError("simulate: x0 outside [0, ell)");
    eps_ = band_eps0 * std::sqrt(dt);
    x_ = x0;
    const_sigma_ = spec.measure.kind() == SpeedMeasure::Kind::ReflectedBm;
    sigma0_ = const_sigma_ ? sigma_of(spec, 0.0) : 1.0;

    // reflecting dynamics need a density bounded away from 0 near the origin
    const double ref_x = std::min(1.0, 0.5 * spec.ell_prime());
    const double scale = spec.measure.mass(ref_x) / ref_x;
    if (!(spec.measure.density(eps_) > 1e-3 * scale))
        throw SpecError("simulate: speed density vanishes near the reflecting origin");

    // Light speed tails make the Euler dynamics explosive (sigma ~ 1/sqrt(m')
    // blows up where the process spends almost no time). Cap the state where
    // the measure keeps less than 1e-5 of its mass: the functionals read the
    // tail only through h0 and L, so the distortion is far below Monte-Carlo
    // resolution.
    if (std::isfinite(spec.m_infty) && std::isinf(spec.ell_prime())) {
        double lo = 1.0, hi = 2.0;
        while (spec.m_infty - spec.measure.mass(hi) > 1e-5 * spec.m_infty && hi < 1e9)
            hi *= 2.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (spec.m_infty - spec.measure.mass(mid) > 1e-5 * spec.m_infty)
                lo = mid;
            else
                hi = mid;
        }
        tail_cap_ = hi;
    }

    tracked_levels.insert(tracked_levels.begin(), 0.0);
    for (std::size_t i = 1; i < tracked_levels.size(); ++i)
        if (tracked_levels[i] <= 0.0) throw SpecError("tracked levels must be > 0");
    for (double lvl : tracked_levels) {
        Tracked tr;
        tr.level = lvl;
        const double lo = std::max(lvl - eps_, 0.0);
        const double hi = lvl + eps_;
        tr.band_mass = spec.measure.mass(hi) - (lo > 0.0 ? spec.measure.mass(lo) : 0.0);
        if (!(tr.band_mass > 0.0)) throw SpecError("simulate: empty band mass at tracked level");
        tr.hit = (lvl == x0); // local time accrues only once the level is visited
        tracked_.push_back(tr);
        lt_.push_back(0.0);
        level_hit_.push_back(tr.hit);
    }
}

std::size_t Simulator::level_index(double level) const {
    for (std::size_t i = 0; i < tracked_.size(); ++i)
        if (tracked_[i].level == level) return i;
    throw SpecError("untracked level");
}

double Simulator::lt(double level) const { return lt_[level_index(level)]; }
bool Simulator::level_hit(double level) const { return level_hit_[level_index(level)]; }

double Simulator::stride_limit() const {
    if (!const_sigma_) return 0.0;
    double dist = kInf;
    for (const Tracked& tr : tracked_)
        dist = std::min(dist, std::abs(x_ - tr.level) - eps_);
    if (hit_arm_.armed && !hit_arm_.fired)
        dist = std::min(dist, std::abs(hit_arm_.level - x_));
    if (integrand_) dist = std::min(dist, x_ - integrand_support_hi_);
    if (dist <= 0.0) return 0.0;
    const double h = dist / (8.0 * sigma0_);
    return h * h;
}

void Simulator::attach_integrand(std::function<double(double, double, double)> g,
                                 double support_hi) {
    integrand_ = std::move(g);
    integrand_support_hi_ = support_hi;
    integrand_acc_ = 0.0;
}

void Simulator::mark_level_hit(std::size_t i) {
    if (tracked_[i].hit) return;
    tracked_[i].hit = true;
    level_hit_[i] = true;
}

void Simulator::fire_hit_arm() {
    if (hit_arm_.fired) return;
    hit_arm_.fired = true;
    hit_arm_.time = t_;
    hit_arm_.lt0 = lt_[0];
    for (std::size_t i = 0; i < tracked_.size(); ++i)
        if (tracked_[i].level == hit_arm_.level) mark_level_hit(i);
}

void Simulator::accrue(double h) {
    for (std::size_t i = 0; i < tracked_.size(); ++i) {
        if (!tracked_[i].hit) continue;
        if (std::abs(x_ - tracked_[i].level) <= eps_) {
            const double dl = h / tracked_[i].band_mass;
            lt_[i] += dl;
            if (i == 0 && discount_rate_ >= 0.0)
                discounted_lt_ += std::exp(-discount_rate_ * t_) * dl;
            if (ilt_arm_.armed && !ilt_arm_.fired && ilt_arm_.idx == i &&
                lt_[i] > ilt_arm_.threshold) {
                ilt_arm_.fired = true;
                ilt_arm_.time = t_;
                ilt_arm_.lt0 = lt_[0];
            }
        }
    }
    if (compensator_f_) compensator_ += (*compensator_f_)(lt_[0]) * h;
    if (integrand_) integrand_acc_ += integrand_(t_, x_, lt_[0]) * h;
}

void Simulator::move(double h, double sig) {
    double z = x_ + sig * std::sqrt(h) * rng_.normal();

    if (hit_arm_.armed && !hit_arm_.fired) {
        const double a = hit_arm_.level;
        if ((x_ - a) * (z - a) <= 0.0) {
            fire_hit_arm();
        } else {
            const double expo = 2.0 * (x_ - a) * (z - a) / (sig * sig * h);
            if (expo < 40.0 && rng_.uniform() <= std::exp(-expo)) fire_hit_arm();
        }
    }

    // zero boundary: an unfolded move below 0 means T0 happened inside the step
    if (z <= 0.0) {
        mark_level_hit(0);
        z = -z;
    } else if (!tracked_[0].hit) {
        const double expo = 2.0 * x_ * z / (sig * sig * h);
        if (expo < 40.0 && rng_.uniform() <= std::exp(-expo)) mark_level_hit(0);
    }

    // reflecting right end (ell' < ell) or rare overshoot past a finite pole
    const double lp = std::min(spec_->ell_prime(), tail_cap_);
    if (std::isfinite(lp) && z >= lp) {
        const double lim = lp * (1.0 - 1e-12);
        z = std::max(2.0 * lim - z, 0.0);
        if (z >= lim) z = lim;
    }

    // visit detection for tracked levels above 0
    for (std::size_t i = 1; i < tracked_.size(); ++i) {
        if (tracked_[i].hit) continue;
        const double lvl = tracked_[i].level;
        if ((x_ - lvl) * (z - lvl) <= 0.0) {
            mark_level_hit(i);
        } else {
            const double expo = 2.0 * (x_ - lvl) * (z - lvl) / (sig * sig * h);
            if (expo < 40.0 && rng_.uniform() <= std::exp(-expo)) mark_level_hit(i);
        }
    }

    x_ = z;
    t_ += h;
}

void Simulator::step_fine(double h) {
    if (const_sigma_) {
        accrue(h);
        move(h, sigma0_);
        return;
    }
    double sig = sigma_of(*spec_, x_);
    int nsub = 1;
    const double cap = 0.05 * (1.0 + x_);
    const double s2h = sig * sig * h;
    if (s2h > cap * cap) nsub = std::min(4096, static_cast<int>(std::ceil(s2h / (cap * cap))));
    const double hs = h / nsub;
    for (int s = 0; s < nsub; ++s) {
        if (s > 0) sig = sigma_of(*spec_, x_);
        accrue(hs);
        move(hs, sig);
    }
}

void Simulator::run_to(double target) {
    while (t_ < target - 1e-12 * (1.0 + std::abs(target))) {
        const double remain = target - t_;
        const double stride = stride_limit();
        if (stride > 2.0 * dt_) {
            // bands (and any integrand support) are out of reach: L is frozen
            // and only the weight compensator accrues, exactly
            const double h = std::min(stride, remain);
            if (compensator_f_) compensator_ += (*compensator_f_)(lt_[0]) * h;
            move(h, sigma0_);
        } else {
            step_fine(std::min(dt_, remain));
        }
    }
}

void Simulator::arm_hitting(double a) {
    if (!(a > 0.0) || a >= spec_->ell()) throw SpecError("hitting level outside (0, ell)");
    hit_arm_ = HitArm{};
    hit_arm_.armed = true;
    hit_arm_.level = a;
    ilt_arm_ = IltArm{};
    if (x_ == a) fire_hit_arm();
}

void Simulator::arm_ilt(double level, double u, bool keep_hit_arm) {
    ilt_arm_ = IltArm{};
    ilt_arm_.armed = true;
    ilt_arm_.idx = level_index(level);
    ilt_arm_.threshold = u;
    if (!keep_hit_arm) hit_arm_ = HitArm{};
    if (lt_[ilt_arm_.idx] > u) {
        ilt_arm_.fired = true;
        ilt_arm_.time = t_;
        ilt_arm_.lt0 = lt_[0];
    }
}

void Simulator::arm_ilt(double level, double u) { arm_ilt(level, u, false); }

bool Simulator::clock_fired() const {
    return ilt_arm_.armed ? ilt_arm_.fired : hit_arm_.fired;
}
double Simulator::clock_time() const {
    return ilt_arm_.armed ? ilt_arm_.time : hit_arm_.time;
}
double Simulator::clock_lt0() const {
    return ilt_arm_.armed ? ilt_arm_.lt0 : hit_arm_.lt0;
}

bool Simulator::run_until_clock(double budget) {
    double chunk = std::max(1.0, 256.0 * dt_);
    while (!clock_fired()) {
        if (t_ >= budget) return false;
        run_to(std::min(t_ + chunk, budget));
        chunk *= 2.0; // horizon auto-extension
    }
    return true;
}

Simulator::ClockHit Simulator::run_to_hitting(double a, double budget) {
    if (x_ == a) return {t_, false};
    arm_hitting(a);
    const bool fired = run_until_clock(budget);
    const ClockHit hit{fired ? hit_arm_.time : t_, !fired};
    hit_arm_.armed = false;
    return hit;
}

Simulator::ClockHit Simulator::run_to_ilt(double level, double u, double budget) {
    arm_ilt(level, u);
    const bool fired = run_until_clock(budget);
    const ClockHit hit{fired ? ilt_arm_.time : t_, !fired};
    ilt_arm_.armed = false;
    return hit;
}

double Simulator::lt_zero_at_last_clock() const {
    if (ilt_arm_.fired) return ilt_arm_.lt0;
    if (hit_arm_.fired) return hit_arm_.lt0;
    return lt_[0];
}

Path simulate(const DiffusionSpec& spec, const SimConfig& cfg) {
    if (!(cfg.horizon >= 0.0)) throw SpecError("simulate: horizon must be >= 0");
    Path p;
    p.seed = cfg.seed;
    p.levels = cfg.tracked_levels;
    p.lt_levels.assign(p.levels.size(), {});
    Rng rng(cfg.seed, 0);
    Simulator sim(spec, cfg.x0, cfg.dt, rng, cfg.tracked_levels, cfg.band_eps0);

    auto record = [&] {
        p.times.push_back(sim.t());
        p.positions.push_back(sim.x());
        p.lt_zero.push_back(sim.lt_zero());
        for (std::size_t i = 0; i < p.levels.size(); ++i)
            p.lt_levels[i].push_back(sim.lt(p.levels[i]));
    };

    record();
    if (cfg.horizon == 0.0) return p;
    const std::uint64_t steps =
        static_cast<std::uint64_t>(std::ceil(cfg.horizon / cfg.dt - 1e-12));
    const std::uint64_t stride = static_cast<std::uint64_t>(std::max(cfg.record_stride, 1));
    for (std::uint64_t k = 1; k <= steps; ++k) {
        const double target = std::min(cfg.horizon, static_cast<double>(k) * cfg.dt);
        sim.run_to(target);
        if (k % stride == 0 || k == steps) record();
    }
    return p;
}

ClockRealization sample_clock(const DiffusionSpec& spec, double x0, const ClockSpec& clock,
                              const SimConfig& cfg, std::uint64_t path_index) {
    Rng rng(cfg.seed, path_index);
    ClockRealization out;
    switch (clock.kind) {
        case ClockSpec::Kind::Exponential: {
            out.time = rng.exponential(clock.q);
            Simulator sim(spec, x0, cfg.dt, rng, cfg.tracked_levels, cfg.band_eps0);
            sim.run_to(out.time);
            out.lt_zero_at_clock = sim.lt_zero();
            return out;
        }
        case ClockSpec::Kind::Hitting: {
            Simulator sim(spec, x0, cfg.dt, rng, cfg.tracked_levels, cfg.band_eps0);
            auto hit = sim.run_to_hitting(clock.a, cfg.horizon * 4096.0);
            out.time = hit.time;
            out.exhausted = hit.exhausted;
            out.lt_zero_at_clock = sim.lt_zero_at_last_clock();
            return out;
        }
        case ClockSpec::Kind::InverseLocalTime: {
            std::vector<double> levels = cfg.tracked_levels;
            if (clock.a > 0.0 &&
                std::find(levels.begin(), levels.end(), clock.a) == levels.end())
                levels.push_back(clock.a);
            Simulator sim(spec, x0, cfg.dt, rng, levels, cfg.band_eps0);
            auto hit = sim.run_to_ilt(clock.a, clock.u, cfg.horizon * 4096.0);
            out.time = hit.time;
            out.exhausted = hit.exhausted;
            out.lt_zero_at_clock = sim.lt_zero_at_last_clock();
            return out;
        }
    }
    throw SpecError("sample_clock: unknown clock kind");
}

} // namespace gendiff
