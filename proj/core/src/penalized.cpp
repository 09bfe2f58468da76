#include "gendiff/penalized.hpp"

#include <algorithm>
#include <cmath>

#include "gendiff/errors.hpp"
#include "gendiff/quadrature.hpp"
#include "gendiff/threads.hpp"

namespace gendiff {

TransformedSpec::TransformedSpec(const DiffusionSpec& spec, const EigenSolution& sol,
                                 HTransform kind)
    : spec_(&spec), kind_(kind), q_(sol.q), H_(sol.H) {
    if (!(kind.c > 0.0)) throw SpecError("transform_spec: c must be > 0");
    if (!std::isfinite(spec.ell()) && kind.c < 1e-6)
        throw SpecError("transform_spec: c below 1e-6 degenerates h^c on ell = inf");
    const double ell = spec.ell();
    hc0_ = 1.0 / (kind.c + (std::isfinite(ell) ? 1.0 / ell : 0.0));

    grid_ = sol.grid;
    const std::size_t n = grid_.size();
    phi_hc_.resize(n);
    dphi_hc_.resize(n);
    rho_hc_.resize(n);
    drho_hc_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid_[i];
        const double hcx = hc(x);
        const double dhcx = hc_prime(x);
        const double num_phi = sol.phi[i] + kind.c * sol.psi[i];
        const double dnum_phi = sol.dphi[i] + kind.c * sol.dpsi[i];
        phi_hc_[i] = hc0_ * num_phi / hcx;
        dphi_hc_[i] = hc0_ * (dnum_phi * hcx - num_phi * dhcx) / (hcx * hcx);
        rho_hc_[i] = hc0_ * sol.rho[i] / hcx;
        drho_hc_[i] = hc0_ * (sol.drho[i] * hcx - sol.rho[i] * dhcx) / (hcx * hcx);
    }

    // transformed scale at the grid nodes
    s_grid_.assign(n, 0.0);
    QuadOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-11;
    for (std::size_t i = 1; i < n; ++i) {
        s_grid_[i] = s_grid_[i - 1] +
                     integrate([&](double y) { return 1.0 / (hc(y) * hc(y)); }, grid_[i - 1],
                               grid_[i], opts)
                         .value;
    }
}

double TransformedSpec::hc(double x) const {
    const double ell = spec_->ell();
    const double base = kind_.h == HKind::H0 ? h0(*spec_, x) : x;
    const double tail = std::isfinite(ell) ? (1.0 - x / ell) * hc0_ : hc0_;
    return base + tail;
}

double TransformedSpec::hc_prime(double x) const {
    const double ell = spec_->ell();
    const double dbase = kind_.h == HKind::H0 ? h0_prime(*spec_, x) : 1.0;
    const double dtail = std::isfinite(ell) ? -hc0_ / ell : 0.0;
    return dbase + dtail;
}

double TransformedSpec::m_hc_density(double x) const {
    const double h = hc(x);
    return h * h * spec_->measure.density(x);
}

double TransformedSpec::s_hc(double x) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t j = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
    if (j >= grid_.size() - 1) j = grid_.size() - 2;
    QuadOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-11;
    return s_grid_[j] +
           integrate([&](double y) { return 1.0 / (hc(y) * hc(y)); }, grid_[j], x, opts).value;
}

double TransformedSpec::s_hc_inverse(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= s_grid_.back()) return grid_.back();
    auto it = std::upper_bound(s_grid_.begin(), s_grid_.end(), s);
    std::size_t j = static_cast<std::size_t>(it - s_grid_.begin()) - 1;
    double lo = grid_[j], hi = grid_[j + 1];
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 64; ++iter) {
        const double err = s_hc(x) - s;
        if (std::abs(err) < 1e-14 * (1.0 + std::abs(s))) break;
        if (err > 0.0)
            hi = x;
        else
            lo = x;
        const double hcx = hc(x);
        double xn = x - err * hcx * hcx;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return x;
}

double TransformedSpec::killing_rate(double x) const {
    if (kind_.h != HKind::H0 || spec_->pi0 == 0.0) return 0.0;
    return spec_->pi0 / hc(x);
}

namespace {

double hermite_eval(const std::vector<double>& grid, const std::vector<double>& v,
                    const std::vector<double>& dv, double x) {
    if (x < grid.front() || x > grid.back())
        throw SpecError("transformed spec: position outside the grid");
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t j = it == grid.end() ? grid.size() - 2
                                     : static_cast<std::size_t>(it - grid.begin()) - 1;
    if (j >= grid.size() - 1) j = grid.size() - 2;
    const double h = grid[j + 1] - grid[j];
    const double t = (x - grid[j]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return v[j] * (2 * t3 - 3 * t2 + 1) + dv[j] * h * (t3 - 2 * t2 + t) +
           v[j + 1] * (-2 * t3 + 3 * t2) + dv[j + 1] * h * (t3 - t2);
}

} // namespace

double TransformedSpec::phi_hc(double x) const {
    return hermite_eval(grid_, phi_hc_, dphi_hc_, x);
}
double TransformedSpec::rho_hc(double x) const {
    return hermite_eval(grid_, rho_hc_, drho_hc_, x);
}

double TransformedSpec::resolvent_coeff() const {
    return H_ / (hc0_ * hc0_ * (kind_.c * H_ + 1.0));
}

double TransformedSpec::resolvent_hc(double x, double y) const {
    if (x > y) std::swap(x, y);
    if (x < 0.0) throw SpecError("resolvent_hc: negative position");
    return resolvent_coeff() * phi_hc(x) * rho_hc(y);
}

SolverMeasure TransformedSpec::to_solver_measure() const {
    SolverMeasure m;
    // speed mass of the transformed diffusion between two points of its own
    // natural scale sigma = s^{h,c}(x)
    m.mass_between = [this](double s1, double s2) {
        const double x1 = s_hc_inverse(s1);
        const double x2 = s_hc_inverse(s2);
        QuadOptions opts;
        opts.abs_tol = 1e-13;
        opts.rel_tol = 1e-10;
        return integrate([this](double y) { return m_hc_density(y); }, x1, x2, opts).value;
    };
    for (const Atom& a : spec_->measure.atoms()) {
        const double h = hc(a.position);
        m.atoms.push_back({s_hc(a.position), a.mass * h * h});
    }
    if (killing_rate(0.0) > 0.0)
        m.killing = [this](double sigma) { return killing_rate(s_hc_inverse(sigma)); };
    m.ell_prime = kInf;
    m.ell = kInf;
    return m;
}

TransformedSpec transform_spec(const DiffusionSpec& spec, const EigenSolution& sol,
                               HTransform kind) {
    return TransformedSpec(spec, sol, kind);
}

// ---------------------------------------------------------------------------
// Reflected-BM decomposition sampling
// ---------------------------------------------------------------------------

namespace {

void require_rbm(const DiffusionSpec& spec) {
    if (spec.measure.kind() != SpeedMeasure::Kind::ReflectedBm)
        throw SpecError("decomposition sampler is implemented for reflected BM only");
}

// exact Bessel(3) step: the radius of a 3d Brownian motion
double bes3_step(double r, double h, Rng& rng) {
    const double s = std::sqrt(h);
    const double a = r + s * rng.normal();
    const double b = s * rng.normal();
    const double c = s * rng.normal();
    return std::sqrt(a * a + b * b + c * c);
}

} // namespace

DecompositionState sample_decomposition_state(const DiffusionSpec& rbm_spec, const Weight& f,
                                              const DecompositionConfig& cfg, Rng& rng) {
    require_rbm(rbm_spec);
    const double w_direct = cfg.x0 * f.f0();
    const double w_bridge = f.total();
    if (!(w_direct + w_bridge > 0.0))
        throw SpecError("decomposition: mixture is not normalizable for this weight");

    DecompositionState out;
    if (rng.uniform() * (w_direct + w_bridge) <= w_direct) {
        // g = 0 branch: Bessel(3) from x0, never touching 0
        out.bridge_branch = false;
        out.g = 0.0;
        double r = cfg.x0;
        out.min_post_g = r;
        double t = 0.0;
        while (t < cfg.t - 1e-12) {
            const double h = std::min(cfg.dt, cfg.t - t);
            r = bes3_step(r, h, rng);
            out.min_post_g = std::min(out.min_post_g, r);
            t += h;
        }
        out.x_t = r;
        out.l_t = 0.0;
        return out;
    }

    // bridge-first branch: reflected path run to the inverse local time at an
    // f-distributed threshold (realizing the weighted bridge), then Bessel(3)
    const double z = f.sample(rng);
    Simulator sim(rbm_spec, cfg.x0, cfg.dt, rng, {}, cfg.band_eps0);
    sim.arm_ilt(0.0, z);
    sim.run_to(cfg.t);
    if (!sim.clock_fired()) {
        out.x_t = sim.x();
        out.l_t = sim.lt_zero();
        out.g = kInf; // the last zero lies beyond t
        return out;
    }
    out.g = sim.clock_time();
    out.l_t = z;
    double r = 0.0;
    out.min_post_g = kInf;
    double t = out.g;
    while (t < cfg.t - 1e-12) {
        const double h = std::min(cfg.dt, cfg.t - t);
        r = bes3_step(r, h, rng);
        out.min_post_g = std::min(out.min_post_g, r);
        t += h;
    }
    out.x_t = r;
    return out;
}

Path sample_decomposition(const DiffusionSpec& rbm_spec, const Weight& f,
                          const DecompositionConfig& cfg, std::uint64_t path_index) {
    require_rbm(rbm_spec);
    Rng rng(cfg.seed, path_index);
    const double w_direct = cfg.x0 * f.f0();
    const double w_bridge = f.total();
    if (!(w_direct + w_bridge > 0.0))
        throw SpecError("decomposition: mixture is not normalizable for this weight");

    Path p;
    p.seed = cfg.seed;
    double t = 0.0;
    p.times.push_back(0.0);
    p.positions.push_back(cfg.x0);
    p.lt_zero.push_back(0.0);

    if (rng.uniform() * (w_direct + w_bridge) <= w_direct) {
        double r = cfg.x0;
        while (t < cfg.t - 1e-12) {
            const double h = std::min(cfg.dt, cfg.t - t);
            r = bes3_step(r, h, rng);
            t += h;
            p.times.push_back(t);
            p.positions.push_back(r);
            p.lt_zero.push_back(0.0);
        }
        return p;
    }

    const double z = f.sample(rng);
    Simulator sim(rbm_spec, cfg.x0, cfg.dt, rng, {}, cfg.band_eps0);
    sim.arm_ilt(0.0, z);
    while (!sim.clock_fired() && sim.t() < cfg.t - 1e-12) {
        sim.run_to(std::min(sim.t() + cfg.dt, cfg.t));
        p.times.push_back(sim.t());
        p.positions.push_back(sim.x());
        p.lt_zero.push_back(sim.lt_zero());
    }
    if (sim.clock_fired()) {
        double r = 0.0;
        t = sim.clock_time();
        while (t < cfg.t - 1e-12) {
            const double h = std::min(cfg.dt, cfg.t - t);
            r = bes3_step(r, h, rng);
            t += h;
            p.times.push_back(t);
            p.positions.push_back(r);
            p.lt_zero.push_back(z);
        }
    }
    return p;
}

CompareReport compare_decomposition_vs_reweighting(const DiffusionSpec& rbm_spec,
                                                   const Weight& f,
                                                   const DecompositionConfig& cfg) {
    require_rbm(rbm_spec);
    const std::uint64_t n = cfg.n;

    std::vector<double> ax(n), al(n);
    std::vector<double> bx(n), bl(n), bw(n);
    std::vector<char> min_ok(n, 1);

    parallel_for_chunks((n + 511) / 512, cfg.threads, [&](std::uint64_t chunk) {
        const std::uint64_t lo = chunk * 512, hi = std::min(n, lo + 512);
        for (std::uint64_t i = lo; i < hi; ++i) {
            Rng rng_a(cfg.seed, i);
            DecompositionState s = sample_decomposition_state(rbm_spec, f, cfg, rng_a);
            ax[i] = s.x_t;
            al[i] = s.l_t;
            if (std::isfinite(s.g) && !(s.min_post_g > 0.0)) min_ok[i] = 0;

            Rng rng_b(cfg.seed + 0x9e37, i);
            Simulator sim(rbm_spec, cfg.x0, cfg.dt, rng_b, {}, cfg.band_eps0);
            sim.run_to(cfg.t);
            bx[i] = sim.x();
            bl[i] = sim.lt_zero();
            bw[i] = eval_M_sf(rbm_spec, f, sim.x(), sim.lt_zero());
        }
    });

    CompareReport rep;
    rep.effective_n = effective_sample_size(bw);
    if (rep.effective_n < 500.0)
        throw NonConvergence("compare_decomposition: effective sample size below 500",
                             rep.effective_n, static_cast<double>(n));
    rep.ks_x = ks_two_sample(ax, {}, bx, bw);
    rep.ks_l = ks_two_sample(al, {}, bl, bw);

    double sa = 0.0, sbw = 0.0, sbxw = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        sa += ax[i];
        sbw += bw[i];
        sbxw += bx[i] * bw[i];
    }
    rep.mean_x_decomposition = sa / static_cast<double>(n);
    rep.mean_x_reweighted = sbxw / sbw;
    rep.min_post_g_positive =
        std::all_of(min_ok.begin(), min_ok.end(), [](char c) { return c == 1; });
    rep.pass = rep.ks_x.p_value > 0.01 && rep.ks_l.p_value > 0.01 && rep.min_post_g_positive;
    return rep;
}

} // namespace gendiff
