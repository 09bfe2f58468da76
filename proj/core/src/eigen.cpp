#include "gendiff/eigen.hpp"

#include <algorithm>
#include <cmath>

#include "gendiff/errors.hpp"

namespace gendiff {

namespace {

// Exact transfer across a panel of width h carrying constant speed density
// lambda under rate kappa^2 = (q + k) lambda:
//   [f; f'] -> [cosh(kh) f + sinh(kh)/k f'; k sinh(kh) f + cosh(kh) f'].
// The matrix has unit determinant, so the Wronskian of any two solutions is
// conserved up to roundoff.
struct Pair {
    double f, df;
};

inline void propagate(Pair& p, double h, double kappa2) {
    if (h <= 0.0) return;
    if (kappa2 <= 0.0) {
        p.f += h * p.df;
        return;
    }
    const double kh = std::sqrt(kappa2) * h;
    double c, s; // cosh(kh), sinh(kh)/kappa
    if (kh < 1e-4) {
        const double kh2 = kh * kh;
        c = 1.0 + kh2 * (0.5 + kh2 / 24.0);
        s = h * (1.0 + kh2 * (1.0 / 6.0 + kh2 / 120.0));
    } else {
        c = std::cosh(kh);
        s = std::sinh(kh) / std::sqrt(kappa2);
    }
    const double f = c * p.f + s * p.df;
    const double df = kappa2 * s * p.f + c * p.df;
    p.f = f;
    p.df = df;
}

inline void atom_kick(Pair& p, double q_eff, double mass) { p.df += q_eff * mass * p.f; }

struct MarchState {
    double x = 0.0;
    Pair phi{1.0, 0.0};
    Pair psi{0.0, 1.0};
    double lower() const { return psi.f / phi.f; }           // increases to H
    double upper() const { return phi.df > 0.0 ? psi.df / phi.df : kInf; } // decreases to H
};

class Marcher {
public:
    Marcher(const SolverMeasure& m, double q) : m_(m), q_(q) {
        atom_it_ = m_.atoms.begin();
    }

    // Advances to x1 across one panel (no atom may sit strictly inside).
    void advance_panel(MarchState& st, double x1) {
        while (atom_it_ != m_.atoms.end() && atom_it_->position <= st.x) {
            if (atom_it_->position == st.x) {
                atom_kick(st.phi, q_, atom_it_->mass);
                atom_kick(st.psi, q_, atom_it_->mass);
            }
            ++atom_it_;
        }
        const double h = x1 - st.x;
        if (h <= 0.0) return;
        double dm = m_.mass_between(st.x, x1);
        // an atom at the right node belongs to (a, b]; peel it off the panel
        if (atom_it_ != m_.atoms.end() && atom_it_->position <= x1) dm -= atom_it_->mass;
        dm = std::max(dm, 0.0);
        double k = 0.0;
        if (m_.killing) k = std::max(0.0, m_.killing(0.5 * (st.x + x1)));
        const double kappa2 = (q_ + k) * (dm / h);
        propagate(st.phi, h, kappa2);
        propagate(st.psi, h, kappa2);
        st.x = x1;
    }

    void reset_atoms(double x) {
        atom_it_ = m_.atoms.begin();
        while (atom_it_ != m_.atoms.end() && atom_it_->position <= x) ++atom_it_;
    }

private:
    const SolverMeasure& m_;
    double q_;
    std::vector<Atom>::const_iterator atom_it_;
};

// Aitken delta-squared extrapolation of the last three sequence values.
double aitken(double a0, double a1, double a2) {
    const double d1 = a1 - a0, d2 = a2 - a1;
    const double dd = d2 - d1;
    if (std::abs(dd) < 1e-300) return a2;
    const double out = a2 - d2 * d2 / dd;
    return std::isfinite(out) ? out : a2;
}

// Far-field march from `st` towards the right boundary, tracking the
// bracket [psi/phi, psi'/phi'] at geometric checkpoints. `shrink_to_pole`
// switches the checkpoint schedule from doubling x to halving ell - x.
struct FarResult {
    double H;
    double bracket_lo, bracket_hi;
    bool converged;
};

FarResult far_march(Marcher march, MarchState st, const SolverMeasure& m, double q,
                    double level_scale, double rel_tol, int max_doublings) {
    const bool pole = std::isfinite(m.ell);
    const double curv_target = 0.10 * level_scale;
    const double var_ratio = std::exp(0.25 * level_scale);
    std::vector<double> lo_seq, hi_seq;
    double checkpoint = pole ? st.x + 0.5 * (m.ell - st.x) : std::max(2.0 * st.x, st.x + 1.0);
    double H_prev = kInf;
    for (int J = 0; J < max_doublings; ++J) {
        while (st.x < checkpoint) {
            double w = std::min(checkpoint - st.x, 0.25 * (st.x + 1.0));
            for (int halvings = 0; halvings < 60; ++halvings) {
                const double dm = std::max(m.mass_between(st.x, st.x + w), 0.0);
                double k = m.killing ? std::max(0.0, m.killing(st.x + 0.5 * w)) : 0.0;
                const double kappa = std::sqrt((q + k) * dm / w);
                if (kappa * w > curv_target) {
                    w = std::max(curv_target / kappa, 1e-12 * (st.x + 1.0));
                    continue;
                }
                // keep the per-panel density lumping mild
                const double dm1 = std::max(m.mass_between(st.x, st.x + 0.5 * w), 0.0);
                const double dm2 = dm - dm1;
                const double tiny = 1e-14 * (dm + 1e-300);
                if (dm > 1e-300 &&
                    (dm1 + tiny) > var_ratio * (dm2 + tiny) + tiny &&
                    w > 1e-9 * (st.x + 1.0)) {
                    w *= 0.5;
                    continue;
                }
                if (dm > 1e-300 && (dm2 + tiny) > var_ratio * (dm1 + tiny) + tiny &&
                    w > 1e-9 * (st.x + 1.0)) {
                    w *= 0.5;
                    continue;
                }
                break;
            }
            march.advance_panel(st, st.x + w);
            // ratios determine H; rescale both solutions to dodge overflow
            if (st.phi.f > 1e120) {
                const double scale = 1.0 / st.phi.f;
                st.phi.f *= scale;
                st.phi.df *= scale;
                st.psi.f *= scale;
                st.psi.df *= scale;
            }
            if (!std::isfinite(st.phi.f))
                throw NonConvergence("eigen: solution overflow before H settled",
                                     lo_seq.empty() ? 0.0 : lo_seq.back(),
                                     hi_seq.empty() ? kInf : hi_seq.back());
        }
        lo_seq.push_back(st.lower());
        hi_seq.push_back(st.upper());
        const double lo = lo_seq.back(), hi = hi_seq.back();
        double H_est = 0.5 * (lo + hi);
        if (lo_seq.size() >= 3) {
            const std::size_t k3 = lo_seq.size() - 3;
            double lo_x = aitken(lo_seq[k3], lo_seq[k3 + 1], lo_seq[k3 + 2]);
            double hi_x = aitken(hi_seq[k3], hi_seq[k3 + 1], hi_seq[k3 + 2]);
            lo_x = std::clamp(lo_x, lo, hi);
            hi_x = std::clamp(hi_x, lo, hi);
            H_est = 0.5 * (lo_x + hi_x);
            const double spread = std::abs(hi_x - lo_x) + std::abs(H_est - H_prev);
            if (spread <= rel_tol * std::abs(H_est) || hi - lo <= rel_tol * std::abs(H_est))
                return {H_est, lo, hi, true};
            H_prev = H_est;
        }
        if (hi - lo <= rel_tol * std::abs(H_est)) return {H_est, lo, hi, true};
        checkpoint = pole ? checkpoint + 0.5 * (m.ell - checkpoint) : 2.0 * checkpoint;
        if (pole && m.ell - checkpoint < 1e-14 * m.ell) break;
    }
    return {0.5 * (lo_seq.back() + hi_seq.back()), lo_seq.back(), hi_seq.back(), false};
}

std::vector<double> cosine_grid(double r, int n) {
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j)
        g[static_cast<std::size_t>(j)] =
            r * 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(j) / n));
    g.front() = 0.0;
    g.back() = r;
    return g;
}

} // namespace

double EigenSolution::wronskian_residual(std::size_t i) const {
    const double w = phi[i] * dpsi[i] - dphi[i] * psi[i];
    const double scale = std::max(1.0, std::abs(phi[i] * dpsi[i]) + std::abs(dphi[i] * psi[i]));
    return (w - 1.0) / scale;
}

namespace {

// cubic Hermite evaluation from (value, derivative) node data
double hermite(const std::vector<double>& grid, const std::vector<double>& v,
               const std::vector<double>& dv, double x) {
    if (x < grid.front() || x > grid.back())
        throw SpecError("eigen: position outside the truncation grid");
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

double hermite_deriv(const std::vector<double>& grid, const std::vector<double>& v,
                     const std::vector<double>& dv, double x) {
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t j = it == grid.end() ? grid.size() - 2
                                     : static_cast<std::size_t>(it - grid.begin()) - 1;
    if (j >= grid.size() - 1) j = grid.size() - 2;
    const double h = grid[j + 1] - grid[j];
    const double t = (x - grid[j]) / h;
    return (v[j] * (6 * t * t - 6 * t) / h + dv[j] * (3 * t * t - 4 * t + 1) +
            v[j + 1] * (6 * t - 6 * t * t) / h + dv[j + 1] * (3 * t * t - 2 * t));
}

} // namespace

double EigenSolution::phi_at(double x) const { return hermite(grid, phi, dphi, x); }
double EigenSolution::psi_at(double x) const { return hermite(grid, psi, dpsi, x); }
double EigenSolution::rho_at(double x) const { return hermite(grid, rho, drho, x); }
double EigenSolution::dphi_at(double x) const { return hermite_deriv(grid, phi, dphi, x); }
double EigenSolution::dpsi_at(double x) const { return hermite_deriv(grid, psi, dpsi, x); }

double EigenSolution::resolvent(double x, double y) const {
    if (x > y) std::swap(x, y);
    if (x < 0.0) throw SpecError("resolvent: negative position");
    return H * phi_at(x) * rho_at(y);
}

double EigenSolution::h_q(double x) const { return H * (1.0 - rho_at(x)); }

EigenSolution solve_eigen_measure(const SolverMeasure& m, double q, double pi0, double ell,
                                  const GridPolicy& policy) {
    if (!(q > 0.0)) throw SpecError("solve_eigen: q must be > 0");
    if (q < 1e-6) throw SpecError("solve_eigen: q below 1e-6 is ill-conditioned");

    // grid extent
    double r_core;
    if (m.reflecting_right) {
        r_core = m.ell_prime;
    } else if (std::isfinite(m.ell)) {
        r_core = m.right_accessible_mass_finite ? m.ell : m.ell * (1.0 - 1e-6);
    } else {
        // cover ~12 e-foldings of the decaying solution: integrate the local
        // rate sqrt(q dm/dx) over growing windows, stopping early once the
        // measure has no mass left to contribute
        double phase = 0.0, z = 0.0, total = 0.0;
        while (phase < 12.0 && z < 5e4) {
            const double w = std::max(0.25, 0.25 * z);
            const double dm = std::max(m.mass_between(z, z + w), 0.0);
            phase += std::sqrt(q * dm / w) * w;
            total += dm;
            z += w;
            if (z >= 8.0 && dm <= 1e-12 * (total + 1e-300)) break;
        }
        r_core = std::clamp(z, 8.0, 5e4);
    }
    if (policy.r_max > 0.0) r_core = policy.r_max;

    std::vector<double> grid = cosine_grid(r_core, policy.n);
    for (const Atom& a : m.atoms)
        if (a.position > 0.0 && a.position < r_core) grid.push_back(a.position);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    EigenSolution sol;
    sol.q = q;
    sol.pi0 = pi0;
    sol.ell = ell;
    sol.grid = grid;
    const std::size_t N = grid.size();
    sol.phi.resize(N);
    sol.dphi.resize(N);
    sol.psi.resize(N);
    sol.dpsi.resize(N);

    Marcher march(m, q);
    MarchState st;
    sol.phi[0] = 1.0;
    sol.dphi[0] = 0.0;
    sol.psi[0] = 0.0;
    sol.dpsi[0] = 1.0;
    for (std::size_t i = 1; i < N; ++i) {
        march.advance_panel(st, grid[i]);
        sol.phi[i] = st.phi.f;
        sol.dphi[i] = st.phi.df;
        sol.psi[i] = st.psi.f;
        sol.dpsi[i] = st.psi.df;
        if (!std::isfinite(st.phi.f))
            throw NonConvergence("eigen: overflow on the output grid", st.lower(), st.upper());
    }

    // H from the right boundary condition
    if (m.reflecting_right) {
        if (!(st.phi.df > 0.0))
            throw NonConvergence("eigen: vanishing phi' at the reflecting boundary", 0.0, kInf);
        sol.H = st.psi.df / st.phi.df;
    } else if (m.right_accessible_mass_finite) {
        sol.H = st.psi.f / st.phi.f;
    } else {
        Marcher cont(m, q);
        cont.reset_atoms(st.x);
        FarResult fine = far_march(cont, st, m, q, 1.0, policy.h_tol, policy.max_doublings);
        Marcher cont2(m, q);
        cont2.reset_atoms(st.x);
        FarResult coarse = far_march(cont2, st, m, q, 2.0, policy.h_tol, policy.max_doublings);
        if (!fine.converged)
            throw NonConvergence("eigen: H(q) limit did not settle within truncation budget",
                                 fine.bracket_lo, fine.bracket_hi);
        // second-order panel scheme: Richardson across curvature levels
        double H = fine.H + (fine.H - coarse.H) / 3.0;
        if (!(H >= fine.bracket_lo && H <= fine.bracket_hi)) H = fine.H;
        sol.H = H;
    }

    sol.rho.resize(N);
    sol.drho.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        sol.rho[i] = sol.phi[i] - sol.psi[i] / sol.H;
        sol.drho[i] = sol.dphi[i] - sol.dpsi[i] / sol.H;
    }
    return sol;
}

EigenSolution solve_eigen(const DiffusionSpec& spec, double q, const GridPolicy& policy) {
    if (spec.boundary_class == BoundaryClass::RegularElastic)
        throw SpecError("solve_eigen: regular-elastic right boundaries are not supported");

    SolverMeasure m;
    const SpeedMeasure& sm = spec.measure;
    m.mass_between = [&sm](double a, double b) {
        double v = sm.mass(std::min(b, sm.ell() * (1.0 - 1e-15))) -
                   sm.mass(std::min(a, sm.ell() * (1.0 - 1e-15)));
        for (const Atom& at : sm.atoms())
            if (at.position > a && at.position <= b) v -= at.mass;
        return std::max(v, 0.0);
    };
    m.atoms = sm.atoms();
    m.ell_prime = sm.ell_prime();
    m.ell = sm.ell();
    m.reflecting_right = spec.boundary_class == BoundaryClass::RegularReflecting &&
                         std::isfinite(sm.ell_prime());
    m.right_accessible_mass_finite = spec.boundary_class == BoundaryClass::RegularAbsorbing;
    return solve_eigen_measure(m, q, spec.pi0, spec.ell(), policy);
}

} // namespace gendiff
