#ifndef GENDIFF_PATHSIM_HPP
#define GENDIFF_PATHSIM_HPP

#include <cstdint>
#include <vector>

#include "gendiff/diffusion_spec.hpp"
#include "gendiff/laws.hpp"
#include "gendiff/mc.hpp"
#include "gendiff/rng.hpp"

namespace gendiff {

/// Default band half-width factor: band = eps0 * sqrt(dt). Calibrated against
/// the Revuz identity E_0[int e^{-qt} dL_t] = r_q(0,0) on reflected BM: the
/// small-band overcount and the band-profile undercount cancel near 0.8.
constexpr double kDefaultBandEps0 = 0.8;

struct SimConfig {
    double x0 = 0.0;
    double horizon = 1.0;
    double dt = 1e-4;
    std::vector<double> tracked_levels; // additional local-time levels (0 always on)
    double band_eps0 = kDefaultBandEps0;
    std::uint64_t seed = 0;
    int record_stride = 1;
};

/// A recorded trajectory: positions plus running Revuz-normalized local times.
struct Path {
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<double> lt_zero;
    std::vector<double> levels;                 // tracked levels (without 0)
    std::vector<std::vector<double>> lt_levels; // [level][node]
    std::uint64_t seed = 0;
};

/// Streaming single-path engine. Euler-Maruyama on natural scale with
/// sigma(x) = sqrt(2 / m'(x)), reflection at 0 by folding, occupation-band
/// local time L^y += dt / m((y-eps, y+eps]) while in the band. Local time at a
/// level starts accruing only once the level has been hit (exactly as for the
/// continuous object). For constant-sigma specs the engine takes large exact
/// Gaussian strides while far from every band and armed level.
class Simulator {
public:
    Simulator(const DiffusionSpec& spec, double x0, double dt, Rng rng,
              std::vector<double> tracked_levels = {}, double band_eps0 = kDefaultBandEps0);

    double t() const { return t_; }
    double x() const { return x_; }
    double lt_zero() const { return lt_[0]; }
    double lt(double level) const;
    bool t0_hit() const { return level_hit_[0]; }
    bool level_hit(double level) const;

    /// Advances to exactly time target (fine steps; strides when safe).
    void run_to(double target);

    struct ClockHit {
        double time = 0.0;
        bool exhausted = false;
    };
    /// Runs until X hits a (bridge-corrected crossing), or the time budget.
    ClockHit run_to_hitting(double a, double budget);
    /// Runs until L^level exceeds u, or the time budget.
    ClockHit run_to_ilt(double level, double u, double budget);
    /// Local time at 0 frozen at the moment the last clock fired.
    double lt_zero_at_last_clock() const;

    // Armed-clock interface: watch a clock while advancing with run_to, then
    // read the firing time and the frozen local time at 0.
    void arm_hitting(double a);
    void arm_ilt(double level, double u);
    bool clock_fired() const;
    double clock_time() const;
    double clock_lt0() const;
    /// Advances in growing chunks until the armed clock fires or t >= budget;
    /// returns false on budget exhaustion.
    bool run_until_clock(double budget);

    /// Accumulates int e^{-q t} dL_t at level 0 (Revuz functional).
    void set_discount(double q) { discount_rate_ = q; }
    double discounted_lt_zero() const { return discounted_lt_; }

    /// Accumulates int_0^t f(L_u) du; exact across strides since L is frozen
    /// away from the band.
    void enable_compensator(const Weight* f) { compensator_f_ = f; }
    double compensator() const { return compensator_; }

    /// Accumulates int g(t, X_t, L_t) dt by fine stepping; `support_hi` tells
    /// the engine where g vanishes so strides stay legal above it.
    void attach_integrand(std::function<double(double, double, double)> g, double support_hi);
    double integrand_value() const { return integrand_acc_; }

private:
    struct Tracked {
        double level;
        double band_mass; // m((level-eps, level+eps])
        bool hit;         // level visited (gates accrual)
    };
    struct HitArm {
        bool armed = false;
        bool fired = false;
        double level = 0.0;
        double time = 0.0;
        double lt0 = 0.0;
    };
    struct IltArm {
        bool armed = false;
        bool fired = false;
        std::size_t idx = 0;
        double threshold = 0.0;
        double time = 0.0;
        double lt0 = 0.0;
    };

    void step_fine(double h);
    void accrue(double h);
    void move(double h, double sigma);
    void mark_level_hit(std::size_t i);
    void fire_hit_arm();
    void arm_ilt(double level, double u, bool keep_hit_arm);
    double stride_limit() const; // max safe stride, 0 when striding not allowed
    std::size_t level_index(double level) const;

    const DiffusionSpec* spec_;
    Rng rng_;
    double dt_;
    double eps_;
    double t_ = 0.0;
    double x_ = 0.0;
    bool const_sigma_ = false;
    double sigma0_ = 1.0;
    double tail_cap_ = kInf; // reflecting regularization of light speed tails
    HitArm hit_arm_;
    IltArm ilt_arm_;
    std::vector<Tracked> tracked_;
    std::vector<double> lt_; // parallel to tracked_
    std::vector<bool> level_hit_;
    double discount_rate_ = -1.0;
    double discounted_lt_ = 0.0;
    const Weight* compensator_f_ = nullptr;
    double compensator_ = 0.0;
    std::function<double(double, double, double)> integrand_;
    double integrand_support_hi_ = 0.0;
    double integrand_acc_ = 0.0;
};

/// Records a full trajectory at fixed dt (no strides).
Path simulate(const DiffusionSpec& spec, const SimConfig& cfg);

/// Draws one realization of the clock along a fresh path from x0.
/// Exponential clocks are independent of the path. For hitting and
/// inverse-local-time clocks the horizon auto-extends geometrically up to
/// budget_factor * initial_horizon; exhaustion is reported distinctly.
struct ClockRealization {
    double time = 0.0;
    double lt_zero_at_clock = 0.0;
    bool exhausted = false;
};
ClockRealization sample_clock(const DiffusionSpec& spec, double x0, const ClockSpec& clock,
                              const SimConfig& cfg, std::uint64_t path_index);

} // namespace gendiff

#endif
