#ifndef GENDIFF_MARTINGALES_HPP
#define GENDIFF_MARTINGALES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gendiff/laws.hpp"
#include "gendiff/pathsim.hpp"

namespace gendiff {

/// The limit (super)martingales attached to the four clocks.
enum class MartingaleKind { N_h0f, M_h0f, M_sf, M_beta_a, M_inf_a };

/// N^{h0,f}_t = h0(X_t) f(L_t) + (1 - X_t/ell) int e^{-u/ell} f(L_t+u) du.
double eval_N_h0f(const DiffusionSpec& spec, const Weight& f, double x, double l);

/// M^{h0,f}_t = N^{h0,f}_t + pi0 int_0^t f(L_u) du.
double eval_M_h0f(const DiffusionSpec& spec, const Weight& f, double x, double l,
                  double compensator);

/// M^{s,f}_t = X_t f(L_t) + (1 - X_t/ell) int e^{-u/ell} f(L_t+u) du.
/// Only defined when ell' is entrance or natural.
double eval_M_sf(const DiffusionSpec& spec, const Weight& f, double x, double l);

/// M^{beta,a}_t = (1+beta(X_t^a))/(1+beta a) exp(-beta L_t + beta L^a_t/(1+beta a)).
double eval_M_beta_a(double beta, double a, double x, double l, double la);

/// M^{inf,a}_t = ((X_t^a)/a) e^{L^a_t/a} 1{t < T_0}; started at 0 this is
/// identically 0 (instant hit convention).
double eval_M_inf_a(double a, double x, double la, bool t0_passed);

/// Bounded adapted functionals F_t available to the verification drivers
/// (boundedness enforced by construction).
struct BoundedFunctional {
    enum class Kind { One, IndicatorXBelow, IndicatorXAbove, ExpMinusL, IndicatorLBelow };
    Kind kind = Kind::One;
    double param = 0.0;
    double operator()(double x, double l) const;
    static BoundedFunctional one() { return {}; }
    static BoundedFunctional indicator_x_below(double c) { return {Kind::IndicatorXBelow, c}; }
    static BoundedFunctional indicator_x_above(double c) { return {Kind::IndicatorXAbove, c}; }
    static BoundedFunctional exp_minus_l() { return {Kind::ExpMinusL, 0.0}; }
    static BoundedFunctional indicator_l_below(double c) { return {Kind::IndicatorLBelow, c}; }
};

/// Which penalization limit is being verified.
enum class ClockFamily {
    ExponentialQDown, // H(q) P_x[F_t f(L_{e_q})] -> P_x[F_t M^{h0,f}_t], q down
    HittingAUp,       // a P_x[F_t f(L_{T_a})]    -> P_x[F_t M^{s,f}_t],  a up
    IltAUp,           // a P_x[F_t f(L_{eta^a_u})]-> P_x[F_t M^{s,f}_t],  a up
    IltUUp,           // e^{bu/(1+ba)} P_x[F_t e^{-b L_{eta^a_u}}] -> P_x[F_t M^{b,a}_t]
};

struct VerifyConfig {
    ClockFamily family = ClockFamily::ExponentialQDown;
    Weight f = Weight::exponential(1.0);
    double beta = 1.0; // IltUUp weight rate
    double a = 1.0;    // level for IltUUp
    double u = 1.0;    // local-time threshold for IltAUp
    double x0 = 0.0;
    double t = 0.5;
    BoundedFunctional functional;
    std::vector<double> schedule; // monotone in the clock direction
    std::uint64_t n_paths = 10000;
    double dt = 2e-4;
    double band_eps0 = kDefaultBandEps0;
    std::uint64_t seed = 1;
    int threads = 0;
    double analytic_tol = 1e-2; // final-gap tolerance on noise-free routes
};

struct VerifyRow {
    double lambda = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double gap = 0.0; // |estimate - target|
    bool within = false;
};

struct ConvergenceReport {
    double target = 0.0;
    double target_std_error = 0.0;
    std::vector<VerifyRow> rows;
    bool shrinking = false;     // gaps decrease within noise along the schedule
    bool final_within = false;  // last gap <= 3 combined SE
    bool pass = false;
    std::string detail;
};

/// Runs the normalized weighted expectations along the schedule and compares
/// them with E[F_t M_t] for the matching limit martingale. The exponential
/// family with F = 1 evaluates in closed form through the laws layer.
ConvergenceReport verify_penalization_limit(const DiffusionSpec& spec, const VerifyConfig& cfg);

} // namespace gendiff

#endif
