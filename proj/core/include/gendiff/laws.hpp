#ifndef GENDIFF_LAWS_HPP
#define GENDIFF_LAWS_HPP

#include "gendiff/diffusion_spec.hpp"
#include "gendiff/eigen.hpp"
#include "gendiff/weight.hpp"

namespace gendiff {

/// Clocks under which the local time is read off.
struct ClockSpec {
    enum class Kind { Exponential, Hitting, InverseLocalTime };
    Kind kind = Kind::Exponential;
    double q = 1.0; // exponential rate
    double a = 1.0; // hitting level / local-time level
    double u = 1.0; // local-time threshold

    static ClockSpec exponential(double q);
    static ClockSpec hitting(double a);
    static ClockSpec inverse_local_time(double a, double u);
};

/// E_x[f(L at the exponential clock e_q)]:
///   (1/H){ h_q(x) f(0) + (r_q(x,0)/r_q(0,0)) int_0^inf e^{-u/H} f(u) du }.
double law_exp_clock(const DiffusionSpec& spec, const EigenSolution& sol, const Weight& f,
                     double x);

/// E_x[f(L_inf)] for transient specs (ell < inf):
///   (1/ell){ x f(0) + (1 - x/ell) int_0^inf e^{-u/ell} f(u) du }.
double law_L_infty(const DiffusionSpec& spec, const Weight& f, double x);

/// E_x[int_0^inf f(L_t) dt] for positive-recurrent specs:
///   (1/pi0){ h0(x) f(0) + int_0^inf f }.
double green_occupation(const DiffusionSpec& spec, const Weight& f, double x);

/// E_x[f(L at T_a)] for 0 <= x < a:
///   (1/a){ x f(0) + (1 - x/a) int_0^inf e^{-u/a} f(u) du }.
/// a <= x collapses to f(0) exactly and is flagged degenerate.
struct HittingLawValue {
    double value;
    bool degenerate;
};
HittingLawValue law_hitting_clock(const DiffusionSpec& spec, const Weight& f, double x,
                                  double a);

/// Law of L at the inverse local-time clock eta^a_u, started at a:
/// atom e^{-u/a} at zero plus the density rho^a_u on (0, inf).
class LocalTimeLaw {
public:
    LocalTimeLaw(double a, double u);
    double atom_at_zero() const { return atom_; }
    double density(double y) const;
    /// atom + int e^{-beta y} density(y) dy, closed form e^{-u beta/(1+beta a)}.
    double laplace(double beta) const;
    /// atom + int_0^L density; L <= 0 gives the atom.
    double cdf(double y) const;
    /// total mass (atom + integral), 1 up to quadrature error.
    double normalization() const;
    double sample(Rng& rng) const;
    double level() const { return a_; }
    double threshold() const { return u_; }

private:
    double a_, u_, atom_;
};

LocalTimeLaw law_inverse_lt_clock(double a, double u);

/// E_x[f(L at eta^a_u)] for recurrent specs with ell = inf:
///   (x^a)/a P_a[f(L_eta)] + (1/a)(1 - x/a)_+ int f(y) rho~^a_u(y) dy.
double law_inverse_lt_clock_from_x(const DiffusionSpec& spec, double x, double a, double u,
                                   const Weight& f);

/// Total-local-time law of the penalized measures started at 0.
struct TotalLocalTimeLaw {
    enum class Kind { Density, DegenerateInfinity };
    Kind kind = Kind::Density;
    Weight density = Weight::exponential(1.0); // meaningful when kind == Density
    /// Q(L_inf >= u).
    double tail(double u) const;
};

enum class HKind { H0, Scale };

/// Penalization by f(L) with h in {h0, s}: h = s gives density f always;
/// h = h0 gives f when pi0 = 0 and L_inf = inf a.s. when pi0 > 0.
/// Requires int f = 1.
TotalLocalTimeLaw q_total_local_time(const DiffusionSpec& spec, HKind h, const Weight& f);
/// The exponential (beta, a) weight: L_inf = inf a.s. in every case.
TotalLocalTimeLaw q_total_local_time(const DiffusionSpec& spec, double beta, double a);

} // namespace gendiff

#endif
