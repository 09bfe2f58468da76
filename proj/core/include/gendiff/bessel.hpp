#ifndef GENDIFF_BESSEL_HPP
#define GENDIFF_BESSEL_HPP

namespace gendiff {

/// Modified Bessel function of the first kind, integer order 0 or 1.
/// Power series below the crossover argument, Hankel asymptotic expansion
/// above; relative error <= 1e-12 on [0, inf).
double bessel_i(int nu, double x);

/// exp(-x) * I_nu(x); safe for arbitrarily large x.
double bessel_i_scaled(int nu, double x);

/// Crossover argument between the series and asymptotic branches.
double bessel_crossover();

/// Density of the nonzero part of the local-time law at an inverse
/// local-time clock: rho^a_u(y) = e^{-(u+y)/a} (sqrt(u/y)/a) I_1(2 sqrt(uy)/a).
double rho_density(double a, double u, double y);

/// Companion kernel with I_0: rho~^a_u(y) = e^{-(u+y)/a} I_0(2 sqrt(uy)/a).
double rho_tilde_density(double a, double u, double y);

/// Constant C with I_nu(x) <= C x^nu on (0,1] and I_nu(x) <= C e^x on [1,inf),
/// fitted once from the asymptotics (nu in {0,1}).
double bessel_bound_constant();

} // namespace gendiff

#endif
