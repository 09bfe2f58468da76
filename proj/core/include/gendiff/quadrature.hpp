#ifndef GENDIFF_QUADRATURE_HPP
#define GENDIFF_QUADRATURE_HPP

#include <functional>

namespace gendiff {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_depth = 48;
    int max_panels = 1 << 16;
};

/// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts = {});

/// Integral over [a, +inf) by doubling windows; requires the window sums to
/// decay geometrically before it reports convergence.
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 const QuadOptions& opts = {});

/// Verdict of the tail-window certification machinery.
enum class TailVerdict { Convergent, Divergent, Undetermined };

struct TailReport {
    TailVerdict verdict = TailVerdict::Undetermined;
    double partial_sum = 0.0;     // sum of inspected windows
    double tail_bound = 0.0;      // bound on the remainder (convergent case)
    double fitted_exponent = 0.0; // window-mass decay exponent diagnostics
    int windows_used = 0;
    const char* rule = "";
};

struct TailOptions {
    int max_windows = 20;      // windows [B 2^k, B 2^{k+1}); cap 2^20 by default
    double base = 1.0;
    double blow_up = 1e9;      // partial sum beyond this scale certifies divergence
    double negligible = 1e-14; // window masses below this count as exhausted
};

/// Classifies sum_k m_k for m_k = window_mass(k) >= 0 over geometrically
/// growing windows. Decision ladder: geometric decay => convergent with a tail
/// bound; non-decaying or blow-up => divergent; otherwise fit the power-law
/// exponent of the window masses (window mass ~ 2^{k(1-p)}: p>1 converges) and,
/// in the flat-exponent regime, the log-scale exponent (mass ~ k^{-c}: c>1
/// converges). Anything still ambiguous is reported Undetermined.
TailReport classify_tail(const std::function<double(int)>& window_mass,
                         const TailOptions& opts = {});

} // namespace gendiff

#endif
