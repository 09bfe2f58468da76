#ifndef GENDIFF_EIGEN_HPP
#define GENDIFF_EIGEN_HPP

#include <functional>
#include <vector>

#include "gendiff/diffusion_spec.hpp"

namespace gendiff {

struct GridPolicy {
    int n = 4096;            // output grid resolution
    double r_max = 0.0;      // grid extent override (0 = automatic)
    double h_tol = 1e-8;     // relative tolerance on H(q)
    int max_doublings = 48;  // truncation-radius budget for the H limit
};

/// Grid solution of the eigenfunction system at one q:
///   phi(x) = 1 + q int_0^x dy int_(0,y] phi dm      (phi(0)=1, dphi(0)=0)
///   psi(x) = x + q int_0^x dy int_(0,y] psi dm      (psi(0)=0, dpsi(0)=1)
/// together with H = r_q(0,0) and rho = phi - psi/H.
struct EigenSolution {
    double q = 0.0;
    double H = 0.0;
    double pi0 = 0.0;
    double ell = kInf;
    std::vector<double> grid;
    std::vector<double> phi, dphi; // value and scale derivative at nodes
    std::vector<double> psi, dpsi;
    std::vector<double> rho, drho;

    double r_max() const { return grid.back(); }
    double phi_at(double x) const;
    double psi_at(double x) const;
    double rho_at(double x) const;
    double dphi_at(double x) const;
    double dpsi_at(double x) const;

    /// Resolvent density r_q(x,y) = H phi(x^y) rho(x v y) (symmetric).
    double resolvent(double x, double y) const;
    /// h_q(x) = r_q(0,0) - r_q(0,x) = H (1 - rho(x)).
    double h_q(double x) const;
    /// Wronskian residual phi psi' - phi' psi - 1 at node i, relative to scale.
    double wronskian_residual(std::size_t i) const;
};

/// Solves the system for spec at q > 0. Rejects regular-elastic right
/// boundaries and q outside [1e-6, inf). Throws NonConvergence (with the
/// bracketing interval) if the H(q) limit does not settle within budget.
EigenSolution solve_eigen(const DiffusionSpec& spec, double q, const GridPolicy& policy = {});

/// Generalized entry point used by the measure-transform layer: an arbitrary
/// nonnegative mass profile plus an optional killing rate k(x) >= 0, solving
/// (d/dm d/ds - k) f = q f. `mass_between(a,b)` must return the continuous
/// mass of (a,b]; atoms are passed separately.
struct SolverMeasure {
    std::function<double(double, double)> mass_between;
    std::vector<Atom> atoms;
    double ell_prime = kInf;
    double ell = kInf;
    std::function<double(double)> killing; // may be empty
    bool right_accessible_mass_finite = false; // m(ell-) < inf with ell' = ell < inf
    bool reflecting_right = false;             // ell' < ell: Neumann at ell'
};
EigenSolution solve_eigen_measure(const SolverMeasure& m, double q, double pi0, double ell,
                                  const GridPolicy& policy = {});

} // namespace gendiff

#endif
