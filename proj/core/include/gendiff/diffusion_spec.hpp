#ifndef GENDIFF_DIFFUSION_SPEC_HPP
#define GENDIFF_DIFFUSION_SPEC_HPP

#include "gendiff/boundary.hpp"
#include "gendiff/speed_measure.hpp"

namespace gendiff {

/// A generalized diffusion on natural scale with 0 regular-reflecting,
/// together with its derived constants.
struct DiffusionSpec {
    SpeedMeasure measure = SpeedMeasure::reflected_bm();
    BoundaryClass boundary_class = BoundaryClass::Type1Natural;
    double pi0 = 0.0;     // 1/m(inf), 0 when m(inf) = inf
    double m_infty = kInf;

    double ell() const { return measure.ell(); }
    double ell_prime() const { return measure.ell_prime(); }
    bool recurrent() const { return is_recurrent(boundary_class); }
    bool positive_recurrent() const { return pi0 > 0.0; }
};

/// Validates the measure, computes pi0 / m(inf) and classifies the boundary.
/// Throws SpecError for measures violating the invariants (0 not
/// regular-reflecting, negative density, ...), NonConvergence when the
/// boundary cannot be certified.
DiffusionSpec build_spec(const SpeedMeasure& measure, const ClassifyOptions& opts = {});

/// Normalized zero resolvent h0(x) = x - pi0 * int_0^x m(y) dy.
/// Exact (h0 = x) whenever pi0 = 0.
double h0(const DiffusionSpec& spec, double x);

/// Scale-derivative of h0: 1 - pi0 * m(x).
double h0_prime(const DiffusionSpec& spec, double x);

} // namespace gendiff

#endif
