#ifndef GENDIFF_BOUNDARY_HPP
#define GENDIFF_BOUNDARY_HPP

#include <string>

#include "gendiff/quadrature.hpp"
#include "gendiff/speed_measure.hpp"

namespace gendiff {

enum class BoundaryClass {
    RegularReflecting,
    RegularElastic,
    RegularAbsorbing,
    Exit,
    Entrance,
    Type1Natural,
    Type2Natural,
    Type3Natural,
};

const char* to_string(BoundaryClass c);
BoundaryClass boundary_class_from_string(const std::string& s);

/// True when the class describes a recurrent point 0 (ell = infinity).
bool is_recurrent(BoundaryClass c);
/// Right boundary inaccessible from the interior (entrance or natural).
bool is_inaccessible(BoundaryClass c);

struct ClassifyOptions {
    TailOptions tail; // certification budget for the improper integrals
};

/// Classifies the right boundary ell' of the diffusion from the case matrix:
///   ell' < ell = inf                regular-reflecting
///   ell' < ell < inf                regular-elastic
///   ell' = ell < inf                m(ell-) < inf: regular-absorbing
///                                   else int (ell-x) dm < inf: exit, o.w. type-3-natural
///   ell' = ell = inf, m(inf) = inf  type-1-natural
///   ell' = ell = inf, m(inf) < inf  int_(1,inf) x dm < inf: entrance, o.w. type-2-natural
/// Throws NonConvergence("undetermined", ...) when the tail certification
/// cannot decide within budget.
BoundaryClass classify_boundary(const SpeedMeasure& measure, const ClassifyOptions& opts = {});

/// Certified total mass m(inf); +inf when divergent.
double total_mass(const SpeedMeasure& measure, const ClassifyOptions& opts = {});

} // namespace gendiff

#endif
