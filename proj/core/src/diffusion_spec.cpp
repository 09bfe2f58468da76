#include "gendiff/diffusion_spec.hpp"

#include <cmath>

#include "gendiff/errors.hpp"

namespace gendiff {

namespace {

void validate_measure(const SpeedMeasure& m) {
    const double lp = m.ell_prime();
    if (!(lp > 0.0)) throw SpecError("need ell_prime > 0");
    if (m.ell() < lp) throw SpecError("need ell >= ell_prime");

    // density >= 0 and m strictly increasing on [0, ell_prime): sample m on a
    // geometric grid (atoms may carry the growth where the density vanishes)
    const double hi = std::isfinite(lp) ? lp : 64.0;
    double prev_x = 0.0, prev_m = 0.0;
    for (int j = 1; j <= 48; ++j) {
        const double x = hi * std::pow(2.0, -(48 - j) * 0.5);
        if (x <= prev_x) continue;
        const double d = m.density(0.5 * (prev_x + x));
        if (d < 0.0 || std::isnan(d)) throw SpecError("density must be nonnegative");
        const double mx = m.mass(std::min(x, lp * (1.0 - 1e-12)));
        // an increment may vanish in floating point when the density is
        // genuinely tiny; only a true flat stretch (zero density, no atom,
        // zero increment) violates strict monotonicity
        if (!(mx > prev_m) && d <= 0.0)
            throw SpecError("speed measure not strictly increasing on [0, ell_prime) near x=" +
                            std::to_string(x));
        prev_x = x;
        prev_m = std::max(mx, prev_m);
    }

    // 0 regular-reflecting: m(eps) in (0, inf) for small eps
    const double eps = std::min(1e-6, lp * 1e-6);
    const double me = m.mass(eps);
    if (!(me > 0.0)) throw SpecError("0 is not regular-reflecting: m(eps) = 0");
    if (!std::isfinite(me)) throw SpecError("0 is not regular-reflecting: m(eps) = inf");

    for (const Atom& a : m.atoms()) {
        if (!(a.position > 0.0) || !(a.position < lp))
            throw SpecError("atoms must sit in (0, ell_prime)");
        if (!(a.mass > 0.0)) throw SpecError("atom masses must be positive");
    }
}

} // namespace

DiffusionSpec build_spec(const SpeedMeasure& measure, const ClassifyOptions& opts) {
    validate_measure(measure);
    DiffusionSpec spec;
    spec.measure = measure;
    spec.m_infty = total_mass(measure, opts);
    spec.pi0 = std::isfinite(spec.m_infty) ? 1.0 / spec.m_infty : 0.0;
    spec.boundary_class = classify_boundary(measure, opts);
    return spec;
}

double h0(const DiffusionSpec& spec, double x) {
    if (x < 0.0 || x >= spec.ell()) throw SpecError("h0: position outside [0, ell)");
    if (spec.pi0 == 0.0) return x;
    return x - spec.pi0 * spec.measure.mass_integral(x);
}

double h0_prime(const DiffusionSpec& spec, double x) {
    if (spec.pi0 == 0.0) return 1.0;
    return 1.0 - spec.pi0 * spec.measure.mass(x);
}

} // namespace gendiff
