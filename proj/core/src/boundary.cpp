#include "gendiff/boundary.hpp"

#include <cmath>

#include "gendiff/errors.hpp"

namespace gendiff {

const char* to_string(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::RegularReflecting: return "regular-reflecting";
        case BoundaryClass::RegularElastic: return "regular-elastic";
        case BoundaryClass::RegularAbsorbing: return "regular-absorbing";
        case BoundaryClass::Exit: return "exit";
        case BoundaryClass::Entrance: return "entrance";
        case BoundaryClass::Type1Natural: return "type-1-natural";
        case BoundaryClass::Type2Natural: return "type-2-natural";
        case BoundaryClass::Type3Natural: return "type-3-natural";
    }
    return "?";
}

BoundaryClass boundary_class_from_string(const std::string& s) {
    for (BoundaryClass c :
         {BoundaryClass::RegularReflecting, BoundaryClass::RegularElastic,
          BoundaryClass::RegularAbsorbing, BoundaryClass::Exit, BoundaryClass::Entrance,
          BoundaryClass::Type1Natural, BoundaryClass::Type2Natural, BoundaryClass::Type3Natural})
        if (s == to_string(c)) return c;
    throw ConfigError("unknown boundary class: " + s);
}

bool is_recurrent(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::RegularReflecting:
        case BoundaryClass::Entrance:
        case BoundaryClass::Type1Natural:
        case BoundaryClass::Type2Natural:
            return true;
        default:
            return false;
    }
}

bool is_inaccessible(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::Entrance:
        case BoundaryClass::Type1Natural:
        case BoundaryClass::Type2Natural:
        case BoundaryClass::Type3Natural:
            return true;
        default:
            return false;
    }
}

namespace {

// Mass of dm on a window, continuous part via the cumulative m plus atoms.
double window_mass(const SpeedMeasure& m, double lo, double hi) {
    double v = m.mass(hi) - m.mass(lo);
    return std::isfinite(v) ? v : kInf;
}

// integral of g dm over (lo, hi] for g(x) = x - shift (used by the J-test and
// the exit test). Continuous part by quadrature on g * density, atoms exact.
double weighted_window(const SpeedMeasure& m, double lo, double hi, double shift,
                       double sign) {
    QuadOptions q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-9;
    double v = integrate([&](double x) { return sign * (x - shift) * m.density(x); }, lo, hi, q)
                   .value;
    for (const Atom& a : m.atoms())
        if (a.position > lo && a.position <= hi) v += sign * (a.position - shift) * a.mass;
    return v;
}

TailReport certify_or_throw(const TailReport& rep, const char* what) {
    if (rep.verdict == TailVerdict::Undetermined)
        throw NonConvergence(std::string("undetermined: ") + what +
                                 " (rule: " + rep.rule + ")",
                             rep.partial_sum, kInf);
    return rep;
}

// Once convergence is certified, refine the value: keep summing windows until
// they stop registering.
double refined_window_sum(const std::function<double(int)>& window_mass, int from) {
    double total = 0.0;
    double last = kInf;
    for (int k = 0; k < from + 80; ++k) {
        const double m = std::max(0.0, window_mass(k));
        total += m;
        if (k >= from) {
            if (m <= 1e-14 * (total + 1.0) && last <= 1e-14 * (total + 1.0)) break;
            last = m;
        }
    }
    return total;
}

} // namespace

double total_mass(const SpeedMeasure& measure, const ClassifyOptions& opts) {
    if (std::isfinite(measure.ell_prime())) {
        double v = measure.mass(measure.ell_prime() * (1.0 - 1e-12));
        if (measure.ell_prime() == measure.ell()) {
            // mass may blow up at the pole; certify with shrinking windows
            TailOptions t = opts.tail;
            const double pole = measure.ell();
            auto wmass = [&](int k) {
                const double d1 = pole * std::pow(2.0, -(k + 1));
                const double d0 = pole * std::pow(2.0, -k);
                return window_mass(measure, pole - d0, pole - d1);
            };
            // windows [pole - pole 2^-k, pole - pole 2^-(k+1)] tile [0, pole)
            TailReport rep = certify_or_throw(classify_tail(wmass, t), "m(ell-) finiteness");
            if (rep.verdict == TailVerdict::Divergent) return kInf;
            return refined_window_sum(wmass, rep.windows_used);
        }
        return v;
    }
    TailOptions t = opts.tail;
    auto wmass = [&](int k) {
        const double lo = t.base * std::pow(2.0, k);
        const double hi = t.base * std::pow(2.0, k + 1);
        return window_mass(measure, lo, hi);
    };
    TailReport rep = certify_or_throw(classify_tail(wmass, t), "m(inf) finiteness");
    if (rep.verdict == TailVerdict::Divergent) return kInf;
    return measure.mass(t.base) + refined_window_sum(wmass, rep.windows_used);
}

BoundaryClass classify_boundary(const SpeedMeasure& measure, const ClassifyOptions& opts) {
    const double lp = measure.ell_prime();
    const double l = measure.ell();

    if (std::isfinite(lp) && lp < l)
        return std::isinf(l) ? BoundaryClass::RegularReflecting : BoundaryClass::RegularElastic;

    if (std::isfinite(l)) {
        // ell' = ell < inf
        const double m_near = total_mass(measure, opts);
        if (std::isfinite(m_near)) return BoundaryClass::RegularAbsorbing;
        // exit test: int (ell - x) dm near the pole
        TailOptions t = opts.tail;
        auto wmass = [&](int k) {
            const double d1 = l * std::pow(2.0, -(k + 1));
            const double d0 = l * std::pow(2.0, -k);
            return weighted_window(measure, l - d0, l - d1, l, -1.0);
        };
        TailReport rep = certify_or_throw(classify_tail(wmass, t), "exit integral");
        return rep.verdict == TailVerdict::Convergent ? BoundaryClass::Exit
                                                      : BoundaryClass::Type3Natural;
    }

    // ell' = ell = inf
    const double m_inf = total_mass(measure, opts);
    if (std::isinf(m_inf)) return BoundaryClass::Type1Natural;

    TailOptions t = opts.tail;
    auto wmass = [&](int k) {
        const double lo = std::max(1.0, t.base) * std::pow(2.0, k);
        const double hi = std::max(1.0, t.base) * std::pow(2.0, k + 1);
        return weighted_window(measure, lo, hi, 1.0, 1.0);
    };
    TailReport rep = certify_or_throw(classify_tail(wmass, t), "entrance J-integral");
    return rep.verdict == TailVerdict::Convergent ? BoundaryClass::Entrance
                                                  : BoundaryClass::Type2Natural;
}

} // namespace gendiff
