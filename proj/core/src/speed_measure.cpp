#include "gendiff/speed_measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gendiff/errors.hpp"
#include "gendiff/quadrature.hpp"

namespace gendiff {

// ---------------------------------------------------------------------------
// Power drift on natural scale.
//
// Original coordinate u: scale s(u) = int_0^u exp(c y^nu) dy and speed density
// 2 exp(-c y^nu). On natural scale x = s(u) the speed density becomes
// 2 exp(-2 c u(x)^nu) where u(x) inverts s. The table stores cumulative
// (u, s(u), m(u), int m ds) on a grid refined with the stiffness of s', and
// evaluation integrates the closed-form derivatives from the nearest node.
// ---------------------------------------------------------------------------

struct SpeedMeasure::PullbackTable {
    double c = 1.0;
    double nu = 1.0;
    std::vector<double> u;     // original coordinate
    std::vector<double> s;     // natural-scale position s(u)
    std::vector<double> m;     // speed mass m(u) = 2 int_0^u exp(-c y^nu) dy
    std::vector<double> mint;  // int_0^{s(u)} m dz = int_0^u m(y) exp(c y^nu) dy

    double sprime(double y) const { return std::exp(c * std::pow(y, nu)); }
    double mdens_u(double y) const { return 2.0 * std::exp(-c * std::pow(y, nu)); }

    // 15-point Gauss-Kronrod over one short segment; segments are chosen small
    // enough that this is exact to machine precision.
    template <typename F>
    double seg(const F& f, double a, double b) const {
        QuadOptions opts;
        opts.abs_tol = 1e-15;
        opts.rel_tol = 1e-14;
        return integrate(f, a, b, opts).value;
    }

    void build(double z_max) {
        u = {0.0};
        s = {0.0};
        m = {0.0};
        mint = {0.0};
        double x = 0.0;
        // march until the natural-scale range covers z_max and the residual
        // speed mass beyond the table is negligible
        auto tail_negligible = [&] {
            if (x <= 1.0) return false;
            const double est =
                2.0 * mdens_u(x) * std::pow(x, 1.0 - nu) / (c * nu);
            return est < 0.5e-13 * (m.back() + 1.0);
        };
        while ((s.back() < z_max || !tail_negligible()) && s.back() < 1e18) {
            const double rate = c * nu * std::pow(std::max(x, 1e-9), nu - 1.0);
            const double h = std::clamp(0.25 / (1.0 + rate), 1e-4, 0.25);
            const double x1 = x + h;
            const double ds = seg([&](double y) { return sprime(y); }, x, x1);
            const double dm = seg([&](double y) { return mdens_u(y); }, x, x1);
            const double m0 = m.back();
            const double dmi = seg(
                [&](double y) {
                    return (m0 + seg([&](double t) { return mdens_u(t); }, x, y)) * sprime(y);
                },
                x, x1);
            u.push_back(x1);
            s.push_back(s.back() + ds);
            m.push_back(m0 + dm);
            mint.push_back(mint.back() + dmi);
            x = x1;
            if (u.size() > 2'000'000) throw NonConvergence("power_drift table too large", 0, 0);
        }
    }

    // Inverts s at z by bisection seed + Newton with the exact derivative.
    // Beyond the table the measure carries negligible mass; saturate.
    double invert(double z) const {
        if (z <= 0.0) return 0.0;
        if (z >= s.back()) return u.back();
        auto it = std::upper_bound(s.begin(), s.end(), z);
        std::size_t j = static_cast<std::size_t>(it - s.begin()) - 1;
        double lo = u[j], hi = u[j + 1];
        double x = 0.5 * (lo + hi);
        for (int iter = 0; iter < 60; ++iter) {
            const double sx = s[j] + seg([&](double y) { return sprime(y); }, u[j], x);
            const double err = sx - z;
            if (std::abs(err) < 1e-14 * (1.0 + z)) break;
            if (err > 0.0)
                hi = x;
            else
                lo = x;
            const double step = err / sprime(x);
            double xn = x - step;
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            x = xn;
        }
        return x;
    }

    double mass_at(double z) const {
        const double x = invert(z);
        auto it = std::upper_bound(u.begin(), u.end(), x);
        std::size_t j = static_cast<std::size_t>(it - u.begin());
        j = j > 0 ? j - 1 : 0;
        return m[j] + seg([&](double y) { return mdens_u(y); }, u[j], x);
    }

    double mass_integral_at(double z) const {
        const double x = invert(z);
        auto it = std::upper_bound(u.begin(), u.end(), x);
        std::size_t j = static_cast<std::size_t>(it - u.begin());
        j = j > 0 ? j - 1 : 0;
        const double m0 = m[j];
        return mint[j] + seg(
                             [&](double y) {
                                 return (m0 + seg([&](double t) { return mdens_u(t); }, u[j], y)) *
                                        sprime(y);
                             },
                             u[j], x);
    }

    double density_at(double z) const {
        const double x = invert(z);
        return 2.0 * std::exp(-2.0 * c * std::pow(x, nu));
    }
};

namespace {
constexpr double kPullbackRange = 4.5e6; // > 2^22; covers all tail windows
}

SpeedMeasure SpeedMeasure::reflected_bm() {
    SpeedMeasure m;
    m.kind_ = Kind::ReflectedBm;
    return m;
}

SpeedMeasure SpeedMeasure::exp_decay() {
    SpeedMeasure m;
    m.kind_ = Kind::ExpDecay;
    return m;
}

SpeedMeasure SpeedMeasure::power_drift(double c, double nu) {
    if (!(c > 0.0) || !(nu > 0.0))
        throw SpecError("power_drift requires c > 0 and nu > 0");
    SpeedMeasure m;
    m.kind_ = Kind::PowerDrift;
    m.c_ = c;
    m.nu_ = nu;
    auto table = std::make_shared<PullbackTable>();
    table->c = c;
    table->nu = nu;
    table->build(kPullbackRange);
    m.table_ = std::move(table);
    return m;
}

SpeedMeasure SpeedMeasure::bessel(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw SpecError("bessel requires alpha in (0,1) for a reflecting origin");
    SpeedMeasure m;
    m.kind_ = Kind::Bessel;
    m.alpha_ = alpha;
    return m;
}

SpeedMeasure SpeedMeasure::tabulated(std::vector<double> knots, std::vector<double> values,
                                     double ell_prime, double ell) {
    if (knots.size() < 2 || knots.size() != values.size())
        throw SpecError("tabulated density needs matching knot/value arrays, >= 2 points");
    if (knots.front() != 0.0) throw SpecError("tabulated density must start at 0");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i + 1] > knots[i])) throw SpecError("tabulated knots must increase");
    for (double v : values)
        if (v < 0.0 || !std::isfinite(v)) throw SpecError("tabulated density must be >= 0");
    SpeedMeasure m;
    m.kind_ = Kind::Tabulated;
    m.knots_ = std::move(knots);
    m.values_ = std::move(values);
    m.ell_prime_ = ell_prime;
    m.ell_ = ell;
    return m;
}

SpeedMeasure SpeedMeasure::edge_blowup(double coef, double power, double pole) {
    if (!(coef > 0.0) || !(power > 0.0) || !(pole > 0.0))
        throw SpecError("edge_blowup requires coef, power, pole > 0");
    SpeedMeasure m;
    m.kind_ = Kind::EdgeBlowup;
    m.c_ = coef;
    m.nu_ = power;
    m.ell_prime_ = pole;
    m.ell_ = pole;
    return m;
}

SpeedMeasure SpeedMeasure::with_atoms(std::vector<Atom> atoms) const {
    SpeedMeasure m = *this;
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    for (const Atom& a : atoms)
        if (!(a.position > 0.0) || !(a.mass > 0.0))
            throw SpecError("atoms need position > 0 and mass > 0");
    m.atoms_ = std::move(atoms);
    return m;
}

SpeedMeasure SpeedMeasure::with_ells(double ell_prime, double ell) const {
    if (!(ell_prime > 0.0) || ell < ell_prime)
        throw SpecError("need 0 < ell_prime <= ell");
    SpeedMeasure m = *this;
    m.ell_prime_ = ell_prime;
    m.ell_ = ell;
    return m;
}

double SpeedMeasure::density(double x) const {
    if (x < 0.0 || x >= ell_prime_) return 0.0;
    switch (kind_) {
        case Kind::ReflectedBm:
            return 2.0;
        case Kind::ExpDecay:
            return 2.0 * std::exp(-x);
        case Kind::PowerDrift:
            return table_->density_at(x);
        case Kind::Bessel: {
            if (x == 0.0) {
                const double e = (1.0 - 2.0 * alpha_) / alpha_;
                return e > 0.0 ? 0.0 : (e == 0.0 ? 2.0 : kInf);
            }
            return 2.0 * std::pow(2.0 * alpha_ * x, (1.0 - 2.0 * alpha_) / alpha_);
        }
        case Kind::Tabulated: {
            if (x >= knots_.back()) return 0.0;
            auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
            std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
            const double t = (x - knots_[j]) / (knots_[j + 1] - knots_[j]);
            return values_[j] + t * (values_[j + 1] - values_[j]);
        }
        case Kind::EdgeBlowup:
            return c_ * std::pow(ell_ - x, -nu_);
    }
    return 0.0;
}

double SpeedMeasure::continuous_mass(double x) const {
    const double xe = std::min(x, ell_prime_);
    if (xe <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::ReflectedBm:
            return 2.0 * xe;
        case Kind::ExpDecay:
            return 2.0 * (1.0 - std::exp(-xe));
        case Kind::PowerDrift:
            return table_->mass_at(xe);
        case Kind::Bessel:
            return std::pow(2.0 * alpha_ * xe, (1.0 - alpha_) / alpha_) / (1.0 - alpha_);
        case Kind::Tabulated: {
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
                const double a = knots_[j], b = knots_[j + 1];
                if (xe <= a) break;
                const double hi = std::min(xe, b);
                const double t = (hi - a) / (b - a);
                const double fhi = values_[j] + t * (values_[j + 1] - values_[j]);
                acc += 0.5 * (values_[j] + fhi) * (hi - a);
            }
            return acc;
        }
        case Kind::EdgeBlowup: {
            const double d = ell_ - xe;
            if (d <= 0.0) return kInf;
            if (nu_ == 1.0) return c_ * std::log(ell_ / d);
            return c_ * (std::pow(d, 1.0 - nu_) - std::pow(ell_, 1.0 - nu_)) / (nu_ - 1.0);
        }
    }
    return 0.0;
}

double SpeedMeasure::mass(double x) const {
    if (x >= ell_) return kInf;
    double m = continuous_mass(x);
    for (const Atom& a : atoms_)
        if (a.position <= x) m += a.mass;
    return m;
}

double SpeedMeasure::continuous_mass_integral(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::ReflectedBm:
            return x * x;
        case Kind::ExpDecay:
            return 2.0 * (x - 1.0 + std::exp(-x));
        case Kind::PowerDrift:
            if (x <= ell_prime_) return table_->mass_integral_at(x);
            break;
        case Kind::Bessel:
            return std::pow(2.0 * alpha_ * x, 1.0 / alpha_) / (2.0 * (1.0 - alpha_));
        default:
            break;
    }
    // generic: integrate the (continuous, nondecreasing) mass function
    QuadOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    const double flat_from = std::min(x, ell_prime_);
    double acc = integrate([&](double y) { return continuous_mass(y); }, 0.0, flat_from, opts).value;
    if (x > flat_from) acc += continuous_mass(flat_from) * (x - flat_from);
    return acc;
}

double SpeedMeasure::mass_integral(double x) const {
    double acc = continuous_mass_integral(x);
    for (const Atom& a : atoms_)
        if (a.position < x) acc += a.mass * (x - a.position);
    return acc;
}

std::string SpeedMeasure::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::ReflectedBm: os << "reflected_bm"; break;
        case Kind::ExpDecay: os << "exp_decay"; break;
        case Kind::PowerDrift: os << "power_drift(c=" << c_ << ",nu=" << nu_ << ")"; break;
        case Kind::Bessel: os << "bessel(alpha=" << alpha_ << ")"; break;
        case Kind::Tabulated: os << "tabulated(" << knots_.size() << " knots)"; break;
        case Kind::EdgeBlowup:
            os << "edge_blowup(coef=" << c_ << ",power=" << nu_ << ",pole=" << ell_ << ")";
            break;
    }
    if (!atoms_.empty()) os << "+" << atoms_.size() << " atoms";
    return os.str();
}

} // namespace gendiff
