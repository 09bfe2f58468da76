#ifndef GENDIFF_SPEED_MEASURE_HPP
#define GENDIFF_SPEED_MEASURE_HPP

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace gendiff {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
    double position;
    double mass;
};

/// Speed measure m of a generalized diffusion on natural scale s(x) = x:
/// piecewise-smooth density plus finitely many atoms, strictly increasing on
/// [0, ell_prime), flat and finite on [ell_prime, ell), infinite from ell on.
class SpeedMeasure {
public:
    enum class Kind { ReflectedBm, ExpDecay, PowerDrift, Bessel, Tabulated, EdgeBlowup };

    // Named constructors for the builtin families.
    static SpeedMeasure reflected_bm();
    static SpeedMeasure exp_decay();
    /// Diffusion with drift -c nu x^{nu-1}/2 against unit Brownian noise,
    /// pulled to natural scale. c > 0, nu > 0.
    static SpeedMeasure power_drift(double c, double nu);
    /// Reflecting Bessel process of index alpha in (0,1) on natural scale.
    static SpeedMeasure bessel(double alpha);
    /// Piecewise-linear density on the given knots, zero beyond the last knot.
    static SpeedMeasure tabulated(std::vector<double> knots, std::vector<double> values,
                                  double ell_prime, double ell);
    /// density = coef * (pole - x)^(-power) on [0, pole); ell_prime = ell = pole.
    static SpeedMeasure edge_blowup(double coef, double power, double pole);

    SpeedMeasure with_atoms(std::vector<Atom> atoms) const;
    SpeedMeasure with_ells(double ell_prime, double ell) const;

    Kind kind() const { return kind_; }
    double ell_prime() const { return ell_prime_; }
    double ell() const { return ell_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool absolutely_continuous() const { return atoms_.empty(); }

    /// Density dm/dx of the continuous part (0 on the flat region).
    double density(double x) const;
    /// m(x): continuous mass on [0, x] plus atoms at positions <= x;
    /// +infinity for x >= ell.
    double mass(double x) const;
    /// integral_0^x m(y) dy (atoms contribute mass * (x - position)+).
    double mass_integral(double x) const;

    // Parameter access (serialization, registry naming).
    double param_c() const { return c_; }
    double param_nu() const { return nu_; }
    double param_alpha() const { return alpha_; }
    double param_coef() const { return c_; }
    double param_power() const { return nu_; }
    double param_pole() const { return ell_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

    std::string describe() const;

private:
    SpeedMeasure() = default;

    struct PullbackTable; // power-drift natural-scale tables

    double continuous_mass(double x) const;
    double continuous_mass_integral(double x) const;

    Kind kind_ = Kind::ReflectedBm;
    double c_ = 0.0, nu_ = 0.0, alpha_ = 0.0;
    std::vector<double> knots_, values_;
    std::vector<Atom> atoms_;
    double ell_prime_ = kInf;
    double ell_ = kInf;
    std::shared_ptr<const PullbackTable> table_;
};

} // namespace gendiff

#endif
