#ifndef GENDIFF_WEIGHT_HPP
#define GENDIFF_WEIGHT_HPP

#include <vector>

#include "gendiff/rng.hpp"

namespace gendiff {

/// Nonnegative weight f with finite integral over [0, inf): exponential
/// e^{-cu}, the indicator of {u = 0} (handled symbolically: only f(0) terms
/// survive), or a piecewise-linear table with compact support.
class Weight {
public:
    enum class Kind { Exponential, IndicatorAtZero, Tabulated };

    static Weight exponential(double c);
    static Weight indicator_at_zero();
    static Weight tabulated(std::vector<double> knots, std::vector<double> values);

    Kind kind() const { return kind_; }
    double rate() const { return c_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(double u) const;
    double f0() const { return (*this)(0.0); }
    /// int_0^inf f(u) du.
    double total() const;
    /// Tail integral int_u^inf f.
    double tail(double u) const;
    /// int_0^inf e^{-rate u} f(shift + u) du; rate = 0 reduces to tail(shift).
    double exp_tail(double shift, double rate) const;
    /// Normalized copy (total = 1); rejects the indicator (zero mass).
    Weight normalized() const;
    bool is_indicator() const { return kind_ == Kind::IndicatorAtZero; }

    /// Draw from the density f/total (exponential or tabulated only).
    double sample(Rng& rng) const;

private:
    Weight() = default;
    Kind kind_ = Kind::Exponential;
    double c_ = 1.0;
    double scale_ = 1.0; // amplitude, so normalization stays closed-form
    std::vector<double> knots_, values_;
    std::vector<double> cum_; // cumulative mass at knots (tabulated)
};

} // namespace gendiff

#endif
