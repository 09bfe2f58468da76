#include "gendiff/weight.hpp"

#include <algorithm>
#include <cmath>

#include "gendiff/errors.hpp"

namespace gendiff {

Weight Weight::exponential(double c) {
    if (!(c > 0.0)) throw SpecError("exponential weight needs c > 0");
    Weight w;
    w.kind_ = Kind::Exponential;
    w.c_ = c;
    return w;
}

Weight Weight::indicator_at_zero() {
    Weight w;
    w.kind_ = Kind::IndicatorAtZero;
    return w;
}

Weight Weight::tabulated(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
        throw SpecError("tabulated weight needs matching arrays, >= 2 points");
    if (knots.front() < 0.0) throw SpecError("tabulated weight lives on [0, inf)");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i + 1] > knots[i])) throw SpecError("tabulated knots must increase");
    for (double v : values)
        if (v < 0.0 || !std::isfinite(v)) throw SpecError("weight must be >= 0 and finite");
    Weight w;
    w.kind_ = Kind::Tabulated;
    w.knots_ = std::move(knots);
    w.values_ = std::move(values);
    w.cum_.assign(w.knots_.size(), 0.0);
    for (std::size_t i = 1; i < w.knots_.size(); ++i)
        w.cum_[i] = w.cum_[i - 1] + 0.5 * (w.values_[i - 1] + w.values_[i]) *
                                        (w.knots_[i] - w.knots_[i - 1]);
    return w;
}

double Weight::operator()(double u) const {
    switch (kind_) {
        case Kind::Exponential:
            return scale_ * std::exp(-c_ * u);
        case Kind::IndicatorAtZero:
            return u == 0.0 ? scale_ : 0.0;
        case Kind::Tabulated: {
            if (u < knots_.front() || u >= knots_.back()) return 0.0;
            auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
            std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
            const double t = (u - knots_[j]) / (knots_[j + 1] - knots_[j]);
            return scale_ * (values_[j] + t * (values_[j + 1] - values_[j]));
        }
    }
    return 0.0;
}

double Weight::total() const {
    switch (kind_) {
        case Kind::Exponential:
            return scale_ / c_;
        case Kind::IndicatorAtZero:
            return 0.0;
        case Kind::Tabulated:
            return scale_ * cum_.back();
    }
    return 0.0;
}

double Weight::tail(double u) const {
    if (u <= 0.0) return total();
    switch (kind_) {
        case Kind::Exponential:
            return scale_ * std::exp(-c_ * u) / c_;
        case Kind::IndicatorAtZero:
            return 0.0;
        case Kind::Tabulated: {
            if (u >= knots_.back()) return 0.0;
            if (u <= knots_.front()) return scale_ * cum_.back();
            auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
            std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
            const double fu = (*this)(u) / scale_;
            const double seg = 0.5 * (fu + values_[j + 1]) * (knots_[j + 1] - u);
            return scale_ * (cum_.back() - cum_[j + 1] + seg);
        }
    }
    return 0.0;
}

namespace {

// int_a^b e^{-r w} (alpha + beta w) dw, stable as r -> 0
double linear_exp_integral(double a, double b, double r, double alpha, double beta) {
    if (b <= a) return 0.0;
    if (r * (b - a) < 1e-9 && r * b < 1e-9) {
        return alpha * (b - a) + 0.5 * beta * (b * b - a * a);
    }
    auto prim = [&](double w) {
        return -std::exp(-r * w) * ((alpha + beta * w) / r + beta / (r * r));
    };
    return prim(b) - prim(a);
}

} // namespace

double Weight::exp_tail(double shift, double rate) const {
    if (rate == 0.0) return tail(shift);
    switch (kind_) {
        case Kind::Exponential:
            return scale_ * std::exp(-c_ * shift) / (c_ + rate);
        case Kind::IndicatorAtZero:
            return 0.0;
        case Kind::Tabulated: {
            // int_0^inf e^{-rate u} f(shift+u) du; on each knot segment f is
            // linear in w = u (v = shift + w)
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
                const double a = std::max(knots_[j], shift);
                const double b = knots_[j + 1];
                if (b <= a) continue;
                const double slope = (values_[j + 1] - values_[j]) / (knots_[j + 1] - knots_[j]);
                const double f_at_a = values_[j] + slope * (a - knots_[j]);
                // on w in [a-shift, b-shift]: f = f_at_a + slope (w - (a-shift))
                const double w0 = a - shift;
                acc += linear_exp_integral(w0, b - shift, rate, f_at_a - slope * w0, slope);
            }
            return scale_ * acc;
        }
    }
    return 0.0;
}

Weight Weight::normalized() const {
    const double z = total();
    if (!(z > 0.0)) throw SpecError("weight is not normalizable");
    Weight w = *this;
    w.scale_ /= z;
    return w;
}

double Weight::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::Exponential:
            return rng.exponential(c_);
        case Kind::IndicatorAtZero:
            throw SpecError("indicator weight cannot be sampled as a density");
        case Kind::Tabulated: {
            const double target = rng.uniform() * cum_.back();
            auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
            std::size_t j = it == cum_.begin() ? 0 : static_cast<std::size_t>(it - cum_.begin()) - 1;
            if (j >= knots_.size() - 1) j = knots_.size() - 2;
            // invert the per-segment quadratic cumulative
            const double h = knots_[j + 1] - knots_[j];
            const double f0v = values_[j], f1v = values_[j + 1];
            const double rem = target - cum_[j];
            double t;
            const double slope = (f1v - f0v) / h;
            if (std::abs(slope) < 1e-14 * std::max(f0v, 1.0)) {
                t = f0v > 0.0 ? rem / f0v : 0.0;
            } else {
                const double disc = f0v * f0v + 2.0 * slope * rem;
                t = (-f0v + std::sqrt(std::max(disc, 0.0))) / slope;
            }
            return knots_[j] + std::clamp(t, 0.0, h);
        }
    }
    return 0.0;
}

} // namespace gendiff
