#include "gendiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace gendiff {

double Accumulator::variance() const {
    if (n_ < 2) return 0.0;
    const double nd = static_cast<double>(n_);
    const double m = sum_ / nd;
    double v = (sumsq_ - nd * m * m) / (nd - 1.0);
    return v > 0.0 ? v : 0.0;
}

double Accumulator::std_error() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda > 4.0) return 0.0;
    double sum = 0.0;
    for (int k = 1; k <= 101; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// lambda with the Stephens finite-sample correction
double ks_lambda(double d, double n) {
    const double sn = std::sqrt(n);
    return d * (sn + 0.12 + 0.11 / sn);
}

} // namespace

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double effective_n) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    const double neff = effective_n > 0.0 ? effective_n : n;
    return {d, kolmogorov_tail(ks_lambda(d, neff)), neff};
}

double effective_sample_size(const std::vector<double>& weights) {
    double s = 0.0, s2 = 0.0;
    for (double w : weights) {
        s += w;
        s2 += w * w;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> aw,
                       std::vector<double> b, std::vector<double> bw) {
    const double na = aw.empty() ? static_cast<double>(a.size()) : effective_sample_size(aw);
    const double nb = bw.empty() ? static_cast<double>(b.size()) : effective_sample_size(bw);

    auto order_by_value = [](std::vector<double>& v, std::vector<double>& w) {
        if (w.empty()) {
            std::sort(v.begin(), v.end());
            return;
        }
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> v2(v.size()), w2(w.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            v2[k] = v[idx[k]];
            w2[k] = w[idx[k]];
        }
        v = std::move(v2);
        w = std::move(w2);
    };
    order_by_value(a, aw);
    order_by_value(b, bw);

    const double atot = aw.empty() ? static_cast<double>(a.size())
                                   : std::accumulate(aw.begin(), aw.end(), 0.0);
    const double btot = bw.empty() ? static_cast<double>(b.size())
                                   : std::accumulate(bw.begin(), bw.end(), 0.0);

    double d = 0.0, ca = 0.0, cb = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        const double xa = i < a.size() ? a[i] : std::numeric_limits<double>::infinity();
        const double xb = j < b.size() ? b[j] : std::numeric_limits<double>::infinity();
        if (xa <= xb) {
            ca += aw.empty() ? 1.0 : aw[i];
            ++i;
        } else {
            cb += bw.empty() ? 1.0 : bw[j];
            ++j;
        }
        d = std::max(d, std::abs(ca / atot - cb / btot));
    }

    const double neff = na * nb / (na + nb);
    return {d, kolmogorov_tail(ks_lambda(d, neff)), neff};
}

} // namespace gendiff
