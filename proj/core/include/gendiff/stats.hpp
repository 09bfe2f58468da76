#ifndef GENDIFF_STATS_HPP
#define GENDIFF_STATS_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace gendiff {

/// The unit of every Monte-Carlo result.
struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample std / sqrt(n)
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Streaming mean/variance accumulator (sum and sum of squares with
/// compensated addition; accumulation order is the caller's contract).
class Accumulator {
public:
    void add(double x) {
        kahan_add(sum_, comp_, x);
        kahan_add(sumsq_, compsq_, x * x);
        ++n_;
    }
    void merge(const Accumulator& other) {
        kahan_add(sum_, comp_, other.sum_);
        kahan_add(sumsq_, compsq_, other.sumsq_);
        n_ += other.n_;
    }
    std::uint64_t count() const { return n_; }
    double sum() const { return sum_; }
    double mean() const { return n_ ? sum_ / static_cast<double>(n_) : 0.0; }
    double variance() const;   // unbiased sample variance
    double std_error() const;  // sqrt(variance/n)
    MCEstimate estimate(std::uint64_t seed) const {
        return {mean(), std_error(), n_, seed};
    }

private:
    static void kahan_add(double& s, double& c, double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double sum_ = 0.0, comp_ = 0.0;
    double sumsq_ = 0.0, compsq_ = 0.0;
    std::uint64_t n_ = 0;
};

/// One-sided Kolmogorov distribution tail: P(sqrt(n) D > lambda).
double kolmogorov_tail(double lambda);

/// One-sample KS against a fully specified CDF. Samples need not be sorted.
/// `effective_n` overrides the sample count in the p-value (weighted samples).
struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    double effective_n = 0.0;
};
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double effective_n = 0.0);

/// Two-sample KS; either side may carry per-sample weights (empty = unweighted).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> aw,
                       std::vector<double> b, std::vector<double> bw);

/// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(const std::vector<double>& weights);

} // namespace gendiff

#endif
