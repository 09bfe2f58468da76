#ifndef GENDIFF_MC_HPP
#define GENDIFF_MC_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "gendiff/rng.hpp"
#include "gendiff/stats.hpp"

namespace gendiff {

/// One value per independent seeded path. Throw PathError to mark a path failed.
using PathFunctional = std::function<double(std::uint64_t path_index, Rng& rng)>;

struct McOptions {
    int threads = 0;             // 0 = resolve from environment
    double max_failure_rate = 1e-3;
};

/// Mean and standard error of `fn` over n independent streams keyed by
/// (seed, path_index). Bitwise deterministic for fixed (seed, n): values are
/// accumulated in fixed chunks and chunk partials are reduced pairwise in
/// index order, so the worker count never affects the result.
MCEstimate mc_expect(const PathFunctional& fn, std::uint64_t n, std::uint64_t seed,
                     const McOptions& opts = {});

/// Multi-statistic variant: fn fills `out` (size m) for one path; returns the
/// per-component estimates plus, optionally, covariance-free paired SEs for
/// differences out[i] - out[i+1] (common random numbers).
struct MCVectorEstimate {
    std::vector<MCEstimate> components;
    std::vector<double> adjacent_diff_mean;      // mean(out[i+1] - out[i])
    std::vector<double> adjacent_diff_std_error; // paired SE of that difference
};
using VectorPathFunctional =
    std::function<void(std::uint64_t path_index, Rng& rng, std::vector<double>& out)>;
MCVectorEstimate mc_expect_vector(const VectorPathFunctional& fn, std::size_t m,
                                  std::uint64_t n, std::uint64_t seed,
                                  const McOptions& opts = {});

} // namespace gendiff

#endif
