#include "gendiff/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "gendiff/errors.hpp"
#include "gendiff/threads.hpp"

namespace gendiff {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GENDIFF_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

void parallel_for_chunks(std::uint64_t n_chunks, int threads,
                         const std::function<void(std::uint64_t)>& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n_chunks <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

namespace {

constexpr std::uint64_t kChunk = 1024;

// Pairwise in-order reduction over chunk partials: the tree shape depends only
// on the chunk count, never on scheduling.
template <typename T>
T pairwise_reduce(std::vector<T>& items) {
    std::size_t n = items.size();
    while (n > 1) {
        std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) items[i].merge(items[i + half]);
        n = half;
    }
    return items.empty() ? T{} : items[0];
}

struct ChunkPartial {
    Accumulator acc;
    std::uint64_t failures = 0;
    void merge(const ChunkPartial& o) {
        acc.merge(o.acc);
        failures += o.failures;
    }
};

} // namespace

MCEstimate mc_expect(const PathFunctional& fn, std::uint64_t n, std::uint64_t seed,
                     const McOptions& opts) {
    if (n < 2) throw SpecError("mc_expect: need n >= 2 samples");
    const std::uint64_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<ChunkPartial> partials(n_chunks);

    parallel_for_chunks(n_chunks, opts.threads, [&](std::uint64_t c) {
        ChunkPartial p;
        const std::uint64_t lo = c * kChunk;
        const std::uint64_t hi = std::min(n, lo + kChunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            Rng rng(seed, i);
            try {
                p.acc.add(fn(i, rng));
            } catch (const PathError&) {
                ++p.failures;
            }
        }
        partials[c] = p;
    });

    ChunkPartial total = pairwise_reduce(partials);
    if (static_cast<double>(total.failures) >
        opts.max_failure_rate * static_cast<double>(n)) {
        throw NonConvergence("mc_expect: path failure rate " +
                                 std::to_string(total.failures) + "/" + std::to_string(n) +
                                 " exceeds limit",
                             0.0, 0.0);
    }
    return total.acc.estimate(seed);
}

namespace {

struct VectorPartial {
    std::vector<Accumulator> comp;
    std::vector<Accumulator> diff;
    std::uint64_t failures = 0;
    void init(std::size_t m) {
        comp.resize(m);
        diff.resize(m > 0 ? m - 1 : 0);
    }
    void merge(const VectorPartial& o) {
        if (comp.empty()) {
            *this = o;
            return;
        }
        for (std::size_t i = 0; i < comp.size(); ++i) comp[i].merge(o.comp[i]);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i].merge(o.diff[i]);
        failures += o.failures;
    }
};

} // namespace

MCVectorEstimate mc_expect_vector(const VectorPathFunctional& fn, std::size_t m,
                                  std::uint64_t n, std::uint64_t seed,
                                  const McOptions& opts) {
    if (n < 2) throw SpecError("mc_expect_vector: need n >= 2 samples");
    if (m == 0) throw SpecError("mc_expect_vector: need m >= 1 components");
    const std::uint64_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<VectorPartial> partials(n_chunks);

    parallel_for_chunks(n_chunks, opts.threads, [&](std::uint64_t c) {
        VectorPartial p;
        p.init(m);
        std::vector<double> out(m);
        const std::uint64_t lo = c * kChunk;
        const std::uint64_t hi = std::min(n, lo + kChunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            Rng rng(seed, i);
            try {
                fn(i, rng, out);
                for (std::size_t k = 0; k < m; ++k) p.comp[k].add(out[k]);
                for (std::size_t k = 0; k + 1 < m; ++k) p.diff[k].add(out[k + 1] - out[k]);
            } catch (const PathError&) {
                ++p.failures;
            }
        }
        partials[c] = std::move(p);
    });

    VectorPartial total = pairwise_reduce(partials);
    if (static_cast<double>(total.failures) >
        opts.max_failure_rate * static_cast<double>(n)) {
        throw NonConvergence("mc_expect_vector: path failure rate too high", 0.0, 0.0);
    }
    MCVectorEstimate est;
    est.components.reserve(m);
    for (auto& a : total.comp) est.components.push_back(a.estimate(seed));
    for (auto& d : total.diff) {
        est.adjacent_diff_mean.push_back(d.mean());
        est.adjacent_diff_std_error.push_back(d.std_error());
    }
    return est;
}

} // namespace gendiff
