#ifndef GENDIFF_THREADS_HPP
#define GENDIFF_THREADS_HPP

#include <cstdint>
#include <functional>

namespace gendiff {

/// Worker count resolution: explicit argument > GENDIFF_THREADS env > 1.
int resolve_threads(int requested = 0);

/// Runs fn(chunk_index) for chunk_index in [0, n_chunks) across `threads`
/// workers. Chunk-to-result mapping must be index-based on the caller side;
/// scheduling order is unspecified.
void parallel_for_chunks(std::uint64_t n_chunks, int threads,
                         const std::function<void(std::uint64_t)>& fn);

} // namespace gendiff

#endif
