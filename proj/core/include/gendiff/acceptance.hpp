#ifndef GENDIFF_ACCEPTANCE_HPP
#define GENDIFF_ACCEPTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gendiff/report.hpp"

namespace gendiff {

struct AcceptOptions {
    int threads = 0;
};

/// Registered acceptance suites: "full" (every criterion at its stated
/// parameters), "analytic" (quadrature/eigen identities, < 60 s), "mc-small"
/// (the Monte-Carlo criteria at n = 1e4 with correspondingly wider bands).
std::vector<std::string> acceptance_suites();

/// Runs a suite; deterministic given (suite, seed). Throws ConfigError for an
/// unknown suite (the message lists the available ones).
Report run_acceptance(const std::string& suite, std::uint64_t seed,
                      const AcceptOptions& opts = {});

} // namespace gendiff

#endif
