#ifndef GENDIFF_ERRORS_HPP
#define GENDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gendiff {

/// Invalid input data or parameters (bad measure, out-of-range argument, ...).
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to certify its result within budget.
/// Carries the best bracketing interval known at the time of failure.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double lower, double upper)
        : std::runtime_error(what), lower(lower), upper(upper) {}
    double lower;
    double upper;
};

/// Configuration / CLI usage error.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure of a single Monte-Carlo path (propagated and counted by mc_expect).
class PathError : public std::runtime_error {
public:
    explicit PathError(const std::string& what) : std::runtime_error(what) {}
};

// Exit codes used by the CLI and the acceptance runner.
enum ExitCode : int {
    kExitPass = 0,
    kExitFail = 1,
    kExitConfig = 2,
    kExitNonConvergence = 3,
};

} // namespace gendiff

#endif
