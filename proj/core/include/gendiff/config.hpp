#ifndef GENDIFF_CONFIG_HPP
#define GENDIFF_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gendiff/diffusion_spec.hpp"
#include "gendiff/laws.hpp"

namespace gendiff {

/// Speed-measure (de)serialization. The JSON schema mirrors the config file
/// contract: keys `density` (named builtin with parameters), `atoms`,
/// `ell_prime`, `ell` (null or "inf" mean infinity).
SpeedMeasure measure_from_json_text(const std::string& text);
std::string measure_to_json_text(const SpeedMeasure& measure);

/// Loads a diffusion spec from a config file; the file may also be
/// {"registry": "<name>"} to pull a canonical example.
DiffusionSpec load_spec_file(const std::string& path);

/// Clock strings: "exp:Q", "hit:A", "ilt:A,U".
ClockSpec parse_clock(const std::string& text);
std::string clock_to_string(const ClockSpec& clock);

/// Weight strings: "exp:C", "ind0", "tab:FILE" (JSON file with "knots").
Weight parse_weight(const std::string& text);
std::string weight_to_string(const Weight& weight);

/// Configuration of a verification experiment (CLI `verify`).
struct ExperimentConfig {
    std::string spec_ref = "registry:reflected_bm";
    std::string theorem = "1.1"; // 1.1 | 1.2 | 1.3 | 1.4
    std::vector<double> schedule;
    std::string weight = "exp:1";
    double beta = 1.0; // theorem 1.4 weight rate
    double a = 1.0;    // theorem 1.4 level
    double u = 1.0;    // theorem 1.3 threshold
    double x0 = 0.0;
    double t = 0.5;
    std::uint64_t n_paths = 10000;
    double dt = 2e-4;
    std::uint64_t seed = 1;

    void validate() const; // schedule monotone, n >= 100, dt <= 1e-2
};

std::string experiment_to_json_text(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json_text(const std::string& text);

DiffusionSpec resolve_spec_ref(const std::string& ref);

} // namespace gendiff

#endif
