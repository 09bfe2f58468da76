#ifndef GENDIFF_REGISTRY_HPP
#define GENDIFF_REGISTRY_HPP

#include <string>
#include <vector>

#include "gendiff/diffusion_spec.hpp"

namespace gendiff {

struct NamedSpec {
    std::string name;
    DiffusionSpec spec;
    BoundaryClass expected_class; // from the appendix tables
};

/// The canonical example diffusions: reflected BM, the exp-decay density,
/// power drifts nu in {0.5, 1, 2, 3} (c = 1), reflecting Bessel processes
/// alpha in {0.25, 0.5, 0.75}, and the flat-truncated reflecting spec.
const std::vector<NamedSpec>& registry_specs();

/// Lookup by name; throws ConfigError listing the registry on a miss.
const NamedSpec& registry_lookup(const std::string& name);

} // namespace gendiff

#endif
