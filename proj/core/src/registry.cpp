#include "gendiff/registry.hpp"

#include <sstream>

#include "gendiff/errors.hpp"

namespace gendiff {

const std::vector<NamedSpec>& registry_specs() {
    static const std::vector<NamedSpec> specs = [] {
        std::vector<NamedSpec> v;
        auto add = [&v](std::string name, SpeedMeasure m, BoundaryClass expected) {
            v.push_back({std::move(name), build_spec(m), expected});
        };
        add("reflected_bm", SpeedMeasure::reflected_bm(), BoundaryClass::Type1Natural);
        add("exp_decay", SpeedMeasure::exp_decay(), BoundaryClass::Entrance);
        add("power_drift_nu0.5", SpeedMeasure::power_drift(1.0, 0.5),
            BoundaryClass::Type2Natural);
        add("power_drift_nu1", SpeedMeasure::power_drift(1.0, 1.0),
            BoundaryClass::Type2Natural);
        add("power_drift_nu2", SpeedMeasure::power_drift(1.0, 2.0),
            BoundaryClass::Type2Natural);
        add("power_drift_nu3", SpeedMeasure::power_drift(1.0, 3.0), BoundaryClass::Entrance);
        add("bessel_alpha0.25", SpeedMeasure::bessel(0.25), BoundaryClass::Type1Natural);
        add("bessel_alpha0.5", SpeedMeasure::bessel(0.5), BoundaryClass::Type1Natural);
        add("bessel_alpha0.75", SpeedMeasure::bessel(0.75), BoundaryClass::Type1Natural);
        add("flat_truncated", SpeedMeasure::tabulated({0.0, 1.0}, {2.0, 2.0}, 1.0, kInf),
            BoundaryClass::RegularReflecting);
        return v;
    }();
    return specs;
}

const NamedSpec& registry_lookup(const std::string& name) {
    for (const NamedSpec& s : registry_specs())
        if (s.name == name) return s;
    std::ostringstream os;
    os << "unknown registry spec '" << name << "'; available:";
    for (const NamedSpec& s : registry_specs()) os << " " << s.name;
    throw ConfigError(os.str());
}

} // namespace gendiff
