#include "gendiff/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "gendiff/errors.hpp"
#include "gendiff/registry.hpp"

namespace gendiff {

using nlohmann::json;

namespace {

double ell_from_json(const json& j, double fallback) {
    if (j.is_null()) return fallback;
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        throw ConfigError("ell fields accept numbers, null or \"inf\"");
    }
    return j.get<double>();
}

json ell_to_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

SpeedMeasure measure_from_json(const json& j) {
    if (!j.contains("density")) throw ConfigError("spec config: missing 'density'");
    const json& d = j.at("density");
    const std::string name = d.at("name").get<std::string>();

    SpeedMeasure m = [&]() -> SpeedMeasure {
        if (name == "reflected_bm") return SpeedMeasure::reflected_bm();
        if (name == "exp_decay") return SpeedMeasure::exp_decay();
        if (name == "power_drift")
            return SpeedMeasure::power_drift(d.at("c").get<double>(),
                                             d.at("nu").get<double>());
        if (name == "bessel") return SpeedMeasure::bessel(d.at("alpha").get<double>());
        if (name == "tabulated") {
            std::vector<double> ks, vs;
            for (const auto& kv : d.at("knots")) {
                ks.push_back(kv.at(0).get<double>());
                vs.push_back(kv.at(1).get<double>());
            }
            const double lp = ell_from_json(j.value("ell_prime", json()), ks.back());
            const double l = ell_from_json(j.value("ell", json()), kInf);
            return SpeedMeasure::tabulated(std::move(ks), std::move(vs), lp, l);
        }
        if (name == "blowup")
            return SpeedMeasure::edge_blowup(d.at("coef").get<double>(),
                                             d.at("power").get<double>(),
                                             d.at("pole").get<double>());
        throw ConfigError("unknown density name '" + name +
                          "' (reflected_bm | exp_decay | power_drift | bessel | tabulated | "
                          "blowup)");
    }();

    if (name != "tabulated" && name != "blowup") {
        const double lp = ell_from_json(j.value("ell_prime", json()), m.ell_prime());
        const double l = ell_from_json(j.value("ell", json()), m.ell());
        if (lp != m.ell_prime() || l != m.ell()) m = m.with_ells(lp, l);
    }
    if (j.contains("atoms")) {
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        if (!atoms.empty()) m = m.with_atoms(std::move(atoms));
    }
    return m;
}

json measure_to_json(const SpeedMeasure& m) {
    json d;
    switch (m.kind()) {
        case SpeedMeasure::Kind::ReflectedBm: d = {{"name", "reflected_bm"}}; break;
        case SpeedMeasure::Kind::ExpDecay: d = {{"name", "exp_decay"}}; break;
        case SpeedMeasure::Kind::PowerDrift:
            d = {{"name", "power_drift"}, {"c", m.param_c()}, {"nu", m.param_nu()}};
            break;
        case SpeedMeasure::Kind::Bessel:
            d = {{"name", "bessel"}, {"alpha", m.param_alpha()}};
            break;
        case SpeedMeasure::Kind::Tabulated: {
            json knots = json::array();
            for (std::size_t i = 0; i < m.knots().size(); ++i)
                knots.push_back({m.knots()[i], m.values()[i]});
            d = {{"name", "tabulated"}, {"knots", knots}};
            break;
        }
        case SpeedMeasure::Kind::EdgeBlowup:
            d = {{"name", "blowup"},
                 {"coef", m.param_coef()},
                 {"power", m.param_power()},
                 {"pole", m.param_pole()}};
            break;
    }
    json j;
    j["density"] = d;
    j["ell_prime"] = ell_to_json(m.ell_prime());
    j["ell"] = ell_to_json(m.ell());
    json atoms = json::array();
    for (const Atom& a : m.atoms()) atoms.push_back({a.position, a.mass});
    j["atoms"] = atoms;
    return j;
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON");
    return j;
}

} // namespace

SpeedMeasure measure_from_json_text(const std::string& text) {
    return measure_from_json(parse_text(text));
}

std::string measure_to_json_text(const SpeedMeasure& measure) {
    return measure_to_json(measure).dump(2);
}

DiffusionSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j = parse_text(ss.str());
    if (j.contains("registry")) return registry_lookup(j.at("registry").get<std::string>()).spec;
    return build_spec(measure_from_json(j));
}

DiffusionSpec resolve_spec_ref(const std::string& ref) {
    constexpr const char* kPrefix = "registry:";
    if (ref.rfind(kPrefix, 0) == 0) return registry_lookup(ref.substr(9)).spec;
    return load_spec_file(ref);
}

ClockSpec parse_clock(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("clock format: exp:Q | hit:A | ilt:A,U");
    const std::string kind = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);
    try {
        if (kind == "exp") return ClockSpec::exponential(std::stod(args));
        if (kind == "hit") return ClockSpec::hitting(std::stod(args));
        if (kind == "ilt") {
            const auto comma = args.find(',');
            if (comma == std::string::npos) throw ConfigError("ilt clock needs ilt:A,U");
            return ClockSpec::inverse_local_time(std::stod(args.substr(0, comma)),
                                                 std::stod(args.substr(comma + 1)));
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("cannot parse clock parameters in '" + text + "'");
    }
    throw ConfigError("unknown clock kind '" + kind + "' (exp | hit | ilt)");
}

std::string clock_to_string(const ClockSpec& clock) {
    std::ostringstream os;
    os.precision(17);
    switch (clock.kind) {
        case ClockSpec::Kind::Exponential: os << "exp:" << clock.q; break;
        case ClockSpec::Kind::Hitting: os << "hit:" << clock.a; break;
        case ClockSpec::Kind::InverseLocalTime:
            os << "ilt:" << clock.a << ',' << clock.u;
            break;
    }
    return os.str();
}

Weight parse_weight(const std::string& text) {
    if (text == "ind0") return Weight::indicator_at_zero();
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("weight format: exp:C | ind0 | tab:FILE");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "exp") {
        try {
            return Weight::exponential(std::stod(arg));
        } catch (const std::invalid_argument&) {
            throw ConfigError("cannot parse weight rate in '" + text + "'");
        }
    }
    if (kind == "tab") {
        std::ifstream in(arg);
        if (!in) throw ConfigError("cannot open weight table: " + arg);
        std::stringstream ss;
        ss << in.rdbuf();
        json j = parse_text(ss.str());
        std::vector<double> ks, vs;
        for (const auto& kv : j.at("knots")) {
            ks.push_back(kv.at(0).get<double>());
            vs.push_back(kv.at(1).get<double>());
        }
        return Weight::tabulated(std::move(ks), std::move(vs));
    }
    throw ConfigError("unknown weight kind '" + kind + "' (exp | ind0 | tab)");
}

std::string weight_to_string(const Weight& w) {
    std::ostringstream os;
    os.precision(17);
    switch (w.kind()) {
        case Weight::Kind::Exponential: os << "exp:" << w.rate(); break;
        case Weight::Kind::IndicatorAtZero: os << "ind0"; break;
        case Weight::Kind::Tabulated: os << "tab:<inline>"; break;
    }
    return os.str();
}

void ExperimentConfig::validate() const {
    if (schedule.empty()) throw ConfigError("experiment: schedule must be nonempty");
    const bool down = theorem == "1.1";
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        const bool ok = down ? schedule[i] < schedule[i - 1] : schedule[i] > schedule[i - 1];
        if (!ok) throw ConfigError("experiment: schedule must be monotone");
    }
    if (n_paths < 100) throw ConfigError("experiment: n_paths must be >= 100");
    if (!(dt <= 1e-2) || !(dt > 0.0)) throw ConfigError("experiment: need 0 < dt <= 1e-2");
    if (theorem != "1.1" && theorem != "1.2" && theorem != "1.3" && theorem != "1.4")
        throw ConfigError("experiment: theorem must be one of 1.1|1.2|1.3|1.4");
}

std::string experiment_to_json_text(const ExperimentConfig& c) {
    json j;
    j["spec"] = c.spec_ref;
    j["theorem"] = c.theorem;
    j["schedule"] = c.schedule;
    j["weight"] = c.weight;
    j["beta"] = c.beta;
    j["a"] = c.a;
    j["u"] = c.u;
    j["x0"] = c.x0;
    j["t"] = c.t;
    j["n_paths"] = c.n_paths;
    j["dt"] = c.dt;
    j["seed"] = c.seed;
    return j.dump(2);
}

ExperimentConfig experiment_from_json_text(const std::string& text) {
    json j = parse_text(text);
    ExperimentConfig c;
    c.spec_ref = j.value("spec", c.spec_ref);
    c.theorem = j.value("theorem", c.theorem);
    c.schedule = j.value("schedule", c.schedule);
    c.weight = j.value("weight", c.weight);
    c.beta = j.value("beta", c.beta);
    c.a = j.value("a", c.a);
    c.u = j.value("u", c.u);
    c.x0 = j.value("x0", c.x0);
    c.t = j.value("t", c.t);
    c.n_paths = j.value("n_paths", c.n_paths);
    c.dt = j.value("dt", c.dt);
    c.seed = j.value("seed", c.seed);
    return c;
}

} // namespace gendiff
