#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gendiff/acceptance.hpp"
#include "gendiff/config.hpp"
#include "gendiff/errors.hpp"
#include "gendiff/penalized.hpp"
#include "gendiff/registry.hpp"
#include "gendiff/version.hpp"

using namespace gendiff;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir;
    std::string format = "csv";
};

std::ostream& open_sink(std::ofstream& file, const GlobalOpts& g, const std::string& name) {
    if (g.out_dir.empty()) return std::cout;
    std::filesystem::create_directories(g.out_dir);
    file.open(g.out_dir + "/" + name);
    if (!file) throw ConfigError("cannot write to " + g.out_dir + "/" + name);
    return file;
}

int cmd_classify(const GlobalOpts& g, const std::string& spec_ref) {
    DiffusionSpec spec = resolve_spec_ref(spec_ref);
    std::ofstream file;
    auto& os = open_sink(file, g, std::string("classify.") + g.format);
    if (g.format == "json") {
        nlohmann::json j;
        j["boundary_class"] = to_string(spec.boundary_class);
        j["pi0"] = spec.pi0;
        j["m_infty"] = std::isfinite(spec.m_infty) ? nlohmann::json(spec.m_infty)
                                                   : nlohmann::json("inf");
        j["recurrent"] = spec.recurrent();
        j["measure"] = nlohmann::json::parse(measure_to_json_text(spec.measure));
        os << j.dump(2) << '\n';
    } else {
        os << "boundary_class,pi0,m_infty,recurrent\n";
        os << to_string(spec.boundary_class) << ',' << spec.pi0 << ',';
        if (std::isfinite(spec.m_infty))
            os << spec.m_infty;
        else
            os << "inf";
        os << ',' << (spec.recurrent() ? 1 : 0) << '\n';
    }
    return kExitPass;
}

int cmd_eigen(const GlobalOpts& g, const std::string& spec_ref, double q, int grid_n) {
    DiffusionSpec spec = resolve_spec_ref(spec_ref);
    GridPolicy pol;
    if (grid_n > 0) pol.n = grid_n;
    EigenSolution sol = solve_eigen(spec, q, pol);
    std::ofstream file;
    auto& os = open_sink(file, g, std::string("eigen.") + g.format);
    if (g.format == "json") {
        nlohmann::json j;
        j["q"] = q;
        j["H"] = sol.H;
        j["grid"] = sol.grid;
        j["phi"] = sol.phi;
        j["psi"] = sol.psi;
        j["rho"] = sol.rho;
        os << j.dump() << '\n';
    } else {
        os << "# q=" << q << " H=" << std::setprecision(15) << sol.H << '\n';
        os << "x,phi,psi,rho\n";
        os << std::setprecision(12);
        for (std::size_t i = 0; i < sol.grid.size(); ++i)
            os << sol.grid[i] << ',' << sol.phi[i] << ',' << sol.psi[i] << ',' << sol.rho[i]
               << '\n';
    }
    return kExitPass;
}

int cmd_law(const GlobalOpts& g, const std::string& spec_ref, const std::string& clock_str,
            const std::string& weight_str, double x) {
    DiffusionSpec spec = resolve_spec_ref(spec_ref);
    ClockSpec clock = parse_clock(clock_str);
    Weight f = parse_weight(weight_str);
    std::ofstream file;
    auto& os = open_sink(file, g, std::string("law.") + g.format);

    switch (clock.kind) {
        case ClockSpec::Kind::Exponential: {
            auto sol = solve_eigen(spec, clock.q);
            const double v = law_exp_clock(spec, sol, f, x);
            if (g.format == "json")
                os << nlohmann::json{{"clock", clock_to_string(clock)}, {"value", v}}.dump()
                   << '\n';
            else
                os << "clock,x,value\n" << clock_to_string(clock) << ',' << x << ',' << v
                   << '\n';
            return kExitPass;
        }
        case ClockSpec::Kind::Hitting: {
            auto v = law_hitting_clock(spec, f, x, clock.a);
            if (g.format == "json")
                os << nlohmann::json{{"clock", clock_to_string(clock)},
                                     {"value", v.value},
                                     {"degenerate", v.degenerate}}
                          .dump()
                   << '\n';
            else
                os << "clock,x,value,degenerate\n"
                   << clock_to_string(clock) << ',' << x << ',' << v.value << ','
                   << (v.degenerate ? 1 : 0) << '\n';
            return kExitPass;
        }
        case ClockSpec::Kind::InverseLocalTime: {
            const double v = law_inverse_lt_clock_from_x(spec, x, clock.a, clock.u, f);
            LocalTimeLaw law = law_inverse_lt_clock(clock.a, clock.u);
            if (g.format == "json") {
                nlohmann::json j{{"clock", clock_to_string(clock)},
                                 {"value", v},
                                 {"atom_at_zero", law.atom_at_zero()}};
                j["density"] = nlohmann::json::array();
                for (double y = 0.05; y <= 8.0; y += 0.05)
                    j["density"].push_back({y, law.density(y)});
                os << j.dump() << '\n';
            } else {
                os << "# value=" << v << " atom_at_zero=" << law.atom_at_zero() << '\n';
                os << "y,density\n";
                for (double y = 0.05; y <= 8.0; y += 0.05)
                    os << y << ',' << law.density(y) << '\n';
            }
            return kExitPass;
        }
    }
    return kExitConfig;
}

int cmd_simulate(const GlobalOpts& g, const std::string& spec_ref, double x0, double horizon,
                 double dt, std::uint64_t n, const std::vector<double>& track, int stride) {
    DiffusionSpec spec = resolve_spec_ref(spec_ref);
    std::ofstream file;
    auto& os = open_sink(file, g, std::string("simulate.") + g.format);
    os << "path,t,x,L0";
    for (double lvl : track) os << ",L_" << lvl;
    os << '\n';
    for (std::uint64_t p = 0; p < n; ++p) {
        SimConfig cfg;
        cfg.x0 = x0;
        cfg.horizon = horizon;
        cfg.dt = dt;
        cfg.tracked_levels = track;
        cfg.seed = g.seed + p;
        cfg.record_stride = stride;
        Path path = simulate(spec, cfg);
        for (std::size_t k = 0; k < path.times.size(); ++k) {
            os << p << ',' << path.times[k] << ',' << path.positions[k] << ','
               << path.lt_zero[k];
            for (std::size_t lv = 0; lv < path.levels.size(); ++lv)
                os << ',' << path.lt_levels[lv][k];
            os << '\n';
        }
    }
    return kExitPass;
}

int cmd_verify(const GlobalOpts& g, ExperimentConfig cfg, const std::string& config_file) {
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw ConfigError("cannot open config: " + config_file);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = experiment_from_json_text(ss.str());
    }
    cfg.validate();
    DiffusionSpec spec = resolve_spec_ref(cfg.spec_ref);

    VerifyConfig v;
    v.f = parse_weight(cfg.weight);
    v.beta = cfg.beta;
    v.a = cfg.a;
    v.u = cfg.u;
    v.x0 = cfg.x0;
    v.t = cfg.t;
    v.schedule = cfg.schedule;
    v.n_paths = cfg.n_paths;
    v.dt = cfg.dt;
    v.seed = cfg.seed;
    v.threads = g.threads;
    if (cfg.theorem == "1.1")
        v.family = ClockFamily::ExponentialQDown;
    else if (cfg.theorem == "1.2")
        v.family = ClockFamily::HittingAUp;
    else if (cfg.theorem == "1.3")
        v.family = ClockFamily::IltAUp;
    else
        v.family = ClockFamily::IltUUp;

    auto conv = verify_penalization_limit(spec, v);

    std::ofstream file;
    auto& os = open_sink(file, g, std::string("verify.") + g.format);
    if (g.format == "json") {
        nlohmann::json j;
        j["target"] = conv.target;
        j["target_std_error"] = conv.target_std_error;
        j["pass"] = conv.pass;
        j["rows"] = nlohmann::json::array();
        for (const auto& r : conv.rows)
            j["rows"].push_back({{"lambda", r.lambda},
                                 {"estimate", r.estimate},
                                 {"std_error", r.std_error},
                                 {"gap", r.gap},
                                 {"within", r.within}});
        os << j.dump(2) << '\n';
    } else {
        os << "lambda,estimate,std_error,target,gap,within\n";
        for (const auto& r : conv.rows)
            os << r.lambda << ',' << r.estimate << ',' << r.std_error << ',' << conv.target
               << ',' << r.gap << ',' << (r.within ? 1 : 0) << '\n';
    }
    std::cerr << (conv.pass ? "PASS" : "FAIL") << ": " << conv.detail << '\n';
    return conv.pass ? kExitPass : kExitFail;
}

int cmd_penalize(const GlobalOpts& g, const std::string& spec_ref, const std::string& h,
                 double c, double q) {
    DiffusionSpec spec = resolve_spec_ref(spec_ref);
    auto sol = solve_eigen(spec, q);
    HTransform kind{h == "h0" ? HKind::H0 : HKind::Scale, c};
    TransformedSpec tr = transform_spec(spec, sol, kind);
    std::ofstream file;
    auto& os = open_sink(file, g, std::string("penalize.") + g.format);
    const double xmax = std::min(8.0, tr.grid_max());
    if (g.format == "json") {
        nlohmann::json j;
        j["q"] = q;
        j["c"] = c;
        j["h"] = h;
        j["r_hc_00"] = tr.resolvent_hc(0.0, 0.0);
        j["rows"] = nlohmann::json::array();
        for (double x = 0.0; x <= xmax; x += xmax / 128.0)
            j["rows"].push_back({{"x", x},
                                 {"phi_hc", tr.phi_hc(x)},
                                 {"rho_hc", tr.rho_hc(x)},
                                 {"r_hc_0x", tr.resolvent_hc(0.0, x)},
                                 {"m_hc_density", tr.m_hc_density(x)},
                                 {"s_hc", tr.s_hc(x)}});
        os << j.dump(2) << '\n';
    } else {
        os << "# q=" << q << " c=" << c << " h=" << h
           << " r_hc(0,0)=" << tr.resolvent_hc(0.0, 0.0) << '\n';
        os << "x,phi_hc,rho_hc,r_hc_0x,m_hc_density,s_hc\n";
        for (double x = 0.0; x <= xmax; x += xmax / 128.0)
            os << x << ',' << tr.phi_hc(x) << ',' << tr.rho_hc(x) << ','
               << tr.resolvent_hc(0.0, x) << ',' << tr.m_hc_density(x) << ',' << tr.s_hc(x)
               << '\n';
    }
    return kExitPass;
}

int cmd_decompose(const GlobalOpts& g, double t, const std::string& weight_str,
                  std::uint64_t n, double x0, double dt) {
    const DiffusionSpec& spec = registry_lookup("reflected_bm").spec;
    Weight f = parse_weight(weight_str);
    DecompositionConfig cfg;
    cfg.x0 = x0;
    cfg.t = t;
    cfg.dt = dt;
    cfg.seed = g.seed;
    cfg.n = n;
    cfg.threads = g.threads;
    std::ofstream file;
    auto& os = open_sink(file, g, std::string("decompose.") + g.format);
    os << "sample,branch,g,x_t,l_t,min_post_g\n";
    for (std::uint64_t i = 0; i < n; ++i) {
        Rng rng(cfg.seed, i);
        auto s = sample_decomposition_state(spec, f, cfg, rng);
        os << i << ',' << (s.bridge_branch ? "bridge" : "direct") << ',';
        if (std::isfinite(s.g))
            os << s.g;
        else
            os << "beyond-t";
        os << ',' << s.x_t << ',' << s.l_t << ',';
        if (std::isfinite(s.min_post_g)) os << s.min_post_g;
        os << '\n';
    }
    return kExitPass;
}

int cmd_accept(const GlobalOpts& g, const std::string& suite) {
    AcceptOptions opts;
    opts.threads = g.threads;
    Report rep = run_acceptance(suite, g.seed, opts);
    for (const auto& r : rep.rows)
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  estimate=" << r.estimate
                  << " target=" << r.target << " gap=" << r.gap << " tol=" << r.tolerance
                  << "  (" << r.note << ")\n";
    std::cout << (rep.pass() ? "ALL PASS" : "SUITE FAILED") << " [" << rep.suite
              << ", seed=" << rep.seed << ", " << rep.wall_seconds << " s]\n";
    if (!g.out_dir.empty()) {
        std::filesystem::create_directories(g.out_dir);
        std::ofstream csv(g.out_dir + "/acceptance.csv");
        rep.write_csv(csv);
        std::ofstream json(g.out_dir + "/acceptance.json");
        rep.write_json(json);
    }
    return rep.pass() ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gendiff: local-time penalization laboratory for generalized 1d diffusions"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0 = GENDIFF_THREADS or 1)")
        ->capture_default_str();
    app.add_option("--out", g.out_dir, "output directory (default: stdout)");
    app.add_option("--format", g.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    std::string spec_ref = "registry:reflected_bm";
    double q = 1.0, x = 0.0, x0 = 0.0, horizon = 1.0, dt = 1e-4, c = 1.0, t = 1.0;
    std::uint64_t n = 1;
    int grid_n = 0, stride = 1;
    std::string clock_str = "exp:1", weight_str = "exp:1", h_str = "s";
    std::vector<double> track;
    std::string suite = "full", config_file;
    ExperimentConfig exp;

    auto* classify = app.add_subcommand("classify", "boundary classification of a spec");
    classify->add_option("--spec", spec_ref, "spec file or registry:NAME")->required();

    auto* eigen = app.add_subcommand("eigen", "eigenfunctions and H(q)");
    eigen->add_option("--spec", spec_ref)->required();
    eigen->add_option("--q", q)->required();
    eigen->add_option("--grid", grid_n, "grid resolution");
    eigen->add_flag("--emit", "emit table (always on; flag kept for symmetry)");

    auto* law = app.add_subcommand("law", "closed-form local-time laws at a clock");
    law->add_option("--spec", spec_ref)->required();
    law->add_option("--clock", clock_str, "exp:Q | hit:A | ilt:A,U")->required();
    law->add_option("--weight", weight_str, "exp:C | ind0 | tab:FILE")->required();
    law->add_option("--x", x)->required();

    auto* sim = app.add_subcommand("simulate", "Euler-Maruyama paths with local time");
    sim->add_option("--spec", spec_ref)->required();
    sim->add_option("--x0", x0)->required();
    sim->add_option("--horizon", horizon)->required();
    sim->add_option("--dt", dt)->required();
    sim->add_option("--n", n)->required();
    sim->add_option("--track", track, "tracked local-time levels")->delimiter(',');
    sim->add_option("--emit-stride", stride, "record every k-th step");

    auto* verify = app.add_subcommand("verify", "penalization limit verification");
    verify->add_option("--spec", exp.spec_ref);
    verify->add_option("--theorem", exp.theorem, "1.1 | 1.2 | 1.3 | 1.4");
    verify->add_option("--weight", exp.weight);
    verify->add_option("--beta", exp.beta);
    verify->add_option("--a", exp.a);
    verify->add_option("--u", exp.u);
    verify->add_option("--x", exp.x0);
    verify->add_option("--t", exp.t);
    verify->add_option("--schedule", exp.schedule, "clock parameter schedule")->delimiter(',');
    verify->add_option("--n", exp.n_paths);
    verify->add_option("--dt", exp.dt);
    verify->add_option("--config", config_file, "JSON experiment config (overrides flags)");

    auto* pen = app.add_subcommand("penalize", "section-6 transformed diffusion tables");
    pen->set_help_flag("--help", "print help"); // frees -h for the transform kind
    pen->add_option("--spec", spec_ref)->required();
    pen->add_option("--h", h_str, "h0 | s")->check(CLI::IsMember({"h0", "s"}));
    pen->add_option("--c", c)->required();
    pen->add_option("--q", q)->required();

    auto* dec = app.add_subcommand("decompose", "bridge * Bessel(3) decomposition samples");
    dec->add_option("--t", t)->required();
    dec->add_option("--weight", weight_str)->required();
    dec->add_option("--n", n)->required();
    dec->add_option("--x0", x0);
    dec->add_option("--dt", dt);

    auto* acc = app.add_subcommand("accept", "acceptance criteria runner");
    acc->add_option("--suite", suite, "full | analytic | mc-small");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough(true);

    try {
        app.parse(argc, argv);
        exp.seed = g.seed;
        if (classify->parsed()) return cmd_classify(g, spec_ref);
        if (eigen->parsed()) return cmd_eigen(g, spec_ref, q, grid_n);
        if (law->parsed()) return cmd_law(g, spec_ref, clock_str, weight_str, x);
        if (sim->parsed())
            return cmd_simulate(g, spec_ref, x0, horizon, dt, n, track, stride);
        if (verify->parsed()) return cmd_verify(g, exp, config_file);
        if (pen->parsed()) return cmd_penalize(g, spec_ref, h_str, c, q);
        if (dec->parsed()) return cmd_decompose(g, t, weight_str, n, x0, dt);
        if (acc->parsed()) return cmd_accept(g, suite);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitConfig;
    } catch (const NonConvergence& e) {
        std::cerr << "numerical non-convergence: " << e.what() << " [bracket " << e.lower
                  << ", " << e.upper << "]\n";
        return kExitNonConvergence;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
