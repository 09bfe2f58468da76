#include <doctest.h>

#include <sstream>

#include "gendiff/acceptance.hpp"
#include "gendiff/config.hpp"
#include "gendiff/errors.hpp"
#include "gendiff/registry.hpp"

using namespace gendiff;

TEST_CASE("registry holds the canonical examples") {
    const auto& specs = registry_specs();
    CHECK(specs.size() >= 8);
    for (const auto& ns : specs) {
        // build_spec already validated at registration; classifications match
        CHECK(ns.spec.boundary_class == ns.expected_class);
    }
    CHECK(registry_lookup("reflected_bm").spec.pi0 == 0.0);
    CHECK_THROWS_AS(registry_lookup("nope"), ConfigError);
}

TEST_CASE("measure config round-trips") {
    for (const auto& ns : registry_specs()) {
        const std::string text = measure_to_json_text(ns.spec.measure);
        SpeedMeasure back = measure_from_json_text(text);
        CHECK(measure_to_json_text(back) == text);
        CHECK(back.describe() == ns.spec.measure.describe());
    }
    // atoms survive the round trip
    auto m = SpeedMeasure::exp_decay().with_atoms({{0.5, 0.25}});
    SpeedMeasure back = measure_from_json_text(measure_to_json_text(m));
    REQUIRE(back.atoms().size() == 1);
    CHECK(back.atoms()[0].position == 0.5);
    CHECK(back.atoms()[0].mass == 0.25);
}

TEST_CASE("experiment config round-trips and validates") {
    ExperimentConfig c;
    c.spec_ref = "registry:exp_decay";
    c.theorem = "1.3";
    c.schedule = {4.0, 8.0, 16.0};
    c.weight = "exp:0.5";
    c.x0 = 1.0;
    c.t = 0.25;
    c.n_paths = 5000;
    c.dt = 5e-4;
    c.seed = 99;
    const std::string text = experiment_to_json_text(c);
    ExperimentConfig back = experiment_from_json_text(text);
    CHECK(experiment_to_json_text(back) == text);
    back.validate();

    back.schedule = {8.0, 4.0};
    CHECK_THROWS_AS(back.validate(), ConfigError);
    back.schedule = {4.0, 8.0};
    back.n_paths = 10;
    CHECK_THROWS_AS(back.validate(), ConfigError);
    back.n_paths = 1000;
    back.dt = 0.5;
    CHECK_THROWS_AS(back.validate(), ConfigError);
}

TEST_CASE("clock and weight strings parse and print") {
    for (const std::string s : {"exp:0.5", "hit:2", "ilt:1,0.25"}) {
        ClockSpec c = parse_clock(s);
        CHECK(parse_clock(clock_to_string(c)).kind == c.kind);
    }
    CHECK(parse_clock("ilt:1,0.25").u == 0.25);
    CHECK_THROWS_AS(parse_clock("bogus:1"), ConfigError);
    CHECK_THROWS_AS(parse_clock("exp"), ConfigError);
    CHECK(parse_weight("ind0").is_indicator());
    CHECK(parse_weight("exp:2").rate() == 2.0);
    CHECK_THROWS_AS(parse_weight("tab:/no/such/file"), ConfigError);
    CHECK_THROWS_AS(parse_weight("what:1"), ConfigError);
}

TEST_CASE("unknown acceptance suite lists the registry") {
    try {
        run_acceptance("bogus", 1);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("full") != std::string::npos);
        CHECK(msg.find("analytic") != std::string::npos);
        CHECK(msg.find("mc-small") != std::string::npos);
    }
}

TEST_CASE("analytic suite reports are deterministic modulo metadata") {
    Report a = run_acceptance("analytic", 321);
    Report b = run_acceptance("analytic", 321);
    CHECK(a.canonical_body() == b.canonical_body());
    CHECK(a.rows.size() >= 6);

    std::ostringstream csv, json;
    a.write_csv(csv);
    a.write_json(json);
    CHECK(csv.str().find("C03.H-closed-form") != std::string::npos);
    CHECK(json.str().find("\"suite\"") != std::string::npos);
}
