#include <doctest.h>

#include <algorithm>

#include "limitfrac/config.hpp"
#include "limitfrac/errors.hpp"
#include "limitfrac/experiments.hpp"
#include "limitfrac/presets.hpp"

using namespace limitfrac;
using constitutive::Model;

TEST_CASE("every preset survives a serialization round trip") {
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    const RunConfig c = preset(name);
    CHECK_NOTHROW(c.validate());
    CHECK(c.name == name);
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);
    CHECK(back.material.beta == c.material.beta);
    CHECK(back.material.alpha == c.material.alpha);
    CHECK(back.load.at(0.37) == c.load.at(0.37));
  }
}

TEST_CASE("overrides and parse errors") {
  RunConfig c = preset("ex3_lefm");
  apply_override(c, "material.gc=2.5");
  CHECK(c.material.gc == 2.5);
  apply_override(c, "material.xi = 3*hmin");
  CHECK(c.xi.per_hmin);
  CHECK(c.xi.resolve(0.5) == 1.5);
  apply_override(c, "mechanics.min_load_fraction=0.125");
  CHECK(c.mechanics.min_load_fraction == 0.125);
  CHECK_THROWS_AS(apply_override(c, "material.nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "material.gc"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "material.gc=abc"), ConfigError);
  CHECK_THROWS_AS(parse_config("model = brittle\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/limitfrac.cfg"), Error);

  const RunConfig parsed = parse_config("# comment\nmaterial.beta = 0.5  # trailing\n");
  CHECK(parsed.material.beta == 0.5);

  const auto keys = config_keys();
  CHECK(std::find(keys.begin(), keys.end(), "material.beta") != keys.end());
  CHECK(std::find(keys.begin(), keys.end(), "mechanics.min_load_fraction") != keys.end());
}

TEST_CASE("lengths") {
  CHECK(Length::parse("0.01").resolve(7.0) == 0.01);
  CHECK(Length::parse("hmin").resolve(0.25) == 0.25);
  CHECK(Length::parse("2*hmin").resolve(0.25) == 0.5);
  CHECK(Length::parse(Length{1e-10, true}.str()).resolve(2.0) == 2e-10);
  CHECK_THROWS_AS(Length::parse("two"), ConfigError);
}

TEST_CASE("unknown preset lists the valid names") {
  CHECK_THROWS_AS(preset("ex9"), ConfigError);
  try {
    preset("ex9");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("ex4_nlsl_reduced") != std::string::npos);
  }
}

TEST_CASE("LEFM counterparts") {
  CHECK(lefm_counterpart("ex1_nonlinear") == "ex1_linear");
  CHECK(lefm_counterpart("ex2_nlsl_case3_iv") == "ex2_lefm_case3");
  CHECK(lefm_counterpart("ex3_nlsl_case2_i") == "ex3_lefm");
  CHECK(lefm_counterpart("ex4_nlsl") == "ex4_lefm");
  CHECK(lefm_counterpart("ex4_nlsl_reduced") == "ex4_lefm_reduced");
  CHECK(lefm_counterpart("ex4_lefm").empty());
  for (const std::string& name : preset_names())
    if (preset(name).model == Model::nlsl) {
      CAPTURE(name);
      const std::string base = lefm_counterpart(name);
      REQUIRE_FALSE(base.empty());
      const RunConfig a = preset(name);
      const RunConfig b = preset(base);
      CHECK(b.model == Model::lefm);
      CHECK(a.mesh.global_levels == b.mesh.global_levels);
      CHECK(a.load.at(1.0) == b.load.at(1.0));
      CHECK(a.n_steps == b.n_steps);
    }
}

TEST_CASE("preset parameter sets") {
  SUBCASE("example 1") {
    const RunConfig c = preset("ex1_nonlinear");
    CHECK(c.material.lambda == 0.01);
    CHECK(c.material.mu == 0.01);
    CHECK(c.material.alpha == 0.1);
    CHECK(c.material.beta == 0.1);
    CHECK(c.mms_cycles == 6);
  }
  SUBCASE("example 2") {
    const double u_top[] = {2.0, 1.0, 0.5, 0.1};
    const double beta[] = {0.04, 0.09, 0.18, 0.92};
    const double alpha[] = {2.0, 1.0, 0.5, 0.25};
    const char* roman[] = {"i", "ii", "iii", "iv"};
    for (int k = 0; k < 4; ++k) {
      CHECK(preset("ex2_lefm_case" + std::to_string(k + 1)).load.value == u_top[k]);
      for (int v = 0; v < 4; ++v) {
        const RunConfig c =
            preset("ex2_nlsl_case" + std::to_string(k + 1) + "_" + roman[v]);
        CHECK(c.load.value == u_top[k]);
        CHECK(c.material.beta == beta[k]);
        CHECK(c.material.alpha == alpha[v]);
        CHECK(c.mesh.slit);
        CHECK(c.material.lambda == 1.0);
        CHECK(c.material.mu == 1.0);
      }
    }
  }
  SUBCASE("example 3") {
    const auto m = build_mesh(preset("ex3_lefm").mesh);
    const double h = m->h_min();
    for (const char* name : {"ex3_lefm", "ex3_nlsl_case1_i", "ex3_nlsl_case2_iii"}) {
      const RunConfig c = preset(name);
      const auto mat = c.resolved_material(h);
      CHECK(mat.gc == 5.0);
      CHECK(mat.xi == doctest::Approx(2.0 * h));
      CHECK(mat.kappa == doctest::Approx(1e-10 * h));
      CHECK(c.seed.enabled);
    }
    CHECK(preset("ex3_nlsl_case1_i").material.beta == 127.0);
    CHECK(preset("ex3_nlsl_case1_iii").material.alpha == 0.5);
    CHECK(preset("ex3_nlsl_case2_ii").material.alpha == 0.25);
  }
  SUBCASE("example 4") {
    for (const char* name : {"ex4_lefm", "ex4_nlsl", "ex4_lefm_reduced", "ex4_nlsl_reduced"}) {
      const RunConfig c = preset(name);
      CHECK(c.material.lambda == 121.15e3);
      CHECK(c.material.mu == 80.77e3);
      CHECK(c.load.kind == LoadSpec::Kind::ramp);
    }
    CHECK(preset("ex4_nlsl").material.alpha == 0.25);
    CHECK(preset("ex4_nlsl").material.beta == 4.8e-4);
    CHECK(preset("ex4_lefm").material.beta == 0.0);
  }
}
