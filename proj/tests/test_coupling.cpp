#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "limitfrac/errors.hpp"
#include "limitfrac/experiments.hpp"
#include "limitfrac/presets.hpp"

using namespace limitfrac;
using namespace limitfrac::coupling;

namespace {

RunConfig small_run(const std::string& base, int steps) {
  RunConfig c = preset(base);
  c.mesh.global_levels = 3;
  c.mesh.boxes = {{{0.0, 0.4, 0.6, 0.6}, 1}};
  c.n_steps = steps;
  return c;
}

}  // namespace

TEST_CASE("zero load needs a single staggered iteration") {
  RunConfig c = small_run("ex4_lefm_reduced", 1);
  c.load = {LoadSpec::Kind::constant, 0.0, 1.0};
  c.seed.enabled = false;
  const Setup s = make_setup(c);
  const SolveState init = initial_state(s.problem, s.phi0);
  const SolveState next = staggered_step(init, s.problem);
  CHECK(next.n == 1);
  CHECK(next.stagger_iters == 1);
  CHECK(next.u_n.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK((next.phi_n.values.array() - 1.0).abs().maxCoeff() == 0.0);
  CHECK(next.residuals.size() == 1);
}

TEST_CASE("converged steps satisfy both residual bounds") {
  for (const char* base : {"ex4_lefm_reduced", "ex4_nlsl_reduced"}) {
    const RunConfig c = small_run(base, 3);
    const Setup s = make_setup(c);
    SolveState state = initial_state(s.problem, s.phi0);
    Workspace ws;
    for (int k = 0; k < 3; ++k) {
      const SolveState prev = state;
      state = staggered_step(prev, s.problem, &ws);
      const auto [a1, a2] = stagger_residuals(s.problem, prev, state.u_n, state.phi_n, state.pen,
                                              s.problem.dirichlet(c.load.at(state.t)));
      CHECK(a1 <= c.tol);
      CHECK(a2 <= c.tol);
      CHECK(state.residuals.back().first <= c.tol);
      CHECK(state.residuals.back().second <= c.tol);
      CHECK(state.t == doctest::Approx((k + 1) * c.dt));
      // Top boundary carries the prescribed load.
      for (const auto& [dof, value] : s.problem.dirichlet(c.load.at(state.t)))
        CHECK(state.u_n.values(dof) == value);
    }
  }
}

TEST_CASE("phase field does not heal beyond the penalty tolerance") {
  RunConfig c = small_run("ex4_lefm_reduced", 4);
  c.gamma = 1e4;
  c.load.rate = 20.0;  // drives visible damage on a coarse mesh
  const Setup s = make_setup(c);
  const Trajectory t = run_quasi_static(s.problem, s.phi0);
  REQUIRE(t.records.size() == 5);
  for (std::size_t k = 1; k < t.records.size(); ++k)
    CHECK(t.records[k].max_phi_increase <= 1e-3);
  CHECK(t.final_state.phi_n.values.minCoeff() < 1.0);
}

TEST_CASE("runs are deterministic") {
  const RunConfig c = small_run("ex4_nlsl_reduced", 2);
  const Setup s1 = make_setup(c);
  const Setup s2 = make_setup(c);
  const Trajectory a = run_quasi_static(s1.problem, s1.phi0);
  const Trajectory b = run_quasi_static(s2.problem, s2.phi0);
  CHECK((a.final_state.u_n.values - b.final_state.u_n.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.final_state.phi_n.values - b.final_state.phi_n.values).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].crack_energy == b.records[k].crack_energy);
    CHECK(a.records[k].stagger_iters == b.records[k].stagger_iters);
  }
}

TEST_CASE("stagger cap raises with the residual history") {
  RunConfig c = small_run("ex4_lefm_reduced", 1);
  c.max_stagger = 1;
  c.load.rate = 20.0;
  const Setup s = make_setup(c);
  const SolveState init = initial_state(s.problem, s.phi0);
  CHECK_THROWS_AS(staggered_step(init, s.problem), StaggerNonConvergence);
  try {
    staggered_step(init, s.problem);
  } catch (const StaggerNonConvergence& e) {
    CHECK(e.residuals().size() == 1);
  }
}

TEST_CASE("run log") {
  const RunConfig c = small_run("ex4_lefm_reduced", 2);
  const Setup s = make_setup(c);
  std::ostringstream progress;
  int calls = 0;
  RunHooks hooks;
  hooks.progress = &progress;
  hooks.on_step = [&](const SolveState&, const StepRecord&) { ++calls; };
  const Trajectory t = run_quasi_static(s.problem, s.phi0, hooks);
  CHECK(calls == 3);
  for (const StepRecord& r : t.records)
    CHECK(r.total_energy == doctest::Approx(r.bulk_energy + r.crack_energy));
  std::ostringstream csv;
  write_run_log(csv, t.records);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "step,time,stagger_iters,mech_newton_total,pf_newton_total,bulk_energy,crack_energy,"
        "total_energy");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) rows += !l.empty();
  CHECK(rows == 3);
}

TEST_CASE("config validation") {
  CouplingConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = CouplingConfig{};
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
