#include "limitfrac/presets.hpp"

#include <array>

#include "limitfrac/errors.hpp"

namespace limitfrac {

using constitutive::Model;
using postprocess::Quantity;

namespace {

constexpr std::array<const char*, 4> kRoman = {"i", "ii", "iii", "iv"};

RunConfig ex1(Model model) {
  RunConfig c;
  c.name = model == Model::lefm ? "ex1_linear" : "ex1_nonlinear";
  c.experiment = Experiment::ex1;
  c.model = model;
  c.material.lambda = 0.01;
  c.material.mu = 0.01;
  c.material.alpha = 0.1;
  c.material.beta = 0.1;
  c.xi = {1.0, false};
  c.kappa = {0.0, false};
  c.mesh.global_levels = 1;
  c.mms_first_level = 1;
  c.mms_cycles = 6;
  c.mechanics.model = model;
  c.mechanics.l_u = 0.0;
  c.mechanics.newton_tol = 1e-10;
  c.output.vtk = false;
  return c;
}

// Slit geometry shared by Examples 2-4: top (0, u_top), bottom u_y = 0.
RunConfig slit_base(Model model) {
  RunConfig c;
  c.model = model;
  c.material.lambda = 1.0;
  c.material.mu = 1.0;
  c.mesh.global_levels = 7;
  c.mechanics.model = model;
  c.phasefield.model = model;
  c.output.samples = {Quantity::sigma22, Quantity::eps22, Quantity::eps_nl22};
  c.output.sample_from = {0.0, 0.5};
  c.output.sample_to = {0.5, 0.5};
  return c;
}

RunConfig ex2(Model model, int kase, double alpha) {
  static constexpr std::array<double, 4> u_top = {2.0, 1.0, 0.5, 0.1};
  static constexpr std::array<double, 4> beta = {0.04, 0.09, 0.18, 0.92};
  RunConfig c = slit_base(model);
  c.experiment = Experiment::ex2;
  c.mesh.slit = true;
  c.load = {LoadSpec::Kind::constant, u_top[kase - 1], 1.0};
  c.material.beta = model == Model::nlsl ? beta[kase - 1] : 0.0;
  c.material.alpha = alpha;
  c.mechanics.l_u = 0.0;
  return c;
}

RunConfig ex3(Model model, double alpha, double beta) {
  RunConfig c = slit_base(model);
  c.experiment = Experiment::ex3;
  const double h_min = 1.0 / 1024.0;
  c.mesh.boxes = {{{0.5, 0.5 - h_min, 1.0, 0.5 + h_min}, 3}};
  c.seed.enabled = true;
  c.material.gc = 5.0;
  c.material.alpha = alpha;
  c.material.beta = model == Model::nlsl ? beta : 0.0;
  c.load = {LoadSpec::Kind::constant, 1e-4, 1.0};
  c.dt = 1.0;
  c.n_steps = 1;
  c.gamma = 1e4;
  c.output.samples.push_back(Quantity::sigma_phi22);
  c.output.samples.push_back(Quantity::phi);
  return c;
}

RunConfig ex4(Model model, bool reduced) {
  RunConfig c = slit_base(model);
  c.experiment = Experiment::ex4;
  c.name = std::string(model == Model::lefm ? "ex4_lefm" : "ex4_nlsl") +
           (reduced ? "_reduced" : "");
  c.mesh.global_levels = reduced ? 5 : 7;
  c.mesh.boxes = {{{0.0, 0.4, 0.6, 0.6}, 2}};
  c.seed.enabled = true;
  c.material.lambda = 121.15e3;
  c.material.mu = 80.77e3;
  c.material.gc = 1.0;
  c.material.alpha = 0.25;
  c.material.beta = model == Model::nlsl ? 4.8e-4 : 0.0;
  c.load = {LoadSpec::Kind::ramp, 0.0, 1.0};
  c.dt = 1e-4;
  c.n_steps = 50;
  c.gamma = 1e-7;
  c.max_stagger = 2000;
  c.output.samples = {Quantity::sigma22, Quantity::eps22, Quantity::phi};
  c.output.sample_steps = {10, 20, 30};
  return c;
}

std::vector<std::pair<std::string, RunConfig>> all_presets() {
  std::vector<std::pair<std::string, RunConfig>> out;
  out.emplace_back("ex1_linear", ex1(Model::lefm));
  out.emplace_back("ex1_nonlinear", ex1(Model::nlsl));

  static constexpr std::array<double, 4> ex2_alpha = {2.0, 1.0, 0.5, 0.25};
  for (int k = 1; k <= 4; ++k) {
    const std::string base = "ex2_lefm_case" + std::to_string(k);
    out.emplace_back(base, ex2(Model::lefm, k, 1.0));
    for (int v = 0; v < 4; ++v)
      out.emplace_back("ex2_nlsl_case" + std::to_string(k) + "_" + kRoman[v],
                       ex2(Model::nlsl, k, ex2_alpha[v]));
  }

  out.emplace_back("ex3_lefm", ex3(Model::lefm, 1.0, 0.0));
  static constexpr std::array<double, 3> ex3_alpha = {2.0, 1.0, 0.5};
  static constexpr std::array<double, 3> ex3_beta = {1.0, 10.0, 50.0};
  for (int v = 0; v < 3; ++v)
    out.emplace_back(std::string("ex3_nlsl_case1_") + kRoman[v],
                     ex3(Model::nlsl, ex3_alpha[v], 127.0));
  for (int v = 0; v < 3; ++v)
    out.emplace_back(std::string("ex3_nlsl_case2_") + kRoman[v],
                     ex3(Model::nlsl, 0.25, ex3_beta[v]));

  out.emplace_back("ex4_lefm", ex4(Model::lefm, false));
  out.emplace_back("ex4_nlsl", ex4(Model::nlsl, false));
  out.emplace_back("ex4_lefm_reduced", ex4(Model::lefm, true));
  out.emplace_back("ex4_nlsl_reduced", ex4(Model::nlsl, true));

  for (auto& [name, cfg] : out) cfg.name = name;
  return out;
}

}  // namespace

RunConfig preset(const std::string& name) {
  for (auto& [n, cfg] : all_presets())
    if (n == name) return cfg;
  std::string msg = "unknown preset '" + name + "'; available:";
  for (const auto& n : preset_names()) msg += " " + n;
  throw ConfigError(msg);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [n, cfg] : all_presets()) names.push_back(n);
  return names;
}

std::string lefm_counterpart(const std::string& name) {
  if (name == "ex1_nonlinear") return "ex1_linear";
  if (name.rfind("ex2_nlsl_case", 0) == 0 && name.size() > 14)
    return "ex2_lefm_case" + name.substr(13, 1);
  if (name.rfind("ex3_nlsl_", 0) == 0) return "ex3_lefm";
  if (name == "ex4_nlsl") return "ex4_lefm";
  if (name == "ex4_nlsl_reduced") return "ex4_lefm_reduced";
  return {};
}

}  // namespace limitfrac
