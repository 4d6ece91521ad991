#include "limitfrac/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "limitfrac/errors.hpp"

namespace limitfrac {

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::ex1:
      return "ex1";
    case Experiment::ex2:
      return "ex2";
    case Experiment::ex3:
      return "ex3";
    case Experiment::ex4:
      return "ex4";
    case Experiment::custom:
      return "custom";
  }
  return "custom";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::vector<double> out;
  for (const auto& w : split(t, ' ')) out.push_back(parse_double(key, w));
  return out;
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

using Table = std::vector<std::pair<std::string, Field>>;

template <class Get, class Set>
Field field(Get get, Set set) {
  return {get, set};
}

#define LF_DOUBLE(key, expr)                                                              \
  {                                                                                       \
    key, field([](const RunConfig& c) { return fmt_double(c.expr); },                     \
               [](RunConfig& c, const std::string& v) { c.expr = parse_double(key, v); }) \
  }
#define LF_INT(key, expr)                                                                 \
  {                                                                                       \
    key, field([](const RunConfig& c) { return std::to_string(c.expr); },                 \
               [](RunConfig& c, const std::string& v) { c.expr = parse_int(key, v); })    \
  }
#define LF_BOOL(key, expr)                                                                \
  {                                                                                       \
    key, field([](const RunConfig& c) { return std::string(c.expr ? "true" : "false"); }, \
               [](RunConfig& c, const std::string& v) { c.expr = parse_bool(key, v); })   \
  }

const Table& table() {
  static const Table t = {
      {"run.name", field([](const RunConfig& c) { return c.name; },
                         [](RunConfig& c, const std::string& v) { c.name = trim(v); })},
      {"run.experiment",
       field([](const RunConfig& c) { return std::string(to_string(c.experiment)); },
             [](RunConfig& c, const std::string& v) {
               const std::string s = trim(v);
               for (Experiment e : {Experiment::ex1, Experiment::ex2, Experiment::ex3,
                                    Experiment::ex4, Experiment::custom})
                 if (s == to_string(e)) {
                   c.experiment = e;
                   return;
                 }
               throw ConfigError("run.experiment: unknown experiment '" + s + "'");
             })},
      {"run.model", field([](const RunConfig& c) { return std::string(to_string(c.model)); },
                          [](RunConfig& c, const std::string& v) {
                            const std::string s = trim(v);
                            if (s == "lefm" || s == "LEFM")
                              c.model = constitutive::Model::lefm;
                            else if (s == "nlsl" || s == "NLSL")
                              c.model = constitutive::Model::nlsl;
                            else
                              throw ConfigError("run.model: expected lefm or nlsl, got '" + s +
                                                "'");
                          })},
      {"run.seed", field([](const RunConfig& c) { return std::to_string(c.seed_value); },
                         [](RunConfig& c, const std::string& v) {
                           c.seed_value = static_cast<std::uint64_t>(
                               std::stoull(trim(v)));
                         })},
      LF_DOUBLE("material.lambda", material.lambda),
      LF_DOUBLE("material.mu", material.mu),
      LF_DOUBLE("material.alpha", material.alpha),
      LF_DOUBLE("material.beta", material.beta),
      LF_DOUBLE("material.gc", material.gc),
      {"material.xi", field([](const RunConfig& c) { return c.xi.str(); },
                            [](RunConfig& c, const std::string& v) { c.xi = Length::parse(v); })},
      {"material.kappa",
       field([](const RunConfig& c) { return c.kappa.str(); },
             [](RunConfig& c, const std::string& v) { c.kappa = Length::parse(v); })},
      LF_INT("mesh.global_levels", mesh.global_levels),
      {"mesh.refine_boxes",
       field(
           [](const RunConfig& c) {
             std::string s;
             for (const auto& b : c.mesh.boxes) {
               if (!s.empty()) s += "; ";
               s += fmt_double(b.box.x0) + " " + fmt_double(b.box.y0) + " " +
                    fmt_double(b.box.x1) + " " + fmt_double(b.box.y1) + " " +
                    std::to_string(b.levels);
             }
             return s;
           },
           [](RunConfig& c, const std::string& v) {
             c.mesh.boxes.clear();
             for (const auto& item : split(v, ';')) {
               const auto n = parse_numbers("mesh.refine_boxes", item);
               if (n.size() != 5)
                 throw ConfigError("mesh.refine_boxes: expected 'x0 y0 x1 y1 levels' entries");
               c.mesh.boxes.push_back({{n[0], n[1], n[2], n[3]}, static_cast<int>(n[4])});
             }
           })},
      LF_BOOL("mesh.slit", mesh.slit),
      LF_DOUBLE("mesh.slit_x_tip", mesh.slit_geometry.x_tip),
      LF_DOUBLE("mesh.slit_x_end", mesh.slit_geometry.x_end),
      LF_DOUBLE("mesh.slit_y", mesh.slit_geometry.y),
      LF_BOOL("seed.enabled", seed.enabled),
      LF_DOUBLE("seed.x0", seed.x0),
      LF_DOUBLE("seed.x1", seed.x1),
      LF_DOUBLE("seed.y", seed.y),
      {"seed.half_width",
       field([](const RunConfig& c) { return c.seed.half_width.str(); },
             [](RunConfig& c, const std::string& v) { c.seed.half_width = Length::parse(v); })},
      {"load.kind",
       field(
           [](const RunConfig& c) {
             return std::string(c.load.kind == LoadSpec::Kind::ramp ? "ramp" : "constant");
           },
           [](RunConfig& c, const std::string& v) {
             const std::string s = trim(v);
             if (s == "ramp")
               c.load.kind = LoadSpec::Kind::ramp;
             else if (s == "constant")
               c.load.kind = LoadSpec::Kind::constant;
             else
               throw ConfigError("load.kind: expected constant or ramp, got '" + s + "'");
           })},
      LF_DOUBLE("load.value", load.value),
      LF_DOUBLE("load.rate", load.rate),
      LF_DOUBLE("time.dt", dt),
      LF_INT("time.steps", n_steps),
      LF_DOUBLE("coupling.tol", tol),
      LF_INT("coupling.max_stagger", max_stagger),
      LF_DOUBLE("coupling.gamma", gamma),
      LF_DOUBLE("mechanics.l_u", mechanics.l_u),
      LF_DOUBLE("mechanics.newton_tol", mechanics.newton_tol),
      LF_INT("mechanics.max_newton", mechanics.max_newton),
      LF_DOUBLE("mechanics.ls_factor", mechanics.line_search.factor),
      LF_INT("mechanics.ls_max_backtracks", mechanics.line_search.max_backtracks),
      LF_BOOL("mechanics.warm_start", mechanics.warm_start_linear),
      LF_DOUBLE("mechanics.min_load_fraction", mechanics.min_load_fraction),
      LF_DOUBLE("phasefield.l_phi", phasefield.l_phi),
      LF_DOUBLE("phasefield.newton_tol", phasefield.newton_tol),
      LF_INT("phasefield.max_newton", phasefield.max_newton),
      LF_DOUBLE("phasefield.ls_factor", phasefield.line_search.factor),
      LF_INT("phasefield.ls_max_backtracks", phasefield.line_search.max_backtracks),
      LF_DOUBLE("phasefield.box_tolerance", phasefield.box_tolerance),
      LF_INT("mms.cycles", mms_cycles),
      LF_INT("mms.first_level", mms_first_level),
      LF_DOUBLE("mms.fd_step", mms_fd_step),
      {"output.samples",
       field(
           [](const RunConfig& c) {
             std::string s;
             for (auto q : c.output.samples) {
               if (!s.empty()) s += ",";
               s += postprocess::to_string(q);
             }
             return s;
           },
           [](RunConfig& c, const std::string& v) {
             c.output.samples.clear();
             for (const auto& w : split(v, ','))
               c.output.samples.push_back(postprocess::quantity_from_string(w));
           })},
      {"output.sample_line",
       field(
           [](const RunConfig& c) {
             const auto& o = c.output;
             return fmt_double(o.sample_from.x) + " " + fmt_double(o.sample_from.y) + " " +
                    fmt_double(o.sample_to.x) + " " + fmt_double(o.sample_to.y);
           },
           [](RunConfig& c, const std::string& v) {
             const auto n = parse_numbers("output.sample_line", v);
             if (n.size() != 4) throw ConfigError("output.sample_line: expected 'x0 y0 x1 y1'");
             c.output.sample_from = {n[0], n[1]};
             c.output.sample_to = {n[2], n[3]};
           })},
      {"output.sample_steps",
       field(
           [](const RunConfig& c) {
             std::string s;
             for (int k : c.output.sample_steps) {
               if (!s.empty()) s += ",";
               s += std::to_string(k);
             }
             return s;
           },
           [](RunConfig& c, const std::string& v) {
             c.output.sample_steps.clear();
             for (const auto& w : split(v, ','))
               c.output.sample_steps.push_back(parse_int("output.sample_steps", w));
           })},
      LF_BOOL("output.vtk", output.vtk),
      LF_BOOL("output.iteration_log", output.iteration_log),
  };
  return t;
}

#undef LF_DOUBLE
#undef LF_INT
#undef LF_BOOL

const Field& lookup(const std::string& key) {
  for (const auto& [k, f] : table())
    if (k == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

Length Length::parse(const std::string& text) {
  std::string t = trim(text);
  const std::string suffix = "hmin";
  if (t.size() >= suffix.size() && t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0) {
    t = trim(t.substr(0, t.size() - suffix.size()));
    if (t.empty()) return {1.0, true};
    if (t.back() != '*') throw ConfigError("length: expected '<number>*hmin', got '" + text + "'");
    t.pop_back();
    return {parse_double("length", t), true};
  }
  return {parse_double("length", t), false};
}

std::string Length::str() const { return per_hmin ? fmt_double(value) + "*hmin" : fmt_double(value); }

constitutive::MaterialParams RunConfig::resolved_material(double h_min) const {
  constitutive::MaterialParams m = material;
  m.xi = xi.resolve(h_min);
  m.kappa = kappa.resolve(h_min);
  return m;
}

void RunConfig::validate() const {
  if (mesh.global_levels < 0 || mesh.global_levels > 14)
    throw ConfigError("mesh.global_levels must lie in [0, 14]");
  for (const auto& b : mesh.boxes)
    if (b.levels < 0 || !(b.box.x1 > b.box.x0) || !(b.box.y1 > b.box.y0))
      throw ConfigError("mesh.refine_boxes: empty box or negative level count");
  if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (n_steps < 0) throw ConfigError("time.steps must be non-negative");
  if (!(tol > 0.0)) throw ConfigError("coupling.tol must be positive");
  if (max_stagger < 1) throw ConfigError("coupling.max_stagger must be at least 1");
  if (!(gamma >= 0.0)) throw ConfigError("coupling.gamma must be non-negative");
  if (mms_cycles < 1) throw ConfigError("mms.cycles must be at least 1");
  if (!(mms_fd_step > 0.0)) throw ConfigError("mms.fd_step must be positive");
  mechanics.validate();
  phasefield.validate();
  resolved_material(1.0).validate();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_override(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, f] : table()) out += key + " = " + f.get(cfg) + "\n";
  return out;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': missing '='");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const Field& f = lookup(key);
  try {
    f.set(cfg, value);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.rfind(key, 0) == 0 ? msg : key + ": " + msg);
  } catch (const std::exception&) {
    throw ConfigError(key + ": invalid value '" + value + "'");
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : table()) keys.push_back(k);
  return keys;
}

}  // namespace limitfrac
