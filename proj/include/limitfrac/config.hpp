#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "limitfrac/constitutive.hpp"
#include "limitfrac/fem.hpp"
#include "limitfrac/mechanics.hpp"
#include "limitfrac/mesh.hpp"
#include "limitfrac/phasefield.hpp"
#include "limitfrac/postprocess.hpp"

namespace limitfrac {

enum class Experiment { ex1, ex2, ex3, ex4, custom };
const char* to_string(Experiment e);

/// A length given either absolutely or as a multiple of the smallest cell size.
struct Length {
  double value = 0.0;
  bool per_hmin = false;

  double resolve(double h_min) const { return per_hmin ? value * h_min : value; }
  static Length parse(const std::string& text);  ///< "0.01", "2*hmin", "hmin"
  std::string str() const;
};

struct RefineBox {
  mesh::Box box;
  int levels = 0;
};

struct MeshSpec {
  int global_levels = 7;
  std::vector<RefineBox> boxes;  ///< applied in order after global refinement
  bool slit = false;             ///< geometric crack (duplicated DOFs)
  fem::Slit slit_geometry;
};

/// Initial phase-field crack: phi = 0 at nodes with x in [x0, x1] and
/// |y - y| <= half_width, 1 elsewhere.
struct SeedSpec {
  bool enabled = false;
  double x0 = 0.5;
  double x1 = 1.0;
  double y = 0.5;
  Length half_width{1.0, true};
};

/// Top displacement: constant `value` (static runs) or `rate * t` (ramps).
struct LoadSpec {
  enum class Kind { constant, ramp };
  Kind kind = Kind::constant;
  double value = 0.0;
  double rate = 1.0;

  double at(double t) const { return kind == Kind::constant ? value : rate * t; }
};

struct OutputSpec {
  std::vector<postprocess::Quantity> samples;
  mesh::Point sample_from{0.0, 0.5};
  mesh::Point sample_to{0.5, 0.5};
  std::vector<int> sample_steps;  ///< empty: final state only
  bool vtk = true;                ///< final-state VTK
  bool iteration_log = true;
};

struct RunConfig {
  std::string name = "custom";
  Experiment experiment = Experiment::custom;
  constitutive::Model model = constitutive::Model::lefm;
  constitutive::MaterialParams material;
  Length xi{2.0, true};
  Length kappa{1e-10, true};

  MeshSpec mesh;
  SeedSpec seed;
  LoadSpec load;

  double dt = 1.0;
  int n_steps = 1;
  double tol = 1e-6;
  int max_stagger = 500;
  double gamma = 1e4;

  mechanics::MechanicsConfig mechanics;
  phasefield::PhaseFieldConfig phasefield;

  int mms_cycles = 6;      ///< convergence study length (ex1)
  int mms_first_level = 1;  ///< global levels of the first cycle
  double mms_fd_step = 1e-6;
  std::uint64_t seed_value = 20240601;  ///< RNG seed for randomized checks

  OutputSpec output;

  /// Material with xi and kappa resolved against the mesh.
  constitutive::MaterialParams resolved_material(double h_min) const;
  void validate() const;
};

/// Line-oriented `section.key = value` text; '#' starts a comment.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Applies one `section.key=value` assignment. Throws ConfigError.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// All recognised keys, in serialization order.
std::vector<std::string> config_keys();

}  // namespace limitfrac
