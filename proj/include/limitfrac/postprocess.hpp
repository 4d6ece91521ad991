#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "limitfrac/constitutive.hpp"
#include "limitfrac/fem.hpp"

namespace limitfrac::postprocess {

using constitutive::MaterialParams;
using constitutive::Model;
using fem::NodalField;

/// Integral of g(phi)/2 (2 mu eps:eps + lambda tr(eps)^2), divided by
/// (1 - (beta s)^alpha)^(1/alpha) for the strain-limiting model. 2x2 Gauss.
/// Throws LimitExceeded outside the admissible set.
double bulk_energy(const fem::DofMap& dofs, const NodalField& u, const NodalField& phi,
                   Model model, const MaterialParams& m);

/// Gc/2 integral of (1-phi)^2/xi + xi |grad phi|^2.
double crack_energy(const fem::DofMap& dofs, const NodalField& phi, const MaterialParams& m);

struct EnergyRecord {
  int step = 0;
  double time = 0.0;
  double bulk = 0.0;
  double crack = 0.0;
  double total = 0.0;
};

/// Forward differences (crack[k+1] - crack[k]) / (t[k+1] - t[k]), one entry
/// per record except the last, reported at t[k].
std::vector<double> crack_speed(const std::vector<EnergyRecord>& energies);

/// First index k > baseline where speed[k] > factor * max(speed[baseline], floor).
/// floor is noise / dt, i.e. the speed of a per-step energy change at noise level.
std::optional<int> take_off_step(const std::vector<EnergyRecord>& energies, int baseline = 10,
                                 double factor = 5.0, double noise = 1e-8);

enum class Quantity { sigma22, eps22, eps_nl22, phi, sigma_phi22 };
const char* to_string(Quantity q);
Quantity quantity_from_string(const std::string& s);

struct SampleRow {
  double x = 0.0;  ///< cell centroid
  double y = 0.0;
  Quantity quantity = Quantity::sigma22;
  double value = 0.0;
  int cell = -1;
};

/// Cell averages over the 2x2 Gauss points of the cells the segment crosses,
/// ordered along the segment. A segment lying on cell edges is nudged to the
/// left of its direction (e.g. +y for a segment pointing in +x).
/// sigma22 uses Hooke's law for both models; eps22 is the model's strain
/// (the symmetric gradient for LEFM, the strain-limiting relation applied to
/// the Hooke stress for NLSL); eps_nl22 always uses the strain-limiting relation.
std::vector<SampleRow> line_sample(const fem::DofMap& dofs, Quantity q, fem::Point from,
                                   fem::Point to, const NodalField& u, const NodalField& phi,
                                   Model model, const MaterialParams& m);

/// Cell average of a quantity (2x2 Gauss points).
double cell_average(const fem::DofMap& dofs, int cell, Quantity q, const NodalField& u,
                    const NodalField& phi, Model model, const MaterialParams& m);

/// x,y,quantity,value
void write_samples_csv(std::ostream& os, const std::vector<SampleRow>& rows);
void write_samples_csv(const std::filesystem::path& path, const std::vector<SampleRow>& rows);

/// Legacy ASCII VTK (3.0) unstructured grid: point fields u, phi; cell fields
/// sigma22, eps22, sigma_phi22. Throws IoError.
void export_vtk(const std::filesystem::path& path, const fem::DofMap& dofs, const NodalField& u,
                const NodalField& phi, Model model, const MaterialParams& m);

}  // namespace limitfrac::postprocess
