#include "limitfrac/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "limitfrac/errors.hpp"

namespace limitfrac::postprocess {

using constitutive::SymTensor2;

namespace {

struct CellFields {
  fem::LocalVector<2> u;
  fem::LocalVector<1> phi;
  double h;
};

CellFields gather_cell(const fem::DofMap& dofs, int c, const NodalField& u, const NodalField& phi) {
  const auto& nodes = dofs.cell_nodes(c);
  return {fem::gather<2>(u.values, nodes), fem::gather<1>(phi.values, nodes),
          dofs.mesh().cells()[c].size()};
}

SymTensor2 strain_at(const fem::ShapeEval& sh, const CellFields& f) {
  SymTensor2 eps;
  for (int a = 0; a < 4; ++a) {
    const double dx = sh.grads[a][0] / f.h;
    const double dy = sh.grads[a][1] / f.h;
    eps.xx += dx * f.u(2 * a);
    eps.yy += dy * f.u(2 * a + 1);
    eps.xy += 0.5 * (dy * f.u(2 * a) + dx * f.u(2 * a + 1));
  }
  return eps;
}

double phi_at(const fem::ShapeEval& sh, const CellFields& f) {
  double s = 0.0;
  for (int a = 0; a < 4; ++a) s += sh.values[a] * f.phi(a);
  return s;
}

double point_value(Quantity q, const fem::ShapeEval& sh, const CellFields& f, Model model,
                   const MaterialParams& m) {
  const SymTensor2 eps = strain_at(sh, f);
  switch (q) {
    case Quantity::sigma22:
      return constitutive::hooke_stress(eps, m).yy;
    case Quantity::sigma_phi22:
      return constitutive::degradation(phi_at(sh, f), m.kappa) *
             constitutive::hooke_stress(eps, m).yy;
    case Quantity::eps22:
      if (model == Model::lefm) return eps.yy;
      return constitutive::strain_nl(constitutive::hooke_stress(eps, m), m).yy;
    case Quantity::eps_nl22:
      return constitutive::strain_nl(constitutive::hooke_stress(eps, m), m).yy;
    case Quantity::phi:
      return phi_at(sh, f);
  }
  return 0.0;
}

}  // namespace

double bulk_energy(const fem::DofMap& dofs, const NodalField& u, const NodalField& phi,
                   Model model, const MaterialParams& m) {
  // Same points as the mechanics assembly, where admissibility is enforced.
  const auto& rule = fem::gauss(2);
  double total = 0.0;
  for (int c = 0; c < dofs.n_cells(); ++c) {
    const CellFields f = gather_cell(dofs, c, u, phi);
    double cell = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const SymTensor2 eps = strain_at(rule.shapes[q], f);
      const double s = constitutive::half_norm_strain(eps, m);
      double density = 0.5 * constitutive::degradation(phi_at(rule.shapes[q], f), m.kappa) * s * s;
      if (model == Model::nlsl && m.beta > 0.0) {
        const double p = std::pow(m.beta * s, m.alpha);
        if (!(p < 1.0 - constitutive::kEllipticityGuard)) throw LimitExceeded(m.beta * s);
        density /= std::pow(1.0 - p, 1.0 / m.alpha);
      }
      cell += rule.weights[q] * density;
    }
    total += cell * f.h * f.h;
  }
  return total;
}

double crack_energy(const fem::DofMap& dofs, const NodalField& phi, const MaterialParams& m) {
  const auto& rule = fem::gauss(3);
  double total = 0.0;
  for (int c = 0; c < dofs.n_cells(); ++c) {
    const auto& nodes = dofs.cell_nodes(c);
    const fem::LocalVector<1> pe = fem::gather<1>(phi.values, nodes);
    const double h = dofs.mesh().cells()[c].size();
    double cell = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto& sh = rule.shapes[q];
      double v = 0.0, gx = 0.0, gy = 0.0;
      for (int a = 0; a < 4; ++a) {
        v += sh.values[a] * pe(a);
        gx += sh.grads[a][0] / h * pe(a);
        gy += sh.grads[a][1] / h * pe(a);
      }
      cell += rule.weights[q] * ((1.0 - v) * (1.0 - v) / m.xi + m.xi * (gx * gx + gy * gy));
    }
    total += cell * h * h;
  }
  return 0.5 * m.gc * total;
}

std::vector<double> crack_speed(const std::vector<EnergyRecord>& energies) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < energies.size(); ++k)
    out.push_back((energies[k + 1].crack - energies[k].crack) /
                  (energies[k + 1].time - energies[k].time));
  return out;
}

std::optional<int> take_off_step(const std::vector<EnergyRecord>& energies, int baseline,
                                 double factor, double noise) {
  const std::vector<double> speed = crack_speed(energies);
  if (baseline < 0 || baseline >= static_cast<int>(speed.size())) return std::nullopt;
  const double dt = energies[baseline + 1].time - energies[baseline].time;
  const double threshold = factor * std::max(speed[baseline], noise / dt);
  for (int k = baseline + 1; k < static_cast<int>(speed.size()); ++k)
    if (speed[k] > threshold) return energies[k].step;
  return std::nullopt;
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::sigma22:
      return "sigma22";
    case Quantity::eps22:
      return "eps22";
    case Quantity::eps_nl22:
      return "eps_nl22";
    case Quantity::phi:
      return "phi";
    case Quantity::sigma_phi22:
      return "sigma_phi22";
  }
  return "?";
}

Quantity quantity_from_string(const std::string& s) {
  for (Quantity q : {Quantity::sigma22, Quantity::eps22, Quantity::eps_nl22, Quantity::phi,
                     Quantity::sigma_phi22})
    if (s == to_string(q)) return q;
  throw ConfigError("unknown sample quantity '" + s + "'");
}

double cell_average(const fem::DofMap& dofs, int cell, Quantity q, const NodalField& u,
                    const NodalField& phi, Model model, const MaterialParams& m) {
  const auto& rule = fem::gauss(2);
  const CellFields f = gather_cell(dofs, cell, u, phi);
  double s = 0.0;
  for (int k = 0; k < rule.size(); ++k)
    s += rule.weights[k] * point_value(q, rule.shapes[k], f, model, m);
  return s;
}

std::vector<SampleRow> line_sample(const fem::DofMap& dofs, Quantity q, fem::Point from,
                                   fem::Point to, const NodalField& u, const NodalField& phi,
                                   Model model, const MaterialParams& m) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double len = std::hypot(dx, dy);
  if (!(len > 0.0)) throw ConfigError("line_sample: degenerate segment");
  const auto& mesh = dofs.mesh();
  if (!mesh.domain().contains(from, 1e-12) || !mesh.domain().contains(to, 1e-12))
    throw ConfigError("line_sample: segment leaves the domain");

  // Shift off cell edges towards the left normal.
  const double shift = 1e-6 * mesh.h_min();
  const fem::Point a{from.x - shift * dy / len, from.y + shift * dx / len};
  const fem::Point b{to.x - shift * dy / len, to.y + shift * dx / len};

  struct Hit {
    double t;
    int cell;
  };
  std::vector<Hit> hits;
  const double min_len = 1e-9 * mesh.h_min() / len;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& box = mesh.cells()[c].box;
    // Liang-Barsky clip of a + t (b - a), t in [0, 1].
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-(b.x - a.x), b.x - a.x, -(b.y - a.y), b.y - a.y};
    const double r[4] = {a.x - box.x0, box.x1 - a.x, a.y - box.y0, box.y1 - a.y};
    bool inside = true;
    for (int k = 0; k < 4 && inside; ++k) {
      if (p[k] == 0.0) {
        if (r[k] < 0.0) inside = false;
      } else {
        const double t = r[k] / p[k];
        if (p[k] < 0.0)
          t0 = std::max(t0, t);
        else
          t1 = std::min(t1, t);
      }
    }
    if (inside && t1 - t0 > min_len) hits.push_back({0.5 * (t0 + t1), c});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.t < y.t; });

  std::vector<SampleRow> rows;
  rows.reserve(hits.size());
  for (const Hit& h : hits) {
    const auto c = mesh.cells()[h.cell].centroid();
    rows.push_back({c.x, c.y, q, cell_average(dofs, h.cell, q, u, phi, model, m), h.cell});
  }
  return rows;
}

void write_samples_csv(std::ostream& os, const std::vector<SampleRow>& rows) {
  os << "x,y,quantity,value\n";
  const auto prec = os.precision(17);
  for (const auto& r : rows) os << r.x << ',' << r.y << ',' << to_string(r.quantity) << ',' << r.value << '\n';
  os.precision(prec);
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<SampleRow>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_samples_csv(os, rows);
  if (!os) throw IoError("write failed: " + path.string());
}

void export_vtk(const std::filesystem::path& path, const fem::DofMap& dofs, const NodalField& u,
                const NodalField& phi, Model model, const MaterialParams& m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.precision(17);
  const int np = dofs.n_nodes();
  const int nc = dofs.n_cells();
  os << "# vtk DataFile Version 3.0\nlimitfrac\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << np << " double\n";
  for (const auto& p : dofs.node_points()) os << p.x << ' ' << p.y << " 0\n";
  os << "CELLS " << nc << ' ' << 5 * nc << '\n';
  for (int c = 0; c < nc; ++c) {
    const auto& n = dofs.cell_nodes(c);
    os << "4 " << n[0] << ' ' << n[1] << ' ' << n[2] << ' ' << n[3] << '\n';
  }
  os << "CELL_TYPES " << nc << '\n';
  for (int c = 0; c < nc; ++c) os << "9\n";

  os << "POINT_DATA " << np << "\nVECTORS u double\n";
  for (int k = 0; k < np; ++k) os << u.values(2 * k) << ' ' << u.values(2 * k + 1) << " 0\n";
  os << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k < np; ++k) os << phi.values(k) << '\n';

  os << "CELL_DATA " << nc << '\n';
  for (Quantity q : {Quantity::sigma22, Quantity::eps22, Quantity::sigma_phi22}) {
    os << "SCALARS " << to_string(q) << " double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < nc; ++c) os << cell_average(dofs, c, q, u, phi, model, m) << '\n';
  }
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace limitfrac::postprocess
