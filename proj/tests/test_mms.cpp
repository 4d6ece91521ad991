#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "limitfrac/mms.hpp"
#include "limitfrac/presets.hpp"

using namespace limitfrac;
using constitutive::Model;

namespace {

// Reference L2 errors and rates, cycles 1-6.
constexpr double kLinearError[] = {0.033493958414, 0.008457780816, 0.002119761659,
                                   0.000530273421, 0.000132589164, 0.000033148594};
constexpr double kLinearRate[] = {0.0, 2.6942, 2.3542, 2.1788, 2.0898, 2.0450};
constexpr double kNonlinearError[] = {0.031402524561, 0.007450392935, 0.001790875453,
                                      0.000437507028, 0.000108024578, 0.000026842623};
constexpr double kNonlinearRate[] = {0.0, 2.8163, 2.4253, 2.2160, 2.1088, 2.0540};

}  // namespace

TEST_CASE("exact fields") {
  const fem::Point p{0.3, 0.7};
  const auto u = mms::exact_displacement(p);
  CHECK(u[0] == doctest::Approx(std::sin(0.3) * std::sin(0.7)));
  CHECK(u[1] == doctest::Approx(std::cos(0.3) * std::cos(0.7)));
  const auto e = mms::exact_strain(p);
  CHECK(e.xx == doctest::Approx(std::cos(0.3) * std::sin(0.7)));
  CHECK(e.yy == doctest::Approx(-std::cos(0.3) * std::sin(0.7)));
  CHECK(e.xy == doctest::Approx(0.0).scale(1.0));
  CHECK(e.trace() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("linear forcing is 2 mu u for a divergence-free field") {
  constitutive::MaterialParams m;
  m.lambda = 3.0;
  m.mu = 0.7;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> x(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const fem::Point p{x(rng), x(rng)};
    const auto f = mms::forcing(p, m, Model::lefm);
    const auto u = mms::exact_displacement(p);
    CHECK(f[0] == doctest::Approx(2.0 * m.mu * u[0]).epsilon(1e-13));
    CHECK(f[1] == doctest::Approx(2.0 * m.mu * u[1]).epsilon(1e-13));
  }
}

TEST_CASE("finite-difference forcing at beta = 0 matches the closed form") {
  constitutive::MaterialParams m;
  m.lambda = 0.01;
  m.mu = 0.01;
  m.alpha = 0.1;
  m.beta = 0.0;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> x(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const fem::Point p{x(rng), x(rng)};
    const auto a = mms::forcing(p, m, Model::nlsl);
    const auto b = mms::forcing(p, m, Model::lefm);
    const double scale = std::hypot(b[0], b[1]);
    CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) <= 1e-8 * scale);
  }
}

TEST_CASE("rates are DOF based") {
  CHECK(mms::dof_rate(4.0, 1.0, 100, 400) == doctest::Approx(2.0));
  CHECK(mms::dof_rate(0.033493958414, 0.008457780816, 18, 50) ==
        doctest::Approx(2.6942).epsilon(1e-4));
}

TEST_CASE("convergence table") {
  for (Model model : {Model::lefm, Model::nlsl}) {
    const bool lin = model == Model::lefm;
    const RunConfig cfg = preset(lin ? "ex1_linear" : "ex1_nonlinear");
    const auto rows = mms::convergence_study(cfg, 6);
    REQUIRE(rows.size() == 6);
    const double* err = lin ? kLinearError : kNonlinearError;
    const double* rate = lin ? kLinearRate : kNonlinearRate;
    const double tol = lin ? 0.01 : 0.02;
    for (int c = 0; c < 6; ++c) {
      CAPTURE(c);
      CHECK(rows[c].cycle == c + 1);
      CHECK(rows[c].cells == 1 << (2 * (c + 1)));
      CHECK(std::abs(rows[c].error - err[c]) <= tol * err[c]);
      if (c == 0) {
        CHECK_FALSE(rows[c].rate.has_value());
      } else {
        REQUIRE(rows[c].rate.has_value());
        CHECK(std::abs(*rows[c].rate - rate[c]) <= 0.05);
      }
    }
    std::ostringstream csv;
    mms::write_table_csv(csv, rows);
    CHECK(csv.str().find('\n') != std::string::npos);
  }
}
