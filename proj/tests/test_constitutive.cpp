#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "limitfrac/constitutive.hpp"
#include "limitfrac/errors.hpp"

using namespace limitfrac;
using namespace limitfrac::constitutive;
using limitfrac::test::random_admissible;
using limitfrac::test::random_tensor;
using limitfrac::test::rel_diff;

namespace {

MaterialParams unit_lame() {
  MaterialParams m;
  m.lambda = 1.0;
  m.mu = 1.0;
  return m;
}

MaterialParams limiting(double alpha, double beta) {
  MaterialParams m;
  m.lambda = 1.3;
  m.mu = 0.7;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

}  // namespace

TEST_CASE("hooke stress") {
  const MaterialParams m = unit_lame();
  const SymTensor2 zero = hooke_stress({}, m);
  CHECK(zero.frobenius() == 0.0);

  const SymTensor2 s = hooke_stress(SymTensor2::identity(), m);
  CHECK(s.xx == doctest::Approx(4.0));
  CHECK(s.yy == doctest::Approx(4.0));
  CHECK(s.xy == 0.0);

  MaterialParams steel;
  steel.lambda = 121.15e3;
  steel.mu = 80.77e3;
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const SymTensor2 e = random_tensor(rng, 1e-3);
    const SymTensor2 h = hooke_stress(e, steel);
    const double tr = e.xx + e.yy;
    CHECK(h.xx == doctest::Approx(2.0 * steel.mu * e.xx + steel.lambda * tr).epsilon(1e-14));
    CHECK(h.yy == doctest::Approx(2.0 * steel.mu * e.yy + steel.lambda * tr).epsilon(1e-14));
    CHECK(h.xy == doctest::Approx(2.0 * steel.mu * e.xy).epsilon(1e-14));
  }
}

TEST_CASE("compliance") {
  const MaterialParams m = unit_lame();
  CHECK(compliance(SymTensor2{}, m).frobenius() == 0.0);

  SUBCASE("hydrostatic stress with sigma_zz = p") {
    const SymTensor2 k = compliance(SymTensor2::identity(), 1.0, m);
    CHECK(k.xx == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(k.yy == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(k.xy == doctest::Approx(0.0));
  }

  SUBCASE("round trip against hooke") {
    std::mt19937_64 rng(11);
    for (const MaterialParams& mat : {m, limiting(1.0, 0.0)}) {
      for (int k = 0; k < 200; ++k) {
        const SymTensor2 sig = random_tensor(rng, 10.0);
        CHECK(rel_diff(hooke_stress(compliance(sig, mat), mat), sig) < 1e-12);
        const SymTensor2 eps = random_tensor(rng);
        CHECK(rel_diff(compliance(hooke_stress(eps, mat), mat), eps) < 1e-12);
      }
    }
  }
}

TEST_CASE("half norms") {
  const MaterialParams m = unit_lame();
  CHECK(half_norm_stress(SymTensor2{}, m) == 0.0);
  CHECK(half_norm_strain(SymTensor2{}, m) == 0.0);
  CHECK(half_norm_stress(SymTensor2::identity(), 1.0, m) ==
        doctest::Approx(std::sqrt(0.6)).epsilon(1e-14));
  CHECK(half_norm_strain(SymTensor2::identity(), m) ==
        doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  const MaterialParams mat = limiting(1.0, 0.0);
  for (int k = 0; k < 200; ++k) {
    const SymTensor2 sig = random_tensor(rng, 5.0);
    CHECK(half_norm_stress(sig, mat) ==
          doctest::Approx(std::sqrt(ddot(sig, compliance(sig, mat)))).epsilon(1e-12));
    const SymTensor2 eps = random_tensor(rng);
    CHECK(half_norm_strain(eps, mat) ==
          doctest::Approx(std::sqrt(ddot(eps, hooke_stress(eps, mat)))).epsilon(1e-12));
  }

  MaterialParams bad = m;
  bad.lambda = -2.0;  // bulk modulus below zero: the stress half norm has no real root
  CHECK_THROWS_AS(half_norm_stress(SymTensor2::identity(), 1.0, bad), ConfigError);
}

TEST_CASE("phi_tilde") {
  CHECK(phi_tilde(0.0, 0.5, 3.0) == 1.0);
  CHECK(phi_tilde(17.0, 0.5, 0.0) == 1.0);
  CHECK(phi_tilde(3.0, 1.0, 2.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));

  for (double alpha : {0.1, 0.25, 1.0, 2.0, 8.0})
    for (double beta : {0.04, 1.0, 127.0}) {
      double prev = 1.0;
      for (int k = 1; k <= 400; ++k) {
        const double r = 0.05 * k * k / beta;
        const double v = phi_tilde(r, alpha, beta);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        CHECK(v < prev);
        CHECK(r * v <= 1.0 / beta * (1.0 + 1e-14));
        prev = v;
      }
    }
}

TEST_CASE("strain_nl") {
  const MaterialParams m = unit_lame();
  CHECK(strain_nl(SymTensor2{}, limiting(1.0, 1.0)).frobenius() == 0.0);

  SUBCASE("beta = 0 is the compliance") {
    std::mt19937_64 rng(5);
    const MaterialParams mat = limiting(0.5, 0.0);
    for (int k = 0; k < 50; ++k) {
      const SymTensor2 sig = random_tensor(rng, 3.0);
      const SymTensor2 a = strain_nl(sig, mat);
      const SymTensor2 b = compliance(sig, mat);
      CHECK(a.xx == b.xx);
      CHECK(a.yy == b.yy);
      CHECK(a.xy == b.xy);
    }
  }

  SUBCASE("hydrostatic closed form") {
    MaterialParams mat = m;
    mat.alpha = 1.0;
    mat.beta = 1.0;
    const SymTensor2 e = strain_nl(SymTensor2::identity(), 1.0, mat);
    const double expected = 0.2 / (1.0 + std::sqrt(0.6));
    CHECK(e.xx == doctest::Approx(expected).epsilon(1e-14));
    CHECK(e.yy == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.112702).epsilon(1e-5));
  }

  SUBCASE("limited componentwise and monotone in beta") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 100; ++k) {
      const SymTensor2 sig = random_tensor(rng, 20.0);
      const SymTensor2 lin = compliance(sig, limiting(0.25, 0.0));
      double prev = lin.frobenius();
      for (double beta : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const SymTensor2 e = strain_nl(sig, limiting(0.25, beta));
        CHECK(std::abs(e.xx) <= std::abs(lin.xx));
        CHECK(std::abs(e.yy) <= std::abs(lin.yy));
        CHECK(std::abs(e.xy) <= std::abs(lin.xy));
        CHECK(e.frobenius() <= prev);
        prev = e.frobenius();
      }
    }
  }
}

TEST_CASE("stress_sl") {
  CHECK(stress_sl(SymTensor2{}, limiting(1.0, 1.0)).frobenius() == 0.0);

  SUBCASE("beta = 0 is hooke") {
    std::mt19937_64 rng(13);
    const MaterialParams mat = limiting(2.0, 0.0);
    for (int k = 0; k < 50; ++k) {
      const SymTensor2 eps = random_tensor(rng, 10.0);
      const SymTensor2 a = stress_sl(eps, mat);
      const SymTensor2 b = hooke_stress(eps, mat);
      CHECK(a.xx == b.xx);
      CHECK(a.yy == b.yy);
      CHECK(a.xy == b.xy);
    }
  }

  SUBCASE("inverse pair with strain_nl") {
    std::mt19937_64 rng(17);
    double worst = 0.0;
    for (double alpha : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0})
      for (double beta : {0.04, 0.92, 4.8e-4, 127.0}) {
        const MaterialParams mat = limiting(alpha, beta);
        for (int k = 0; k < 50; ++k) {
          const SymTensor2 eps = random_admissible(rng, mat);
          worst = std::max(worst, rel_diff(strain_nl(stress_sl(eps, mat), mat), eps));
        }
      }
    CHECK(worst < 1e-10);
  }

  SUBCASE("outside the admissible set") {
    const MaterialParams mat = limiting(0.5, 2.0);
    SymTensor2 eps{1.0, -0.3, 0.2};
    eps *= 1.0001 / (mat.beta * half_norm_strain(eps, mat));
    CHECK_THROWS_AS(stress_sl(eps, mat), LimitExceeded);
    try {
      stress_sl(eps, mat);
    } catch (const LimitExceeded& e) {
      CHECK(e.ratio() == doctest::Approx(1.0001).epsilon(1e-12));
    }
    CHECK(ellipticity_ratio(eps, mat) == doctest::Approx(1.0001).epsilon(1e-12));
  }

  SUBCASE("large alpha approaches hooke") {
    std::mt19937_64 rng(19);
    const MaterialParams mat = limiting(64.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const SymTensor2 eps = random_admissible(rng, mat, 0.5);
      CHECK(rel_diff(stress_sl(eps, mat), hooke_stress(eps, mat)) < 1e-3);
    }
  }
}

TEST_CASE("tangent_sl") {
  std::mt19937_64 rng(23);

  SUBCASE("linear limits") {
    const SymTensor2 d{0.3, -0.2, 0.7};
    const MaterialParams lin = limiting(0.5, 0.0);
    CHECK(rel_diff(tangent_sl({0.1, 0.2, 0.3}, d, lin), hooke_stress(d, lin)) == 0.0);
    const MaterialParams mat = limiting(2.0, 1.5);
    CHECK(rel_diff(tangent_sl({}, d, mat), hooke_stress(d, mat)) == 0.0);
    const MaterialParams low = limiting(0.25, 1.5);
    CHECK(rel_diff(tangent_sl({}, d, low), hooke_stress(d, low)) == 0.0);
  }

  SUBCASE("central differences") {
    double worst = 0.0;
    for (double alpha : {0.25, 0.5, 1.0, 2.0, 3.0})
      for (double beta : {0.1, 1.0, 127.0}) {
        const MaterialParams mat = limiting(alpha, beta);
        for (int k = 0; k < 40; ++k) {
          const SymTensor2 eps = random_admissible(rng, mat, 0.9);
          const SymTensor2 d = random_tensor(rng) * eps.frobenius();
          const double h = 1e-6;
          const SymTensor2 fd =
              (stress_sl(eps + h * d, mat) - stress_sl(eps - h * d, mat)) / (2.0 * h);
          worst = std::max(worst, rel_diff(tangent_sl(eps, d, mat), fd));
        }
      }
    CHECK(worst < 1e-6);
  }

  SUBCASE("voigt matrix matches the directional form and is symmetric") {
    const MaterialParams mat = limiting(0.5, 2.0);
    for (int k = 0; k < 50; ++k) {
      const SymTensor2 eps = random_admissible(rng, mat);
      const SymTensor2 d = random_tensor(rng);
      const Eigen::Matrix3d t = tangent_matrix(Model::nlsl, eps, mat);
      CHECK((t - t.transpose()).norm() <= 1e-12 * t.norm());
      const Eigen::Vector3d v = t * Eigen::Vector3d(d.xx, d.yy, 2.0 * d.xy);
      const SymTensor2 dir = tangent_sl(eps, d, mat);
      CHECK(rel_diff({v(0), v(1), v(2)}, dir) < 1e-12);
      const StressTangent st = stress_and_tangent(Model::nlsl, eps, mat);
      CHECK(rel_diff(st.stress, stress_sl(eps, mat)) < 1e-14);
      CHECK((st.tangent - t).norm() <= 1e-14 * t.norm());
    }
  }
}

TEST_CASE("degradation") {
  CHECK(degradation(1.0, 1e-10) == doctest::Approx(1.0));
  CHECK(degradation(0.0, 1e-10) == 1e-10);
  CHECK(degradation(0.5, 0.0) == 0.25);
}

TEST_CASE("material validation") {
  MaterialParams m;
  CHECK_NOTHROW(m.validate());
  m.mu = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = MaterialParams{};
  m.alpha = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = MaterialParams{};
  m.beta = -1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = MaterialParams{};
  m.lambda = -1.0;  // 3 lambda + 2 mu < 0
  CHECK_THROWS_AS(m.validate(), ConfigError);
}
