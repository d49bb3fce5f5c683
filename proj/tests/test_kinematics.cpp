#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "twistkin/kinematics.hpp"

using namespace twistkin;

TEST_CASE("right isosceles triangle") {
  const TriangleGeometry g = triangle_geometry(1.0, 1.0, std::sqrt(2.0));
  CHECK(g.area == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.delta1 == doctest::Approx(M_PI / 4).epsilon(1e-14));
  CHECK(g.delta2 == doctest::Approx(M_PI / 4).epsilon(1e-14));
  CHECK_FALSE(g.degenerate);
}

TEST_CASE("3-4-5 right triangle") {
  const TriangleGeometry g = triangle_geometry(3.0, 4.0, 5.0);
  CHECK(g.area == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(g.delta1 == doctest::Approx(std::acos(0.6)).epsilon(1e-14));
  CHECK(g.delta2 == doctest::Approx(std::acos(0.8)).epsilon(1e-14));
}

TEST_CASE("collinear boundary flags degenerate") {
  const TriangleGeometry g = triangle_geometry(1.0, 1.0, 2.0);
  CHECK(g.degenerate);
  CHECK(g.area == doctest::Approx(0.0));
  CHECK(g.delta1 == doctest::Approx(0.0));
  CHECK(g.delta2 == doctest::Approx(0.0));
}

TEST_CASE("outside the annulus throws") {
  CHECK_THROWS_AS(triangle_geometry(1.0, 1.0, 2.1), OutsideAnnulus);
  CHECK_THROWS_AS(triangle_geometry(1.0, 3.0, 1.9), OutsideAnnulus);
}

TEST_CASE("azimuth assignments for the two configurations") {
  const TriangleGeometry g = triangle_geometry(1.0, 1.0, std::sqrt(2.0));
  const ConfigAzimuths az = config_azimuths(g, 0.0);
  CHECK(az.phi1_a == doctest::Approx(M_PI / 4).epsilon(1e-14));
  CHECK(az.phi2_a == doctest::Approx(2.0 * M_PI - M_PI / 4).epsilon(1e-14));
  CHECK(az.phi1_b == doctest::Approx(2.0 * M_PI - M_PI / 4).epsilon(1e-14));
  CHECK(az.phi2_b == doctest::Approx(M_PI / 4).epsilon(1e-14));
}

TEST_CASE("degenerate configurations coincide") {
  const TriangleGeometry g = triangle_geometry(1.0, 1.0, 2.0);
  const ConfigAzimuths az = config_azimuths(g, 1.0);
  CHECK(az.phi1_a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(az.phi2_a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(az.phi1_b == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(az.phi2_b == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("3-4-5 azimuths at phi_k = pi/2") {
  const TriangleGeometry g = triangle_geometry(3.0, 4.0, 5.0);
  const ConfigAzimuths az = config_azimuths(g, M_PI / 2);
  CHECK(az.phi1_a == doctest::Approx(M_PI / 2 + std::acos(0.6)).epsilon(1e-14));
  CHECK(az.phi2_a == doctest::Approx(M_PI / 2 - std::acos(0.8)).epsilon(1e-14));
}

TEST_CASE("detuning of a rest atom is pure recoil") {
  const BesselMode b1 = tst::photon_up(0.1, 1);
  const BesselMode b2 = tst::photon_down(0.1, -1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);

  CHECK(detuning_from_transfer(b1, b2, atom, {0.0, 0.0, 0.0}) == 0.0);

  const double delta0 = 1.3e-12;
  const double k2 = 2.0 * atom.mass_i * delta0;
  const TransferVector K{std::sqrt(k2 - 0.01), 0.7, 0.1};
  CHECK(detuning_from_transfer(b1, b2, atom, K) ==
        doctest::Approx(delta0).epsilon(1e-12));
}

TEST_CASE("crossing atom sees the Doppler shift beta * k_perp") {
  const BesselMode b1 = tst::photon_up(0.1, 1);
  const BesselMode b2 = tst::photon_down(0.1, -1);
  AtomBeam atom = tst::atom_at_rest(1.0e10);
  const double beta = 0.3;
  atom.p = {beta * atom.mass_i, 0.0, 0.0};

  for (double ratio : {1e-2, 1e-3, 1e-4}) {
    const double kp = ratio * atom.p.x;
    const double delta =
        detuning_from_transfer(b1, b2, atom, {kp, 0.0, 0.0});
    CHECK(delta == doctest::Approx(beta * kp).epsilon(1e-2));
  }
}

TEST_CASE("relativistic detuning reduces to recoil plus known corrections") {
  // At small momentum the exact shell energy differs from the recoil
  // formula by the excitation-mass shift and the quartic kinetic term.
  const BesselMode b1 = tst::photon_up(0.2, 0);
  const BesselMode b2 = tst::photon_down(0.15, 0);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    AtomBeam nr = tst::atom_at_rest(1.0e6);
    nr.p = {1e-3 * nr.mass_i * u(gen), 1e-3 * nr.mass_i * u(gen),
            1e-3 * nr.mass_i * u(gen)};
    AtomBeam rel = nr;
    rel.relativistic = true;
    const TransferVector K{0.25 * std::fabs(u(gen)) + 0.05,
                           M_PI * (u(gen) + 1.0), 0.05 * u(gen)};
    const double dn = detuning_from_transfer(b1, b2, nr, K);
    const double dr = detuning_from_transfer(b1, b2, rel, K);

    const Vec3 kv{K.k_perp * std::cos(K.phi_k), K.k_perp * std::sin(K.phi_k),
                  K.kz};
    const Vec3 pf{nr.p.x + kv.x, nr.p.y + kv.y, nr.p.z + kv.z};
    const double m = nr.mass_i;
    const double mf = m + nr.E_exc;
    const double pf2 = dot(pf, pf);
    const double p2 = dot(nr.p, nr.p);
    const double predicted = -pf2 * nr.E_exc / (2.0 * m * mf) -
                             (pf2 * pf2 - p2 * p2) / (8.0 * m * m * m);
    CHECK(std::fabs((dr - dn) - predicted) <=
          0.02 * std::fabs(predicted) + 1e-10 * std::fabs(dn));
  }
}

TEST_CASE("kick polar angle") {
  CHECK(kick_polar_angle(0.5, 0.0, 1.0) == doctest::Approx(M_PI / 2));
  // 2 M delta = 0.04, kz = 0.1: cos(theta) = 0.5.
  CHECK(kick_polar_angle(0.02, 0.1, 1.0) ==
        doctest::Approx(M_PI / 3).epsilon(1e-14));
  CHECK_THROWS_AS(kick_polar_angle(0.02, 0.3, 1.0), NoSolution);
}

TEST_CASE("rest window endpoints") {
  const BesselMode b1 = tst::photon_up(0.1, 1);
  const BesselMode b2 = tst::photon_down(0.1, -1);
  const DetuningWindow w = detuning_window_rest(b1, b2, tst::atom_at_rest(1e10));
  CHECK(w.delta_min == doctest::Approx(0.0));
  CHECK(w.delta_max == doctest::Approx(2.0e-12).epsilon(1e-12));

  const BesselMode c1 = tst::mode(2.0, 3.0, 0);
  const BesselMode c2 = tst::mode(-2.0, 4.0, 0);
  const DetuningWindow w2 =
      detuning_window_rest(c1, c2, tst::atom_at_rest(1.0));
  CHECK(w2.delta_min == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w2.delta_max == doctest::Approx(24.5).epsilon(1e-14));
}

TEST_CASE("crossed window scales with beta") {
  const BesselMode b1 = tst::photon_up(0.1, 1);
  const BesselMode b2 = tst::photon_down(0.1, -1);

  AtomBeam atom = tst::atom_at_rest(1.0e10);
  atom.p = {0.5 * atom.mass_i, 0.0, 0.0};
  DetuningWindow w = detuning_window_crossed(b1, b2, atom);
  CHECK(w.delta_min == doctest::Approx(-0.1).epsilon(1e-9));
  CHECK(w.delta_max == doctest::Approx(0.1).epsilon(1e-9));

  atom.p = {0.0, 0.0, 0.0};
  w = detuning_window_crossed(b1, b2, atom);
  CHECK(w.delta_min == 0.0);
  CHECK(w.delta_max == 0.0);
}

TEST_CASE("plane-wave reference closes the kinematics") {
  const BesselMode b1 = tst::photon_up(0.1, 1);
  const BesselMode b2 = tst::photon_down(0.1, -1);
  AtomBeam atom = tst::atom_at_rest(1e10, b1.omega + b2.omega);

  // Counter-propagating, opposite azimuths: K = 0, no recoil.
  const PlaneWaveReference pw = pw_reference(b1, b2, 0.3, 0.3 + M_PI, atom);
  CHECK(norm(pw.K) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pw.mismatch == doctest::Approx(0.0).epsilon(1e-15));

  // Same-side azimuths: K_perp = kappa1 + kappa2, mismatch is the recoil.
  const PlaneWaveReference pw2 = pw_reference(b1, b2, 0.3, 0.3, atom);
  const double k2 = dot(pw2.K, pw2.K);
  CHECK(pw2.mismatch ==
        doctest::Approx(-k2 / (2.0 * atom.mass_i)).epsilon(1e-12));
}

TEST_CASE("random triangles satisfy the law of cosines") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double k1 = 0.05 + u(gen);
    const double k2 = 0.05 + u(gen);
    const double lo = std::fabs(k1 - k2);
    const double hi = k1 + k2;
    const double kp = lo + (hi - lo) * (0.01 + 0.98 * u(gen));
    const TriangleGeometry g = triangle_geometry(k1, k2, kp);
    CHECK(g.delta1 >= 0.0);
    CHECK(g.delta1 <= M_PI);
    CHECK(g.delta2 >= 0.0);
    CHECK(g.delta2 <= M_PI);
    // Angle between the two transverse photon momenta is pi - d1 - d2.
    CHECK(2.0 * g.area ==
          doctest::Approx(k1 * k2 * std::sin(g.delta1 + g.delta2))
              .epsilon(1e-9));
    // Side closure along and across the transfer direction.
    const ConfigAzimuths az = config_azimuths(g, 2.0 * M_PI * u(gen));
    for (bool config_a : {true, false}) {
      const double p1 = config_a ? az.phi1_a : az.phi1_b;
      const double p2 = config_a ? az.phi2_a : az.phi2_b;
      const double kx = k1 * std::cos(p1) + k2 * std::cos(p2);
      const double ky = k1 * std::sin(p1) + k2 * std::sin(p2);
      CHECK(std::fabs(std::hypot(kx, ky) - kp) <= 1e-9 * std::max(k1, k2));
    }
  }
}

TEST_CASE("annulus gate matches the triangle inequalities") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double k1 = 0.05 + u(gen);
    const double k2 = 0.05 + u(gen);
    const double kp = 2.2 * u(gen);
    const double lo = std::fabs(k1 - k2);
    const double hi = k1 + k2;
    const double eps = default_eps_boundary(k1, k2);
    if (kp < lo - eps || kp > hi + eps) {
      CHECK_THROWS_AS(triangle_geometry(k1, k2, kp), OutsideAnnulus);
    } else if (kp > lo + eps && kp < hi - eps) {
      CHECK_FALSE(triangle_geometry(k1, k2, kp).degenerate);
    }
  }
}

TEST_CASE("window endpoints come from the annulus rims") {
  const BesselMode b1 = tst::mode(0.4, 0.35, 2);
  const BesselMode b2 = tst::mode(-0.3, 0.2, -1);
  const AtomBeam atom = tst::atom_at_rest(5.0e9);
  const DetuningWindow w = detuning_window_rest(b1, b2, atom);
  const double kz = b1.kz + b2.kz;
  const TransferVector inner{std::fabs(b1.kappa - b2.kappa), 0.0, kz};
  const TransferVector outer{b1.kappa + b2.kappa, 0.0, kz};
  CHECK(w.delta_min ==
        doctest::Approx(detuning_from_transfer(b1, b2, atom, inner))
            .epsilon(1e-12));
  CHECK(w.delta_max ==
        doctest::Approx(detuning_from_transfer(b1, b2, atom, outer))
            .epsilon(1e-12));
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_two_pi(-1e-18) == 0.0);
  CHECK(wrap_two_pi(2.0 * M_PI) == doctest::Approx(0.0));
  CHECK(wrap_two_pi(-M_PI / 2) == doctest::Approx(1.5 * M_PI));
  CHECK(wrap_pi(3.0 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_pi(-M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("mode and atom validation") {
  BesselMode bad = tst::photon_up(0.1, 1);
  bad.omega *= 1.0 + 1e-6;
  CHECK_THROWS_AS(validate_mode(bad), PhysicsError);
  bad = tst::photon_up(0.1, 1);
  bad.kappa = -0.1;
  CHECK_THROWS_AS(validate_mode(bad), PhysicsError);

  AtomBeam atom = tst::atom_at_rest(0.0);
  CHECK_THROWS_AS(validate_atom(atom), PhysicsError);
  atom = tst::atom_at_rest(1.0);
  atom.E_exc = -1.0;
  CHECK_THROWS_AS(validate_atom(atom), PhysicsError);
}
