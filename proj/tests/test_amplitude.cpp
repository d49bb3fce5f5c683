#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "support.hpp"
#include "twistkin/amplitude.hpp"

using namespace twistkin;

namespace {

BesselMode lit_mode(double kz, double kappa, int m) {
  BesselMode b = tst::mode(kz, kappa, m);
  b.omega = std::sqrt(kz * kz + kappa * kappa);
  return b;
}

PWAmplitudeModel constant_model(complexd m0 = {1.0, 0.0}) {
  PWAmplitudeModel m;
  m.kind = PWAmplitudeModel::Kind::constant;
  m.m0 = m0;
  return m;
}

}  // namespace

TEST_CASE("unit right-isosceles pair with no orbital index gives J = 2") {
  const BesselMode b1 = lit_mode(1.0, 1.0, 0);
  const BesselMode b2 = lit_mode(-1.0, 1.0, 0);
  const TransferVector K{std::sqrt(2.0), 0.0, 0.0};
  const TwistedAmplitude J = twisted_amplitude(b1, b2, K, constant_model());
  CHECK(J.value.real() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(J.value.imag() == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("3-4-5 geometry with m = (1,1) sits on an exact interference zero") {
  const BesselMode b1 = lit_mode(1.0, 3.0, 1);
  const BesselMode b2 = lit_mode(-1.0, 4.0, 1);
  const TransferVector K{5.0, 0.4, 0.0};
  const TwistedAmplitude J = twisted_amplitude(b1, b2, K, constant_model());
  // kappa1 kappa2 / (2 area) = 1 here, so the bound is absolute.
  CHECK(std::abs(J.value) <= 1e-12);
}

TEST_CASE("m = (1,0) rotates the right-isosceles amplitude to sqrt(2)") {
  const BesselMode b1 = lit_mode(1.0, 1.0, 1);
  const BesselMode b2 = lit_mode(-1.0, 1.0, 0);
  for (double phi : {0.0, 0.4, 2.0, 5.5}) {
    const TransferVector K{std::sqrt(2.0), phi, 0.0};
    const TwistedAmplitude J = twisted_amplitude(b1, b2, K, constant_model());
    const complexd want = std::sqrt(2.0) * std::polar(1.0, phi);
    CHECK(std::abs(J.value - want) <= 1e-12);
  }
}

TEST_CASE("fringe phase and its squared cosine") {
  CHECK(fringe_function(0, 0, triangle_geometry(1.0, 1.0, 1.3)) == 0.0);
  // Right angle: the cos^2 fringe factor vanishes.
  const double phi345 = fringe_function(1, 1, triangle_geometry(3.0, 4.0, 5.0));
  CHECK(phi345 == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(std::pow(std::cos(phi345), 2) <= 1e-28);
  const double phi110 =
      fringe_function(1, 0, triangle_geometry(1.0, 1.0, std::sqrt(2.0)));
  CHECK(std::pow(std::cos(phi110), 2) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("|J| is independent of the transfer azimuth") {
  const BesselMode b1 = lit_mode(0.9, 0.7, 3);
  const BesselMode b2 = lit_mode(-0.8, 1.1, -2);
  PWAmplitudeModel model;
  model.kind = PWAmplitudeModel::Kind::relative_phase;
  model.m0 = {0.6, -0.2};
  model.phase_ab = 0.9;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  const TransferVector K0{1.2, 0.0, b1.kz + b2.kz};
  const double ref = std::abs(twisted_amplitude(b1, b2, K0, model).value);
  for (int i = 0; i < 50; ++i) {
    TransferVector K = K0;
    K.phi_k = u(gen);
    CHECK(std::abs(twisted_amplitude(b1, b2, K, model).value) ==
          doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("flipping both orbital indices conjugates the bracket") {
  BesselMode b1 = lit_mode(0.9, 0.7, 4);
  BesselMode b2 = lit_mode(-0.8, 1.1, -1);
  const TransferVector K{1.3, 0.7, b1.kz + b2.kz};
  const double ref = std::abs(twisted_amplitude(b1, b2, K, constant_model()).value);
  b1.m = -4;
  b2.m = 1;
  CHECK(std::abs(twisted_amplitude(b1, b2, K, constant_model()).value) ==
        doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("approaching the outer rim, |J| * area reaches a finite limit") {
  const BesselMode b1 = lit_mode(1.0, 0.6, 2);
  const BesselMode b2 = lit_mode(-1.0, 0.9, 1);
  const PWAmplitudeModel model = constant_model({0.7, 0.3});
  const double hi = b1.kappa + b2.kappa;
  // Configurations merge at the rim: M_a + M_b = 2 m0 with vanishing phase.
  const double want = 0.5 * b1.kappa * b2.kappa * std::abs(2.0 * model.m0);
  double prev_err = 1e300;
  for (double rel : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const TransferVector K{hi * (1.0 - rel), 0.0, 0.0};
    const TwistedAmplitude J = twisted_amplitude(b1, b2, K, model);
    const double got =
        std::abs(J.value) * triangle_geometry(b1.kappa, b2.kappa, K.k_perp).area;
    const double err = std::fabs(got - want) / want;
    CHECK(err < prev_err + 1e-12);
    prev_err = err;
  }
  CHECK(prev_err <= 1e-4);
}

TEST_CASE("annulus violations and degenerate limits throw") {
  const BesselMode b1 = lit_mode(1.0, 1.0, 0);
  const BesselMode b2 = lit_mode(-1.0, 1.0, 0);
  CHECK_THROWS_AS(
      twisted_amplitude(b1, b2, {2.1, 0.0, 0.0}, constant_model()),
      OutsideAnnulus);
  // Exactly on the rim the area vanishes and the envelope diverges.
  CHECK_THROWS_AS(
      twisted_amplitude(b1, b2, {2.0, 0.0, 0.0}, constant_model()),
      DegenerateBoundary);
}

TEST_CASE("near a rim but at finite area the boundary flag is set") {
  const BesselMode b1 = lit_mode(1.0, 1.0, 0);
  const BesselMode b2 = lit_mode(-1.0, 1.0, 0);
  const TransferVector K{2.0 * (1.0 - 1e-8), 0.0, 0.0};
  const TwistedAmplitude J =
      twisted_amplitude(b1, b2, K, constant_model(), 1e-6);
  CHECK(J.boundary_flag);
}

TEST_CASE("relative phase shifts the fringe but not the envelope") {
  const BesselMode b1 = lit_mode(1.0, 1.0, 1);
  const BesselMode b2 = lit_mode(-1.0, 1.0, 1);
  PWAmplitudeModel model;
  model.kind = PWAmplitudeModel::Kind::relative_phase;
  model.m0 = {1.0, 0.0};
  model.phase_ab = M_PI;
  // At the 2 Phi = pi point the constant model vanishes; the pi-shifted
  // model is at its maximum there instead.
  const TransferVector K{std::sqrt(2.0), 0.0, 0.0};
  const double shifted = std::abs(twisted_amplitude(b1, b2, K, model).value);
  const double flat =
      std::abs(twisted_amplitude(b1, b2, K, constant_model()).value);
  CHECK(flat <= 1e-12);
  CHECK(shifted == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("single-cell table model reduces to the constant model") {
  PWAmplitudeModel table;
  table.kind = PWAmplitudeModel::Kind::user_table;
  table.table_n1 = 1;
  table.table_n2 = 1;
  table.table = {{0.8, -0.1}};
  const PWAmplitudeModel constant = constant_model({0.8, -0.1});
  const BesselMode b1 = lit_mode(0.9, 0.7, 2);
  const BesselMode b2 = lit_mode(-0.8, 1.1, -3);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const TransferVector K{0.5 + 1.2 * u(gen), 2.0 * M_PI * u(gen),
                           b1.kz + b2.kz};
    const complexd a = twisted_amplitude(b1, b2, K, table).value;
    const complexd b = twisted_amplitude(b1, b2, K, constant).value;
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b) + 1e-15);
  }
}

TEST_CASE("xsec density gates on the annulus and energy shell") {
  const BesselMode b1 = tst::photon_up(0.1, 1);
  const BesselMode b2 = tst::photon_down(0.1, -1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const PWAmplitudeModel model = constant_model();

  // Outside the annulus the density vanishes rather than throwing.
  CHECK(xsec_density(b1, b2, atom, model, {0.5, 0.0, 0.0}, 1e-13) == 0.0);

  // On shell: K_perp^2 = 2 M delta.
  const double delta = 1.1e-12;
  const double kp = std::sqrt(2.0 * atom.mass_i * delta);
  const TransferVector K{kp, 0.3, 0.0};
  const double d = xsec_density(b1, b2, atom, model, K, delta);
  const TwistedAmplitude J = twisted_amplitude(b1, b2, K, model);
  CHECK(d == doctest::Approx(std::norm(J.value)).epsilon(1e-12));

  // Far off shell the gate zeroes the density.
  CHECK(xsec_density(b1, b2, atom, model, K, 2.0 * delta) == 0.0);
}

TEST_CASE("model validation") {
  PWAmplitudeModel m;
  m.kind = PWAmplitudeModel::Kind::user_table;
  m.table_n1 = 2;
  m.table_n2 = 2;
  m.table = {{1.0, 0.0}};  // wrong payload size
  CHECK_THROWS_AS(validate_model(m), SchemaError);
  m.table_n1 = 0;
  CHECK_THROWS_AS(validate_model(m), SchemaError);
}
