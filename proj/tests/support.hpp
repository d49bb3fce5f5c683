#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "twistkin/kinematics.hpp"

// Shared test helpers: standard mode constructors, scratch directories and
// the chi-square quantiles used by the statistical checks.

namespace tst {

// Bessel mode on the light cone: omega fixed by (kz, kappa).
inline twistkin::BesselMode mode(double kz, double kappa, int m) {
  twistkin::BesselMode b;
  b.kz = kz;
  b.kappa = kappa;
  b.m = m;
  b.omega = std::sqrt(kz * kz + kappa * kappa);
  b.mass = 0.0;
  return b;
}

inline twistkin::AtomBeam atom_at_rest(double mass, double e_exc = 2.0) {
  twistkin::AtomBeam a;
  a.mass_i = mass;
  a.p = {0.0, 0.0, 0.0};
  a.E_exc = e_exc;
  return a;
}

// Counter-propagating pair with total energy 2 (omega = 1 each).
inline twistkin::BesselMode photon_up(double kappa, int m) {
  return mode(std::sqrt(1.0 - kappa * kappa), kappa, m);
}
inline twistkin::BesselMode photon_down(double kappa, int m) {
  return mode(-std::sqrt(1.0 - kappa * kappa), kappa, m);
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

// Fresh scratch directory under the test working directory.
inline std::string scratch_dir(const std::string& tag) {
  static int counter = 0;
  const std::string dir = "scratch_" + tag + "_" + std::to_string(counter++);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// 99th percentile of chi-square, indexed by degrees of freedom. Wilson-
// Hilferty cube approximation, good to ~0.2% for dof >= 10.
inline double chi2_q99(int dof) {
  const double z = 2.3263478740408408;  // standard normal 99th percentile
  const double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  return dof * t * t * t;
}

}  // namespace tst
