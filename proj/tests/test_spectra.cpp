#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "twistkin/amplitude.hpp"
#include "twistkin/errors.hpp"
#include "twistkin/kinematics.hpp"
#include "twistkin/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace twistkin;

namespace {

PWAmplitudeModel constant_model() {
  PWAmplitudeModel m;
  m.kind = PWAmplitudeModel::Kind::constant;
  m.m0 = {1.0, 0.0};
  return m;
}

PWAmplitudeModel phase_model(double phase_ab) {
  PWAmplitudeModel m;
  m.kind = PWAmplitudeModel::Kind::relative_phase;
  m.m0 = {1.0, 0.0};
  m.phase_ab = phase_ab;
  return m;
}

// Law-of-cosines azimuth openings, written out independently of the
// library triangle routines.
double opening1(double k1, double k2, double k) {
  return std::acos(std::clamp((k1 * k1 + k * k - k2 * k2) / (2.0 * k1 * k), -1.0, 1.0));
}
double opening2(double k1, double k2, double k) {
  return std::acos(std::clamp((k2 * k2 + k * k - k1 * k1) / (2.0 * k2 * k), -1.0, 1.0));
}

// Sign changes of cos(m1 d1 + m2 d2 + phase_ab/2) across the open trimmed
// annulus, sampled at midpoints. Each change is one exact dark fringe.
int sign_scan_zeros(double k1, double k2, int m1, int m2, double phase_ab,
                    double kmin, double kmax, int n) {
  int count = 0;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = kmin + (kmax - kmin) * (i + 0.5) / n;
    const double phi = m1 * opening1(k1, k2, k) + m2 * opening2(k1, k2, k) +
                       0.5 * phase_ab;
    const double c = std::cos(phi);
    if (i > 0 && prev * c < 0.0) ++count;
    prev = c;
  }
  return count;
}

std::vector<double> window_grid(const BesselMode& b1, const BesselMode& b2,
                                const AtomBeam& atom, int n) {
  const DetuningWindow w = detuning_window_rest(b1, b2, atom);
  return tst::linspace(w.delta_min, w.delta_max, n);
}

}  // namespace

TEST_CASE("zero momentum scan keeps the inverse squared area envelope") {
  const BesselMode b1 = tst::photon_up(0.08, 0);
  const BesselMode b2 = tst::photon_down(0.12, 0);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const auto grid = window_grid(b1, b2, atom, 101);
  const FringePattern pat = detuning_scan(b1, b2, atom, constant_model(), grid);

  const double lo2 = 0.04 * 0.04;
  const double hi2 = 0.20 * 0.20;
  const double kz = b1.kz + b2.kz;
  auto s16 = [&](double delta) {
    const double u = 2.0 * atom.mass_i * delta - kz * kz;
    return (hi2 - u) * (u - lo2);
  };

  const std::size_t ref = grid.size() / 2;
  int checked = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (pat.values[i] <= 0.0) continue;  // trimmed rim entries
    const double got = pat.values[i] / pat.values[ref];
    const double want = s16(grid[ref]) / s16(grid[i]);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked > 90);

  // The scan equals the full azimuthal integral of the density; for a
  // flat model that is 2 pi times the squared amplitude magnitude.
  const TransferVector K{std::sqrt(2.0 * atom.mass_i * grid[ref]), 0.3, 0.0};
  const double dens = std::norm(twisted_amplitude(b1, b2, K, constant_model()).value);
  CHECK(pat.values[ref] == doctest::Approx(2.0 * M_PI * dens).epsilon(1e-10));
}

TEST_CASE("scaled right triangle geometry pins a dark fringe") {
  // kappa ratio 3:4 with transfer 5 gives quarter turn openings whose
  // windings cancel for m1 = m2 = 1.
  const double s = 0.03;
  const BesselMode b1 = tst::photon_up(3.0 * s, 1);
  const BesselMode b2 = tst::photon_down(4.0 * s, 1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const double kstar = 5.0 * s;
  const double kz = b1.kz + b2.kz;
  const double dstar = (kstar * kstar + kz * kz) / (2.0 * atom.mass_i);

  const auto grid = window_grid(b1, b2, atom, 4097);
  const FringePattern pat = detuning_scan(b1, b2, atom, constant_model(), grid);
  const double peak = *std::max_element(pat.values.begin(), pat.values.end());

  PatternEvaluator ev(b1, b2, atom, constant_model(), ScanKind::detuning_rest);
  CHECK(ev(dstar) <= 1e-12 * peak);

  const FringeCensus census = fringe_census(pat, 1, 1);
  REQUIRE(census.zero_count >= 1);
  double closest = 1e300;
  for (std::size_t i = 0; i < census.minima_pos.size(); ++i)
    closest = std::min(closest, std::fabs(census.minima_pos[i] - dstar));
  CHECK(closest <= (grid[1] - grid[0]));
}

TEST_CASE("equal kappas with unit windings leave one dark fringe") {
  const BesselMode b1 = tst::photon_up(0.1, 1);
  const BesselMode b2 = tst::photon_down(0.1, 1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const auto grid = window_grid(b1, b2, atom, 4097);
  const FringePattern pat = detuning_scan(b1, b2, atom, constant_model(), grid);

  const FringeCensus census = fringe_census(pat, 1, 1);
  CHECK(census.zero_count == 1);
  CHECK(census.fringes.size() == 2);
  CHECK(visibility(pat, 1, 1) > 0.999);

  // The dark fringe sits where both openings are an eighth turn; the
  // counter propagating pair carries no longitudinal transfer.
  const double kdark = 2.0 * 0.1 * std::cos(0.25 * M_PI);
  const double ddark = kdark * kdark / (2.0 * atom.mass_i);
  REQUIRE(census.minima_pos.size() >= 1);
  double closest = 1e300;
  for (double p : census.minima_pos) closest = std::min(closest, std::fabs(p - ddark));
  CHECK(closest <= (grid[1] - grid[0]));
}

TEST_CASE("fringe census matches an independent sign scan") {
  std::mt19937_64 gen(914);
  std::uniform_real_distribution<double> kap(0.05, 0.2);
  std::uniform_int_distribution<int> mm(-10, 10);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);

  int tested = 0;
  while (tested < 10) {
    const double k1 = kap(gen);
    const double k2 = kap(gen);
    const int m1 = mm(gen);
    const int m2 = mm(gen);
    if (m1 == 0 && m2 == 0) continue;
    const double pab = ph(gen);

    const BesselMode b1 = tst::photon_up(k1, m1);
    const BesselMode b2 = tst::photon_down(k2, m2);
    const AtomBeam atom = tst::atom_at_rest(1.0e10);
    // Dark fringes may fall a few grid steps inside the boundary trim, so
    // the census grid is much finer than the reference sign scan.
    const auto grid = window_grid(b1, b2, atom, 2097153);
    const FringePattern pat = detuning_scan(b1, b2, atom, phase_model(pab), grid);
    const FringeCensus census = fringe_census(pat, m1, m2);

    const double trim = 1e-4 * (k1 + k2);
    const int want = sign_scan_zeros(k1, k2, m1, m2, pab,
                                     std::fabs(k1 - k2) + trim, k1 + k2 - trim,
                                     100000);
    INFO("k1=" << k1 << " k2=" << k2 << " m1=" << m1 << " m2=" << m2
               << " pab=" << pab);
    CHECK(census.zero_count == want);
    ++tested;
  }
}

TEST_CASE("angular pattern mirrors across the equator") {
  const BesselMode b1 = tst::photon_up(0.08, 2);
  // Opposite longitudinal momentum with its own dispersion keeps the
  // total transfer purely transverse.
  const BesselMode b2 = tst::mode(-b1.kz, 0.12, 1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const PWAmplitudeModel model = phase_model(0.7);

  // Shell radius at an antinode so the equator value stays well off zero.
  double rs = 0.0;
  {
    double best = -1.0;
    for (int i = 0; i < 2000; ++i) {
      const double k = 0.05 + (0.19 - 0.05) * i / 1999.0;
      const double c = std::cos(2.0 * opening1(0.08, 0.12, k) +
                                opening2(0.08, 0.12, k) + 0.35);
      if (k > 0.13 && k < 0.18 && c * c > best) {
        best = c * c;
        rs = k;
      }
    }
  }
  const double delta = rs * rs / (2.0 * atom.mass_i);
  const FringePattern pat =
      angular_distribution(b1, b2, atom, model, delta, 1440);
  REQUIRE(pat.grid.size() == 1440);
  const double peak = *std::max_element(pat.values.begin(), pat.values.end());
  REQUIRE(peak > 0.0);
  for (std::size_t i = 0; i < pat.grid.size(); ++i) {
    const std::size_t j = pat.grid.size() - 1 - i;
    CHECK(std::fabs(pat.values[i] - pat.values[j]) <= 1e-12 * peak);
  }

  // Each radial dark fringe inside the shell shows up once per hemisphere.
  const double trim = 1e-4 * 0.2;
  const int radial = sign_scan_zeros(0.08, 0.12, 2, 1, 0.7, 0.04 + trim,
                                     rs, 100000);
  const FringeCensus census = fringe_census(pat, 2, 1);
  CHECK(census.zero_count == 2 * radial);
}

TEST_CASE("azimuthal distribution is flat for phase only models") {
  const BesselMode b1 = tst::photon_up(0.08, 3);
  const BesselMode b2 = tst::photon_down(0.12, -2);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);

  for (const PWAmplitudeModel& model : {constant_model(), phase_model(1.1)}) {
    const FringePattern pat =
        azimuthal_distribution(b1, b2, atom, model, 0.11, 360);
    const double mx = *std::max_element(pat.values.begin(), pat.values.end());
    const double mn = *std::min_element(pat.values.begin(), pat.values.end());
    REQUIRE(mx > 0.0);
    CHECK((mx - mn) <= 1e-12 * mx);
  }
}

TEST_CASE("azimuthal table model integrates to the scan value") {
  const BesselMode b1 = tst::photon_up(0.08, 1);
  const BesselMode b2 = tst::photon_down(0.12, -1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  PWAmplitudeModel model;
  model.kind = PWAmplitudeModel::Kind::user_table;
  model.table_n1 = 2;
  model.table_n2 = 2;
  model.table = {{1.0, 0.0}, {0.4, 0.2}, {0.1, -0.3}, {0.8, 0.1}};

  const double k = 0.11;
  const int n = 720;
  const FringePattern pat = azimuthal_distribution(b1, b2, atom, model, k, n);
  const double mx = *std::max_element(pat.values.begin(), pat.values.end());
  const double mn = *std::min_element(pat.values.begin(), pat.values.end());
  REQUIRE(mx > 0.0);
  CHECK((mx - mn) > 1e-3 * mx);

  // Periodic trapezoid of the sampled curve against the adaptive arc value.
  // The interpolation kinks of the table model limit the adaptive rule to
  // a few parts in 1e6, so the match is loose compared to smooth models.
  double sum = 0.0;
  for (double v : pat.values) sum += v;
  const double trapz = sum * 2.0 * M_PI / n;
  PatternEvaluator ev(b1, b2, atom, model, ScanKind::detuning_rest);
  CHECK(trapz == doctest::Approx(ev.azimuth_integral(k)).epsilon(1e-5));
}

TEST_CASE("swapping the photons leaves the pattern unchanged") {
  const BesselMode b1 = tst::photon_up(0.07, 4);
  const BesselMode b2 = tst::photon_down(0.13, -3);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const PWAmplitudeModel model = constant_model();
  const auto grid = window_grid(b1, b2, atom, 257);

  const FringePattern a = detuning_scan(b1, b2, atom, model, grid);
  const FringePattern b = detuning_scan(b2, b1, atom, model, grid);
  const double peak = *std::max_element(a.values.begin(), a.values.end());
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::fabs(a.values[i] - b.values[i]) <= 1e-12 * peak);
}

TEST_CASE("offset evaluation with zero shift matches the plain scan") {
  const BesselMode b1 = tst::photon_up(0.08, 2);
  const BesselMode b2 = tst::photon_down(0.12, -1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  PatternEvaluator ev(b1, b2, atom, phase_model(0.4), ScanKind::detuning_rest);
  const auto grid = window_grid(b1, b2, atom, 33);
  for (double d : grid) {
    const double a = ev(d);
    const double b = ev.at_offset(d, Vec3{0.0, 0.0, 0.0});
    CHECK(a == b);
  }
}

TEST_CASE("crossed beam support vanishes outside the Doppler window") {
  const BesselMode b1 = tst::photon_up(0.06, 1);
  const BesselMode b2 = tst::photon_down(0.14, 1);
  AtomBeam atom = tst::atom_at_rest(1.0e10);
  atom.p = Vec3{0.5 * atom.mass_i, 0.0, 0.0};

  const DetuningWindow w = detuning_window_crossed(b1, b2, atom);
  const double margin = 0.2 * (w.delta_max - w.delta_min);
  const FringePattern out = crossed_beam_scan(
      b1, b2, atom, constant_model(),
      {w.delta_min - margin, w.delta_max + margin});
  CHECK(out.values[0] == 0.0);
  CHECK(out.values[1] == 0.0);
  const FringePattern in = crossed_beam_scan(
      b1, b2, atom, constant_model(), {0.5 * (w.delta_min + w.delta_max)});
  CHECK(in.values[0] > 0.0);
}

TEST_CASE("sampled kicks are deterministic and thread invariant") {
  const BesselMode b1 = tst::photon_up(0.08, 2);
  const BesselMode b2 = tst::photon_down(0.12, 1);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const PWAmplitudeModel model = phase_model(0.9);

  SampleOptions o1;
  o1.seed = 7;
  o1.threads = 1;
  SampleOptions o4 = o1;
  o4.threads = 4;
  const auto ev1 = sample_kicks(b1, b2, atom, model, 20000, o1);
  const auto ev4 = sample_kicks(b1, b2, atom, model, 20000, o4);
  const auto ev1b = sample_kicks(b1, b2, atom, model, 20000, o1);
  REQUIRE(ev1.size() == 20000);
  bool same14 = true;
  bool same1b = true;
  for (std::size_t i = 0; i < ev1.size(); ++i) {
    same14 = same14 && ev1[i].K.k_perp == ev4[i].K.k_perp &&
             ev1[i].K.phi_k == ev4[i].K.phi_k && ev1[i].delta == ev4[i].delta;
    same1b = same1b && ev1[i].K.k_perp == ev1b[i].K.k_perp &&
             ev1[i].K.phi_k == ev1b[i].K.phi_k;
  }
  CHECK(same14);
  CHECK(same1b);

  SampleOptions other = o1;
  other.seed = 8;
  const auto ev8 = sample_kicks(b1, b2, atom, model, 20000, other);
  bool differs = false;
  for (std::size_t i = 0; i < ev1.size() && !differs; ++i)
    differs = ev1[i].K.k_perp != ev8[i].K.k_perp;
  CHECK(differs);

  // Every event lies in the trimmed annulus and its detuning is the
  // recoil of its own kick.
  const double trim = 1e-4 * 0.2;
  const double kz = b1.kz + b2.kz;
  for (std::size_t i = 0; i < 500; ++i) {
    const KickEvent& ev = ev1[i];
    CHECK(ev.K.k_perp >= 0.04 + trim);
    CHECK(ev.K.k_perp <= 0.20 - trim);
    const double want =
        (ev.K.k_perp * ev.K.k_perp + kz * kz) / (2.0 * atom.mass_i);
    CHECK(ev.delta == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("kick magnitudes follow the annulus density shape") {
  const BesselMode b1 = tst::photon_up(0.08, 0);
  const BesselMode b2 = tst::photon_down(0.12, 0);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  SampleOptions opts;
  opts.seed = 31;
  opts.threads = 4;
  SampleStats stats;
  const std::size_t n = 100000;
  const auto events = sample_kicks(b1, b2, atom, constant_model(), n, opts, &stats);
  CHECK(stats.accepted == n);
  CHECK(stats.acceptance_rate > 0.1);

  const double trim = 1e-4 * 0.2;
  const double kmin = 0.04 + trim;
  const double kmax = 0.20 - trim;
  const int nbins = 50;
  std::vector<double> counts(nbins, 0.0);
  for (const KickEvent& ev : events) {
    int b = static_cast<int>((ev.K.k_perp - kmin) / (kmax - kmin) * nbins);
    b = std::clamp(b, 0, nbins - 1);
    counts[b] += 1.0;
  }

  // Radial density for a flat model: k / s16(k^2), integrated per bin.
  auto dens = [&](double k) {
    const double u = k * k;
    return k / ((0.04 - u) * (u - 0.0016));
  };
  std::vector<double> mass(nbins, 0.0);
  double total = 0.0;
  for (int b = 0; b < nbins; ++b) {
    const double a = kmin + (kmax - kmin) * b / nbins;
    const double bb = kmin + (kmax - kmin) * (b + 1) / nbins;
    const int steps = 400;
    double acc = 0.5 * (dens(a) + dens(bb));
    for (int i = 1; i < steps; ++i) acc += dens(a + (bb - a) * i / steps);
    mass[b] = acc * (bb - a) / steps;
    total += mass[b];
  }
  double chi2 = 0.0;
  for (int b = 0; b < nbins; ++b) {
    const double expected = static_cast<double>(n) * mass[b] / total;
    REQUIRE(expected > 20.0);
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  INFO("chi2 = " << chi2);
  CHECK(chi2 < tst::chi2_q99(nbins - 1));
}

TEST_CASE("dark fringes stay depopulated in the event stream") {
  const BesselMode b1 = tst::photon_up(0.08, 5);
  const BesselMode b2 = tst::photon_down(0.12, 5);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const PWAmplitudeModel model = constant_model();

  // Locate dark and bright radii from the phase alone. Near the annulus
  // rims the openings vary as a square root and the fringes cluster, so
  // keep only fringes whose neighbours are far compared with the counting
  // window. Bright radii are midpoints of surviving adjacent dark pairs.
  std::vector<double> raw;
  {
    const int n = 200000;
    double prevc = 0.0;
    double prevk = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = 0.0401 + (0.1999 - 0.0401) * (i + 0.5) / n;
      const double c = std::cos(5.0 * opening1(0.08, 0.12, k) +
                                5.0 * opening2(0.08, 0.12, k));
      if (i > 0 && prevc * c < 0.0) raw.push_back(0.5 * (prevk + k));
      prevk = k;
      prevc = c;
    }
  }
  const double w = 2e-4;
  const double isolation = 40.0 * w;
  std::vector<double> zeros;
  std::vector<double> maxima;
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    if (raw[i + 1] - raw[i] > isolation)
      maxima.push_back(0.5 * (raw[i] + raw[i + 1]));
    if (i > 0 && raw[i] - raw[i - 1] > isolation &&
        raw[i + 1] - raw[i] > isolation)
      zeros.push_back(raw[i]);
  }
  REQUIRE(zeros.size() >= 3);
  REQUIRE(maxima.size() >= 3);

  SampleOptions opts;
  opts.seed = 5;
  opts.threads = 4;
  const auto events = sample_kicks(b1, b2, atom, model, 200000, opts);

  double near_zero = 0.0;
  double near_max = 0.0;
  for (const KickEvent& ev : events) {
    for (double z : zeros)
      if (std::fabs(ev.K.k_perp - z) < w) near_zero += 1.0;
    for (double m : maxima)
      if (std::fabs(ev.K.k_perp - m) < w) near_max += 1.0;
  }
  INFO("near_zero=" << near_zero << " near_max=" << near_max);
  CHECK(near_max >= 100.0 * std::max(near_zero, 1.0));
}

TEST_CASE("coarse grids are rejected by the census") {
  const BesselMode b1 = tst::photon_up(0.1, 5);
  const BesselMode b2 = tst::photon_down(0.1, 5);
  const AtomBeam atom = tst::atom_at_rest(1.0e10);
  const auto grid = window_grid(b1, b2, atom, 100);
  const FringePattern pat = detuning_scan(b1, b2, atom, constant_model(), grid);
  CHECK_THROWS_AS(fringe_census(pat, 5, 5), Undersampled);
  CHECK_THROWS_AS(visibility(pat, 5, 5), Undersampled);
}
