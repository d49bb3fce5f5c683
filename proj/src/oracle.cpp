#include "twistkin/oracle.hpp"

#include <Eigen/Dense>
#include <sstream>

#include "twistkin/quadrature.hpp"

namespace twistkin {

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw SchemaError("gauss_hermite needs at least one node");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = std::sqrt(0.5 * i);
    j(i, i - 1) = b;
    j(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  const double total = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    gh.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    gh.weights[i] = total * v0 * v0;
  }
  return gh;
}

namespace {

complexd unit_phase_pow(int m) {
  // (-i)^m for any integer m.
  switch (((m % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, -1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, 1.0};
  }
}

double gaussian(double x, double sigma) {
  const double t = x / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * M_PI));
}

struct RingIntegrand {
  const BesselMode* b1;
  const BesselMode* b2;
  const PWAmplitudeModel* model;
  double kx, ky, phi_k;
  double sigma;
  const GaussHermite* gh;

  // Radial integral at a fixed azimuth, with the first ring Gaussian
  // absorbed into the Gauss-Hermite weight. Also reports the absolute mass
  // actually summed, for the convergence floor.
  complexd at_azimuth(double phi1, double& abs_mass) const {
    const double c1 = std::cos(phi1);
    const double s1 = std::sin(phi1);
    const bool config_a = std::sin(phi1 - phi_k) > 0.0;
    const complexd e1 = std::polar(1.0, b1->m * phi1);
    complexd acc{0.0, 0.0};
    double mass = 0.0;
    const double root2sigma = std::sqrt(2.0) * sigma;
    for (size_t i = 0; i < gh->nodes.size(); ++i) {
      const double r = b1->kappa + root2sigma * gh->nodes[i];
      if (r <= 0.0) continue;
      const double vx = kx - r * c1;
      const double vy = ky - r * s1;
      const double rho = std::hypot(vx, vy);
      const double g2 = gaussian(rho - b2->kappa, sigma);
      if (g2 == 0.0) continue;
      const double phi2 = std::atan2(vy, vx);
      const complexd m = pw_amplitude(*model, phi1, phi2, config_a);
      const complexd term = gh->weights[i] * r * g2 *
                            std::polar(1.0, -b2->m * phi2) * m;
      acc += term;
      mass += std::abs(term);
    }
    // Jacobian of r = kappa1 + sqrt(2) sigma u against the unit-mass
    // Gaussian: dr g(r-kappa1) = du exp(-u^2)/sqrt(pi).
    const double norm = 1.0 / std::sqrt(M_PI);
    abs_mass = mass * norm;
    return e1 * acc * norm;
  }
};

}  // namespace

complexd bessel_fourier_weight(double k_mag, double phi, double kappa, int m,
                               double sigma) {
  if (!(kappa > 0.0) || !(sigma > 0.0))
    throw PhysicsError("bessel_fourier_weight needs positive kappa and sigma");
  return unit_phase_pow(m) * std::polar(1.0, m * phi) *
         std::sqrt(2.0 * M_PI / kappa) * gaussian(k_mag - kappa, sigma);
}

complexd ring_quadrature_amplitude(const BesselMode& b1, const BesselMode& b2,
                                   const TransferVector& K,
                                   const PWAmplitudeModel& model,
                                   const RingRegularization& reg) {
  if (!(reg.sigma > 0.0))
    throw PhysicsError("ring regularization needs sigma > 0");
  const double kappa_min = std::min(b1.kappa, b2.kappa);
  if (reg.sigma > 0.1 * kappa_min)
    throw PhysicsError("ring width too large against the cone radii");

  const GaussHermite gh = gauss_hermite(reg.n_radial);
  RingIntegrand f;
  f.b1 = &b1;
  f.b2 = &b2;
  f.model = &model;
  f.kx = K.k_perp * std::cos(K.phi_k);
  f.ky = K.k_perp * std::sin(K.phi_k);
  f.phi_k = K.phi_k;
  f.sigma = reg.sigma;
  f.gh = &gh;

  // Periodic trapezoid over phi1, doubling the grid until the value moves
  // by less than rel_tol against the summed absolute mass.
  complexd prev{0.0, 0.0};
  double prev_mass = 0.0;
  bool have_prev = false;
  for (int n = reg.n_azimuthal; n <= reg.max_azimuthal; n *= 2) {
    complexd acc{0.0, 0.0};
    double mass = 0.0;
    const double h = 2.0 * M_PI / n;
    for (int i = 0; i < n; ++i) {
      double am = 0.0;
      acc += f.at_azimuth(i * h, am);
      mass += am;
    }
    acc *= h;
    mass *= h;
    if (have_prev) {
      const double err = std::abs(acc - prev);
      const double floor = 1e-12 * (mass + prev_mass);
      if (err <= reg.rel_tol * std::abs(acc) + floor) return acc;
    }
    prev = acc;
    prev_mass = mass;
    have_prev = true;
  }
  std::ostringstream os;
  os << "ring quadrature not converged at " << reg.max_azimuthal
     << " azimuthal nodes (sigma = " << reg.sigma << ")";
  throw NonConvergent(os.str());
}

ConfigAzimuths root_find_configs(double kappa1, double kappa2, double k_perp,
                                 double phi_k, double tol) {
  const auto mismatch = [&](double phi1) {
    const double vx = k_perp * std::cos(phi_k) - kappa1 * std::cos(phi1);
    const double vy = k_perp * std::sin(phi_k) - kappa1 * std::sin(phi1);
    return std::hypot(vx, vy) - kappa2;
  };
  const auto solve = [&](double lo, double hi) {
    double flo = mismatch(lo);
    const double fhi = mismatch(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
      throw RootFailure("azimuth bracket does not straddle the ring");
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = mismatch(mid);
      if (fm == 0.0) return mid;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  const double phi1_a = solve(phi_k, phi_k + M_PI);
  const double phi1_b = solve(phi_k - M_PI, phi_k);
  const auto phi2_of = [&](double phi1) {
    const double vx = k_perp * std::cos(phi_k) - kappa1 * std::cos(phi1);
    const double vy = k_perp * std::sin(phi_k) - kappa1 * std::sin(phi1);
    return std::atan2(vy, vx);
  };

  ConfigAzimuths out;
  out.phi1_a = wrap_two_pi(phi1_a);
  out.phi2_a = wrap_two_pi(phi2_of(phi1_a));
  out.phi1_b = wrap_two_pi(phi1_b);
  out.phi2_b = wrap_two_pi(phi2_of(phi1_b));
  return out;
}

}  // namespace twistkin
