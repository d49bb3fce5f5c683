#include "twistkin/amplitude.hpp"

#include <algorithm>
#include <sstream>

namespace twistkin {

namespace {

complexd table_lookup(const PWAmplitudeModel& model, double phi1, double phi2) {
  const int n1 = model.table_n1;
  const int n2 = model.table_n2;
  const double u = wrap_two_pi(phi1) * n1 / (2.0 * M_PI);
  const double v = wrap_two_pi(phi2) * n2 / (2.0 * M_PI);
  int i0 = std::min(static_cast<int>(u), n1 - 1);
  int j0 = std::min(static_cast<int>(v), n2 - 1);
  const double fu = u - i0;
  const double fv = v - j0;
  const int i1 = (i0 + 1) % n1;
  const int j1 = (j0 + 1) % n2;
  const auto& t = model.table;
  return (1.0 - fu) * (1.0 - fv) * t[i0 * n2 + j0] +
         fu * (1.0 - fv) * t[i1 * n2 + j0] +
         (1.0 - fu) * fv * t[i0 * n2 + j1] + fu * fv * t[i1 * n2 + j1];
}

double energy_gate_scale(const BesselMode& b1, const BesselMode& b2,
                         const AtomBeam& atom) {
  const double hi = b1.kappa + b2.kappa;
  const double kz = b1.kz + b2.kz;
  const double kmax = std::sqrt(hi * hi + kz * kz);
  const double p = norm(atom.p);
  return (kmax * kmax + 2.0 * p * kmax) / (2.0 * atom.mass_i);
}

}  // namespace

void validate_model(const PWAmplitudeModel& model) {
  auto finite = [](const complexd& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  };
  if (!finite(model.m0)) throw SchemaError("model m0 must be finite");
  if (!std::isfinite(model.phase_ab))
    throw SchemaError("model phase_ab must be finite");
  if (model.kind == PWAmplitudeModel::Kind::user_table) {
    if (model.table_n1 < 2 || model.table_n2 < 2)
      throw SchemaError("amplitude table needs at least 2 nodes per axis");
    if (model.table.size() !=
        static_cast<size_t>(model.table_n1) * model.table_n2)
      throw SchemaError("amplitude table size does not match its grid");
    for (const auto& z : model.table)
      if (!finite(z)) throw SchemaError("amplitude table entry not finite");
  }
}

bool phi_independent(const PWAmplitudeModel& model) {
  return model.kind != PWAmplitudeModel::Kind::user_table;
}

complexd pw_amplitude(const PWAmplitudeModel& model, double phi1, double phi2,
                      bool config_a) {
  switch (model.kind) {
    case PWAmplitudeModel::Kind::constant:
      return model.m0;
    case PWAmplitudeModel::Kind::relative_phase:
      return model.m0 *
             std::polar(1.0, config_a ? 0.5 * model.phase_ab : -0.5 * model.phase_ab);
    case PWAmplitudeModel::Kind::user_table:
      return table_lookup(model, phi1, phi2);
  }
  throw SchemaError("unknown amplitude model kind");
}

ConfigAmplitudes config_amplitudes(const PWAmplitudeModel& model,
                                   const TriangleGeometry& g, double phi_k) {
  const ConfigAzimuths az = config_azimuths(g, phi_k);
  return {pw_amplitude(model, az.phi1_a, az.phi2_a, true),
          pw_amplitude(model, az.phi1_b, az.phi2_b, false)};
}

double fringe_function(int m1, int m2, const TriangleGeometry& g) {
  return m1 * g.delta1 + m2 * g.delta2;
}

TwistedAmplitude twisted_amplitude(const BesselMode& b1, const BesselMode& b2,
                                   const TransferVector& K,
                                   const PWAmplitudeModel& model,
                                   double eps_boundary) {
  const TriangleGeometry g =
      triangle_geometry(b1.kappa, b2.kappa, K.k_perp, eps_boundary);
  if (!(g.area > 0.0)) {
    std::ostringstream os;
    os << "triangle area vanishes at k_perp = " << K.k_perp;
    throw DegenerateBoundary(os.str());
  }
  const ConfigAmplitudes m = config_amplitudes(model, g, K.phi_k);
  const double phi = fringe_function(b1.m, b2.m, g);
  const double envelope = b1.kappa * b2.kappa / (2.0 * g.area);
  const complexd ea = std::polar(1.0, phi);
  const complexd bracket = m.m_a * ea + m.m_b * std::conj(ea);

  TwistedAmplitude out;
  out.value = std::polar(envelope, (b1.m - b2.m) * K.phi_k) * bracket;
  out.phase_a = wrap_pi((b1.m - b2.m) * K.phi_k + phi + std::arg(m.m_a));
  out.phase_b = wrap_pi((b1.m - b2.m) * K.phi_k - phi + std::arg(m.m_b));
  out.boundary_flag = g.degenerate;
  return out;
}

double xsec_density(const BesselMode& b1, const BesselMode& b2,
                    const AtomBeam& atom, const PWAmplitudeModel& model,
                    const TransferVector& K, double delta,
                    const DensityOptions& opts) {
  const double eps = opts.eps_boundary < 0.0
                         ? default_eps_boundary(b1.kappa, b2.kappa)
                         : opts.eps_boundary;
  const double kz_sum = b1.kz + b2.kz;
  if (std::fabs(K.kz - kz_sum) >
      1e-9 * (std::fabs(b1.kz) + std::fabs(b2.kz) + b1.kappa + b2.kappa)) {
    throw PhysicsError("transfer kz inconsistent with the mode pair");
  }
  const double lo = std::fabs(b1.kappa - b2.kappa);
  const double hi = b1.kappa + b2.kappa;
  if (!(K.k_perp > lo + eps) || !(K.k_perp < hi - eps)) return 0.0;

  const double need = detuning_from_transfer(b1, b2, atom, K);
  const double gate = opts.energy_rel_tol * energy_gate_scale(b1, b2, atom);
  if (std::fabs(need - delta) > gate) return 0.0;

  return std::norm(twisted_amplitude(b1, b2, K, model, eps).value);
}

}  // namespace twistkin
