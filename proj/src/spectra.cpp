#include "twistkin/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twistkin/parallel.hpp"
#include "twistkin/rng.hpp"

namespace twistkin {

namespace {

double resolve_trim(double trim, const BesselMode& b1, const BesselMode& b2) {
  return trim < 0.0 ? 1e-4 * (b1.kappa + b2.kappa) : trim;
}

}  // namespace

PatternEvaluator::PatternEvaluator(const BesselMode& b1, const BesselMode& b2,
                                   const AtomBeam& atom,
                                   const PWAmplitudeModel& model,
                                   ScanKind kind, const ScanOptions& opts)
    : b1_(b1),
      b2_(b2),
      atom_(atom),
      model_(model),
      kind_(kind),
      opts_(opts) {
  validate_mode(b1_);
  validate_mode(b2_);
  validate_atom(atom_);
  validate_model(model_);
  trim_ = resolve_trim(opts_.trim, b1_, b2_);
  const double lo = std::fabs(b1_.kappa - b2_.kappa);
  const double hi = b1_.kappa + b2_.kappa;
  kmin_ = lo + trim_;
  kmax_ = hi - trim_;
  if (!(kmin_ < kmax_))
    throw PhysicsError("boundary trim removes the whole annulus");
  excluded_ = ((kmin_ * kmin_ - lo * lo) + (hi * hi - kmax_ * kmax_)) /
              (hi * hi - lo * lo);
  kz_sum_ = b1_.kz + b2_.kz;
  indep_ = phi_independent(model_);
  if (indep_) dp_ = kern::density_params(b1_, b2_, model_, trim_);
}

double PatternEvaluator::operator()(double delta) const {
  const double v = circle_value(delta, atom_.p);
  return kind_ == ScanKind::detuning_rest ? 2.0 * v : v;
}

double PatternEvaluator::at_offset(double delta, const Vec3& dp) const {
  const double v = circle_value(delta, atom_.p + dp);
  return kind_ == ScanKind::detuning_rest ? 2.0 * v : v;
}

FringePattern PatternEvaluator::evaluate(const std::vector<double>& grid) const {
  FringePattern out;
  out.axis = PatternAxis::detuning;
  out.grid = grid;
  out.values.resize(grid.size());
  out.boundary_cutoff = trim_;
  out.excluded_fraction = excluded_;
  parallel_for(grid.size(), opts_.threads,
               [&](std::size_t i) { out.values[i] = (*this)(grid[i]); });
  return out;
}

double PatternEvaluator::azimuth_integral(double k_perp) const {
  if (!(k_perp > kmin_) || !(k_perp < kmax_)) return 0.0;
  if (indep_) {
    double d = 0.0;
    kern::density_batch(dp_, &k_perp, &d, 1);
    return 2.0 * M_PI * d;
  }
  return arc_integral(k_perp, 0.0, 0.0, k_perp, 0.0, 2.0 * M_PI, false);
}

double PatternEvaluator::circle_value(double delta, const Vec3& p) const {
  const double pp = std::hypot(p.x, p.y);
  double rho2 = 0.0;
  double excess = 0.0;  // rho2 - pp^2, kept apart so r - pp stays exact
  double wfac = 0.5;
  if (!atom_.relativistic) {
    excess = 2.0 * atom_.mass_i * delta - kz_sum_ * kz_sum_ -
             2.0 * p.z * kz_sum_;
    rho2 = excess + pp * pp;
  } else {
    const double p2 = dot(p, p);
    const double ei = std::sqrt(atom_.mass_i * atom_.mass_i + p2);
    const double mf = atom_.mass_i + atom_.E_exc;
    const double ef = ei + atom_.E_exc + delta;
    if (ef <= mf) return 0.0;
    const long double efm = static_cast<long double>(p2) / (ei + atom_.mass_i) +
                            static_cast<long double>(delta);
    const long double a = efm * (static_cast<long double>(ef) + mf);
    const long double bz = static_cast<long double>(p.z) + kz_sum_;
    rho2 = static_cast<double>(a - bz * bz);
    excess = static_cast<double>(a - bz * bz -
                                 static_cast<long double>(pp) * pp);
    wfac = ef / (2.0 * atom_.mass_i);
  }
  if (!(rho2 > 0.0)) return 0.0;
  const double r = std::sqrt(rho2);

  if (pp == 0.0) {
    if (!(r > kmin_) || !(r < kmax_)) return 0.0;
    if (indep_) {
      double d = 0.0;
      kern::density_batch(dp_, &r, &d, 1);
      return wfac * 2.0 * M_PI * d;
    }
    return wfac * arc_integral(r, 0.0, 0.0, r, 0.0, 2.0 * M_PI, false);
  }

  // |K(u)|^2 = (r - pp)^2 + 4 r pp sin^2(u/2) on the circle centered at
  // -p_perp; admissible u keeps |K| inside the trimmed annulus. r - pp must
  // survive even when r and pp dwarf the annulus, so it comes from
  // (rho2 - pp^2) / (r + pp) rather than a direct subtraction.
  const double base = std::fabs(excess / (r + pp));
  const double reach = r + pp;
  const double klo = std::max(kmin_, base);
  const double khi = std::min(kmax_, reach);
  if (!(klo < khi)) return 0.0;
  const double denom = 4.0 * r * pp;
  const double s_lo =
      klo == base
          ? 0.0
          : std::clamp((klo * klo - base * base) / denom, 0.0, 1.0);
  const double s_hi =
      khi == reach
          ? 1.0
          : std::clamp((khi * khi - base * base) / denom, 0.0, 1.0);
  const double u_lo = 2.0 * std::asin(std::sqrt(s_lo));
  const double u_hi = 2.0 * std::asin(std::sqrt(s_hi));
  if (!(u_hi > u_lo)) return 0.0;
  return wfac * arc_integral(r, p.x, p.y, base, u_lo, u_hi, true);
}

double PatternEvaluator::arc_integral(double r, double px, double py,
                                      double base, double u_lo, double u_hi,
                                      bool both_signs) const {
  const double pp = std::hypot(px, py);
  const double phi_p = pp > 0.0 ? std::atan2(py, px) : 0.0;
  const double mid = 0.5 * (u_lo + u_hi);
  const double half = 0.5 * (u_hi - u_lo);
  // |K(u)|^2 = base^2 + 4 r pp sin^2(u/2) with base = |r - pp| supplied by
  // the caller in a form that stays exact when r and pp are large.
  const double cross = 2.0 * std::sqrt(r * pp);
  const bool fold = both_signs && indep_;

  // The |K| sweep is monotone on each half circle, so the trimmed-rim layers
  // of the inverse squared-area factor sit at the arc ends. tanh-sinh nodes
  // cluster there and keep the refinement cost flat in the trim width.
  const double s_max = 4.0;
  std::vector<double> us, ws, ks, ds;

  double prev = 0.0;
  bool have_prev = false;
  for (int n = opts_.min_panels; n <= opts_.max_panels; n *= 2) {
    const int m = n / 2;
    const double h = s_max / m;
    us.clear();
    ws.clear();
    for (int j = -m; j <= m; ++j) {
      const double s = j * h;
      const double q = 0.5 * M_PI * std::sinh(s);
      const double c = std::cosh(q);
      const double w = half * h * 0.5 * M_PI * std::cosh(s) / (c * c);
      if (!(w > 0.0) || !std::isfinite(w)) continue;
      us.push_back(mid + half * std::tanh(q));
      ws.push_back(w);
    }
    const std::size_t nn = us.size();
    double sum = 0.0;
    if (indep_) {
      ks.resize(nn);
      ds.resize(nn);
      for (std::size_t j = 0; j < nn; ++j)
        ks[j] = std::hypot(base, cross * std::sin(0.5 * us[j]));
      kern::density_batch(dp_, ks.data(), ds.data(), nn);
      for (std::size_t j = 0; j < nn; ++j) {
        if (ks[j] > kmin_ && ks[j] < kmax_) sum += ws[j] * ds[j];
      }
      if (fold) sum *= 2.0;
    } else {
      for (std::size_t j = 0; j < nn; ++j) {
        double f = density_at_angle(r, pp, phi_p, us[j]);
        if (both_signs) f += density_at_angle(r, pp, phi_p, -us[j]);
        sum += ws[j] * f;
      }
    }
    if (have_prev &&
        std::fabs(sum - prev) <= opts_.rel_tol * std::fabs(sum)) {
      return sum;
    }
    prev = sum;
    have_prev = true;
  }
  std::ostringstream os;
  os << "arc integral not converged at " << opts_.max_panels << " panels";
  throw NonConvergent(os.str());
}

double PatternEvaluator::density_at_angle(double r, double pp, double phi_p,
                                          double u) const {
  // Transfer vector at arc parameter u: -p_perp + r n(phi_p + u).
  const double alpha = phi_p + u;
  const double kx = r * std::cos(alpha) - pp * std::cos(phi_p);
  const double ky = r * std::sin(alpha) - pp * std::sin(phi_p);
  const double k = std::hypot(kx, ky);
  if (!(k > kmin_) || !(k < kmax_)) return 0.0;
  TransferVector K{k, wrap_two_pi(std::atan2(ky, kx)), kz_sum_};
  return std::norm(twisted_amplitude(b1_, b2_, K, model_).value);
}

FringePattern detuning_scan(const BesselMode& b1, const BesselMode& b2,
                            const AtomBeam& atom, const PWAmplitudeModel& model,
                            const std::vector<double>& deltas,
                            const ScanOptions& opts) {
  PatternEvaluator ev(b1, b2, atom, model, ScanKind::detuning_rest, opts);
  return ev.evaluate(deltas);
}

FringePattern crossed_beam_scan(const BesselMode& b1, const BesselMode& b2,
                                const AtomBeam& atom,
                                const PWAmplitudeModel& model,
                                const std::vector<double>& deltas,
                                const ScanOptions& opts) {
  PatternEvaluator ev(b1, b2, atom, model, ScanKind::crossed_beam, opts);
  return ev.evaluate(deltas);
}

FringePattern angular_distribution(const BesselMode& b1, const BesselMode& b2,
                                   const AtomBeam& atom,
                                   const PWAmplitudeModel& model, double delta,
                                   int n_theta, const ScanOptions& opts) {
  if (n_theta < 2) throw SchemaError("angular grid needs at least 2 points");
  PatternEvaluator ev(b1, b2, atom, model, ScanKind::detuning_rest, opts);
  const double rs2 = 2.0 * atom.mass_i * delta;
  if (!(rs2 > 0.0) || !(std::sqrt(rs2) > ev.kmin())) {
    std::ostringstream os;
    os << "energy shell radius " << (rs2 > 0.0 ? std::sqrt(rs2) : 0.0)
       << " does not reach the annulus at delta = " << delta;
    throw NoSolution(os.str());
  }
  const double rs = std::sqrt(rs2);
  const double kz_sum = b1.kz + b2.kz;
  double th_lo = 0.0;
  double th_hi = M_PI;
  if (kz_sum > 0.0) th_hi = 0.5 * M_PI;
  if (kz_sum < 0.0) th_lo = 0.5 * M_PI;

  FringePattern out;
  out.axis = PatternAxis::theta;
  out.boundary_cutoff = ev.trim();
  out.excluded_fraction = ev.excluded_fraction();
  out.grid.resize(n_theta);
  out.values.resize(n_theta);
  const double h = (th_hi - th_lo) / (n_theta - 1);
  for (int i = 0; i < n_theta; ++i) out.grid[i] = th_lo + i * h;
  parallel_for(static_cast<std::size_t>(n_theta), opts.threads,
               [&](std::size_t i) {
                 const double th = out.grid[i];
                 const double k = rs * std::sin(th);
                 const double jac = rs * std::fabs(std::cos(th));
                 out.values[i] = jac * ev.azimuth_integral(k);
               });
  return out;
}

FringePattern azimuthal_distribution(const BesselMode& b1,
                                     const BesselMode& b2,
                                     const AtomBeam& atom,
                                     const PWAmplitudeModel& model,
                                     double k_perp, int n_phi,
                                     const ScanOptions& opts) {
  if (n_phi < 4) throw SchemaError("azimuthal grid needs at least 4 points");
  PatternEvaluator ev(b1, b2, atom, model, ScanKind::detuning_rest, opts);
  FringePattern out;
  out.axis = PatternAxis::phi_k;
  out.boundary_cutoff = ev.trim();
  out.excluded_fraction = ev.excluded_fraction();
  out.grid.resize(n_phi);
  out.values.assign(n_phi, 0.0);
  for (int i = 0; i < n_phi; ++i) out.grid[i] = 2.0 * M_PI * i / n_phi;
  if (!(k_perp > ev.kmin()) || !(k_perp < ev.kmax())) return out;
  const double kz_sum = b1.kz + b2.kz;
  parallel_for(static_cast<std::size_t>(n_phi), opts.threads,
               [&](std::size_t i) {
                 TransferVector K{k_perp, out.grid[i], kz_sum};
                 out.values[i] =
                     std::norm(twisted_amplitude(b1, b2, K, model).value);
               });
  return out;
}

std::vector<KickEvent> sample_kicks(const BesselMode& b1, const BesselMode& b2,
                                    const AtomBeam& atom,
                                    const PWAmplitudeModel& model,
                                    std::size_t n_events,
                                    const SampleOptions& opts,
                                    SampleStats* stats) {
  validate_mode(b1);
  validate_mode(b2);
  validate_atom(atom);
  validate_model(model);
  const double trim = resolve_trim(opts.trim, b1, b2);
  const double lo = std::fabs(b1.kappa - b2.kappa);
  const double hi = b1.kappa + b2.kappa;
  const double kmin = lo + trim;
  const double kmax = hi - trim;
  if (!(kmin < kmax))
    throw PhysicsError("boundary trim removes the whole annulus");
  const double kz_sum = b1.kz + b2.kz;
  const bool indep = phi_independent(model);

  // |J|^2 factorizes into cenv * bracket(K) / s16(K^2) with the bracket
  // bounded and s16 the squared-area polynomial. Drawing K^2 from the
  // 1/s16 envelope (closed-form inverse CDF) absorbs the rim divergences,
  // so the accept test sees only the bounded bracket and the bound is
  // exact for every model kind.
  kern::DensityParams dp{};
  double bracket_max = 0.0;
  if (indep) {
    dp = kern::density_params(b1, b2, model, trim);
    bracket_max = dp.a_coef + std::hypot(dp.b_coef, dp.c_coef);
  } else {
    double mmax = std::abs(model.m0);
    if (model.kind == PWAmplitudeModel::Kind::user_table) {
      mmax = 0.0;
      for (const complexd& z : model.table)
        mmax = std::max(mmax, std::abs(z));
    }
    bracket_max = 4.0 * mmax * mmax;
  }
  if (!(bracket_max > 0.0))
    throw PhysicsError("amplitude model is identically zero");

  const double lo2 = lo * lo;
  const double hi2 = hi * hi;
  const double cenv = 4.0 * (b1.kappa * b2.kappa) * (b1.kappa * b2.kappa);
  const double t_lo = std::log((kmin * kmin - lo2) / (hi2 - kmin * kmin));
  const double t_hi = std::log((kmax * kmax - lo2) / (hi2 - kmax * kmax));

  std::vector<KickEvent> events(n_events);
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk);
  const std::size_t n_chunks = (n_events + chunk - 1) / chunk;
  std::vector<std::uint64_t> proposals(n_chunks, 0);

  parallel_for(n_chunks, opts.threads, [&](std::size_t c) {
    auto gen = substream(opts.seed, c);
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(n_events, begin + chunk);
    std::uint64_t props = 0;
    for (std::size_t i = begin; i < end;) {
      ++props;
      const double t = t_lo + uniform01(gen) * (t_hi - t_lo);
      const double et = std::exp(t);
      const double u = (lo2 + hi2 * et) / (1.0 + et);
      const double k = std::sqrt(u);
      const double phi = 2.0 * M_PI * uniform01(gen);
      const double v = uniform01(gen);
      const double s16 = (hi2 - u) * (u - lo2);
      double bracket = 0.0;
      if (indep) {
        double dens = 0.0;
        kern::density_batch(dp, &k, &dens, 1);
        bracket = dens * s16 / cenv;
      } else {
        TransferVector K{k, phi, kz_sum};
        bracket =
            std::norm(twisted_amplitude(b1, b2, K, model).value) * s16 / cenv;
      }
      if (bracket > bracket_max * (1.0 + 1e-9))
        throw NonConvergent("sampling envelope bound exceeded");
      if (v * bracket_max <= bracket) {
        KickEvent& ev = events[i];
        ev.K = TransferVector{k, phi, kz_sum};
        ev.delta = detuning_from_transfer(b1, b2, atom, ev.K);
        ev.weight = 1.0;
        ++i;
      }
    }
    proposals[c] = props;
  });

  if (stats) {
    stats->proposals = 0;
    for (auto p : proposals) stats->proposals += p;
    stats->accepted = n_events;
    stats->acceptance_rate =
        stats->proposals > 0
            ? static_cast<double>(n_events) / static_cast<double>(stats->proposals)
            : 0.0;
    stats->bound = bracket_max;
    stats->low_acceptance = stats->proposals > 1000 &&
                            stats->acceptance_rate < opts.warn_acceptance;
  }
  return events;
}

namespace {

struct Extremum {
  double pos;
  double val;
  bool is_max;
};

}  // namespace

FringeCensus fringe_census(const FringePattern& pattern, int m1, int m2,
                           const CensusOptions& opts) {
  const std::size_t n = pattern.values.size();
  const int nosc = 2 * (std::abs(m1) + std::abs(m2)) + 1;
  const std::size_t needed =
      static_cast<std::size_t>(opts.samples_per_oscillation) * nosc;
  if (n < needed || n < 3) {
    std::ostringstream os;
    os << "pattern has " << n << " samples but the mode indices imply up to "
       << nosc << " oscillations (need at least " << needed << ")";
    throw Undersampled(os.str());
  }

  // Collapse exact plateaus so flat tops register as single extrema.
  std::vector<double> pos;
  std::vector<double> val;
  pos.reserve(n);
  val.reserve(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pattern.values[j + 1] == pattern.values[i]) ++j;
    pos.push_back(0.5 * (pattern.grid[i] + pattern.grid[j]));
    val.push_back(pattern.values[i]);
    i = j + 1;
  }

  std::vector<Extremum> ext;
  for (std::size_t k = 1; k + 1 < pos.size(); ++k) {
    if (val[k] > val[k - 1] && val[k] > val[k + 1])
      ext.push_back({pos[k], val[k], true});
    else if (val[k] < val[k - 1] && val[k] < val[k + 1])
      ext.push_back({pos[k], val[k], false});
  }

  FringeCensus census;
  for (std::size_t e = 0; e < ext.size(); ++e) {
    if (ext[e].is_max) {
      // Deeper adjacent interior minimum, when one exists.
      bool found = false;
      double vmin = 0.0;
      if (e > 0 && !ext[e - 1].is_max) {
        vmin = ext[e - 1].val;
        found = true;
      }
      if (e + 1 < ext.size() && !ext[e + 1].is_max) {
        vmin = found ? std::min(vmin, ext[e + 1].val) : ext[e + 1].val;
        found = true;
      }
      Fringe f;
      f.position = ext[e].pos;
      f.height = ext[e].val;
      f.contrast = found && (ext[e].val + vmin) > 0.0
                       ? (ext[e].val - vmin) / (ext[e].val + vmin)
                       : 0.0;
      census.fringes.push_back(f);
    } else {
      census.minima_pos.push_back(ext[e].pos);
      census.minima_val.push_back(ext[e].val);
      double flank = 0.0;
      if (e > 0 && ext[e - 1].is_max) flank = std::max(flank, ext[e - 1].val);
      if (e + 1 < ext.size() && ext[e + 1].is_max)
        flank = std::max(flank, ext[e + 1].val);
      if (flank > 0.0 && ext[e].val <= opts.zero_frac * flank)
        ++census.zero_count;
    }
  }
  return census;
}

double visibility(const FringePattern& pattern, int m1, int m2,
                  const CensusOptions& opts) {
  const FringeCensus census = fringe_census(pattern, m1, m2, opts);
  double best = -1.0;
  for (const auto& f : census.fringes) best = std::max(best, f.contrast);
  if (best < 0.0) throw NoFringe("pattern has no interior fringe");
  return best;
}

}  // namespace twistkin
