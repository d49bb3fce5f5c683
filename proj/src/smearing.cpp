#include "twistkin/smearing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "twistkin/errors.hpp"
#include "twistkin/kinematics.hpp"
#include "twistkin/parallel.hpp"
#include "twistkin/rng.hpp"

namespace twistkin {

namespace {

bool axis_active(const Vec3& s, int a) {
  const double v = a == 0 ? s.x : (a == 1 ? s.y : s.z);
  return v > 0.0;
}

double axis_sigma(const Vec3& s, int a) {
  return a == 0 ? s.x : (a == 1 ? s.y : s.z);
}

Vec3 axis_vec(int a, double v) {
  Vec3 e{0.0, 0.0, 0.0};
  if (a == 0) {
    e.x = v;
  } else if (a == 1) {
    e.y = v;
  } else {
    e.z = v;
  }
  return e;
}

// 15-point Kronrod rule with its embedded 7-point Gauss rule on [-1, 1].
// Index 7 is the center node; the Gauss points are the odd-index ones.
constexpr double kGKX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kGKWK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGKWG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Seg {
  double a = 0.0;
  double b = 0.0;
  double num = 0.0;   // integral of g * gaussian
  double den = 0.0;   // integral of the gaussian alone
  double err = 0.0;   // Kronrod-Gauss defect of num
};

template <class G>
Seg gk15_segment(const G& g, double sigma, double a, double b,
                 std::size_t& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Seg s;
  s.a = a;
  s.b = b;
  double nk = 0.0;
  double ng = 0.0;
  double dk = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = kGKX[i];
    const double p1 = c + h * x;
    const double w1 = std::exp(-0.5 * (p1 / sigma) * (p1 / sigma));
    // Rates are nonnegative; a negative sample is cancellation residue.
    double fw = std::max(g(p1), 0.0) * w1;
    double w = w1;
    ++evals;
    if (x > 0.0) {
      const double p2 = c - h * x;
      const double w2 = std::exp(-0.5 * (p2 / sigma) * (p2 / sigma));
      fw += std::max(g(p2), 0.0) * w2;
      w += w2;
      ++evals;
    }
    nk += kGKWK[i] * fw;
    dk += kGKWK[i] * w;
    if (i % 2 == 1) ng += kGKWG[i / 2] * fw;
  }
  s.num = nk * h;
  s.den = dk * h;
  s.err = std::fabs((nk - ng) * h);
  return s;
}

// Weighted average of g against a centered axis Gaussian. The trimmed
// detuning window gives g near-discontinuities whose height scales like the
// inverse trim, so fixed-order rules stall; bisecting the worst Kronrod
// defect localizes each edge in O(log(1/trim)) splits. seed_h bounds the
// initial spacing so a support sliver much narrower than sigma still meets
// several nodes.
template <class G>
double gauss_average_1d(const G& g, double sigma, double seed_h, int n_hint,
                        std::size_t& evals) {
  const double lim = 8.0 * sigma;
  int n0 = std::max(8, n_hint);
  if (seed_h > 0.0 && seed_h < lim) {
    const double need = std::ceil(2.0 * lim / seed_h);
    if (need > n0) n0 = static_cast<int>(std::min(need, 1024.0));
  }
  std::vector<Seg> segs;
  segs.reserve(static_cast<std::size_t>(n0) + 64);
  for (int i = 0; i < n0; ++i) {
    const double a = -lim + 2.0 * lim * i / n0;
    const double b = -lim + 2.0 * lim * (i + 1) / n0;
    segs.push_back(gk15_segment(g, sigma, a, b, evals));
  }
  const std::size_t max_segs = 4096;
  std::vector<double> hist;
  for (;;) {
    double num = 0.0;
    double den = 0.0;
    double err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      num += segs[i].num;
      den += segs[i].den;
      err += segs[i].err;
      if (segs[i].err > segs[worst].err) worst = i;
    }
    if (err <= 1e-7 * std::fabs(num)) return num / den;
    // A pattern that cancels to rounding residue keeps a flat defect no
    // matter how finely it is split; once refinement stops paying, the
    // defect is the noise floor and the current average is the answer.
    hist.push_back(err);
    if (hist.size() > 64 && err >= 0.98 * hist[hist.size() - 65])
      return num / den;
    if (segs.size() >= max_segs || segs[worst].err == 0.0)
      throw NonConvergent(
          "momentum spread quadrature not converged; consider method mc");
    const Seg w = segs[worst];
    const double m = 0.5 * (w.a + w.b);
    if (!(m > w.a) || !(m < w.b)) {
      segs[worst].err = 0.0;
      continue;
    }
    segs[worst] = gk15_segment(g, sigma, w.a, m, evals);
    segs.push_back(gk15_segment(g, sigma, m, w.b, evals));
  }
}

// Common random numbers: one substream per sample index, so the same
// momentum draws hit every grid point and every sigma on a ladder scales the
// identical underlying normals.
std::vector<Vec3> mc_offsets(const MomentumSpread& spread,
                             const std::vector<int>& active) {
  std::vector<Vec3> offs(static_cast<std::size_t>(spread.n_mc));
  for (std::size_t s = 0; s < offs.size(); ++s) {
    auto gen = substream(spread.seed, static_cast<std::uint64_t>(s));
    double draws[3] = {0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < active.size(); j += 2) {
      double n1 = 0.0;
      double n2 = 0.0;
      normal_pair(gen, n1, n2);
      draws[j] = n1;
      if (j + 1 < active.size()) draws[j + 1] = n2;
    }
    Vec3 dp{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < active.size(); ++j) {
      const int a = active[j];
      dp = dp + axis_vec(a, axis_sigma(spread.sigma_p, a) * draws[j]);
    }
    offs[s] = dp;
  }
  return offs;
}

}  // namespace

void validate_spread(const MomentumSpread& spread) {
  const double comps[3] = {spread.sigma_p.x, spread.sigma_p.y,
                           spread.sigma_p.z};
  for (double c : comps) {
    if (!std::isfinite(c) || c < 0.0)
      throw PhysicsError("momentum spread components must be finite and >= 0");
  }
  if (spread.n_quad < 1)
    throw PhysicsError("momentum spread needs at least one quadrature node");
  if (spread.n_mc < 2)
    throw PhysicsError("momentum spread needs at least two MC samples");
}

SmearedPattern smear_pattern(const BesselMode& b1, const BesselMode& b2,
                             const AtomBeam& atom,
                             const PWAmplitudeModel& model, ScanKind kind,
                             const std::vector<double>& grid,
                             const MomentumSpread& spread,
                             const ScanOptions& opts) {
  validate_spread(spread);
  const PatternEvaluator eval(b1, b2, atom, model, kind, opts);

  std::vector<int> active;
  for (int a = 0; a < 3; ++a)
    if (axis_active(spread.sigma_p, a)) active.push_back(a);

  SmearedPattern out;
  if (active.empty()) {
    out.pattern = eval.evaluate(grid);
    out.nodes = 1;
    return out;
  }

  bool use_mc = spread.method == SmearMethod::mc;
  if (spread.method == SmearMethod::automatic) use_mc = active.size() >= 3;

  out.pattern.axis = PatternAxis::detuning;
  out.pattern.grid = grid;
  out.pattern.values.assign(grid.size(), 0.0);
  out.pattern.boundary_cutoff = eval.trim();
  out.pattern.excluded_fraction = eval.excluded_fraction();
  out.used_mc = use_mc;

  if (!use_mc) {
    if (active.size() > 2)
      throw PhysicsError(
          "quadrature smearing nests at most two active axes; use method mc");
    // Initial spacing per axis must resolve both the Gaussian and the
    // support sliver: transverse offsets push the shell circle off the
    // annulus beyond roughly its outer radius, and longitudinal offsets
    // translate the window by kz_sum / mass per eV.
    const DetuningWindow w =
        kind == ScanKind::crossed_beam
            ? detuning_window_crossed(b1, b2, atom)
            : detuning_window_rest(b1, b2, atom);
    const double kz_sum = b1.kz + b2.kz;
    const double wwidth = w.delta_max - w.delta_min;
    double seed[3];
    seed[0] = 0.5 * (b1.kappa + b2.kappa);
    seed[1] = seed[0];
    seed[2] = kz_sum != 0.0
                  ? 0.5 * wwidth * atom.mass_i / std::fabs(kz_sum)
                  : 0.0;
    std::vector<std::size_t> counts(grid.size(), 0);
    parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
      std::size_t ev = 0;
      std::function<double(std::size_t, Vec3)> rec =
          [&](std::size_t ai, Vec3 off) -> double {
        if (ai == active.size()) return eval.at_offset(grid[i], off);
        const int a = active[ai];
        const double sig = axis_sigma(spread.sigma_p, a);
        const double sh = std::min(sig, seed[a] > 0.0 ? seed[a] : sig);
        return gauss_average_1d(
            [&](double p) { return rec(ai + 1, off + axis_vec(a, p)); }, sig,
            sh, spread.n_quad, ev);
      };
      out.pattern.values[i] = rec(0, Vec3{0.0, 0.0, 0.0});
      counts[i] = ev;
    });
    out.nodes = *std::max_element(counts.begin(), counts.end());
    return out;
  }

  const std::vector<Vec3> offs = mc_offsets(spread, active);
  const std::size_t n = offs.size();
  out.nodes = n;
  out.std_error.assign(grid.size(), 0.0);
  parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
    std::vector<double> vals(n);
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      vals[s] = eval.at_offset(grid[i], offs[s]);
      sum += vals[s];
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double d = vals[s] - mean;
      ss += d * d;
    }
    out.pattern.values[i] = mean;
    out.std_error[i] =
        std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
  });
  return out;
}

SpreadResult tolerable_spread(const BesselMode& b1, const BesselMode& b2,
                              const AtomBeam& atom,
                              const PWAmplitudeModel& model, ScanKind kind,
                              const std::vector<double>& grid,
                              double threshold, const MomentumSpread& tmpl,
                              double sigma_hi, const ScanOptions& opts,
                              const CensusOptions& census) {
  if (!(threshold > 0.0) || !(threshold < 1.0))
    throw PhysicsError("visibility threshold must lie in (0, 1)");
  validate_spread(tmpl);
  const double dmax = std::max(
      {tmpl.sigma_p.x, tmpl.sigma_p.y, tmpl.sigma_p.z});
  if (!(dmax > 0.0))
    throw PhysicsError("spread template needs a nonzero direction");
  if (!(sigma_hi > 0.0) || !std::isfinite(sigma_hi))
    throw PhysicsError("spread search bound must be positive and finite");
  const Vec3 dir = (1.0 / dmax) * tmpl.sigma_p;

  const auto vis_at = [&](double sigma) {
    MomentumSpread sp = tmpl;
    sp.sigma_p = sigma * dir;
    const SmearedPattern sm =
        smear_pattern(b1, b2, atom, model, kind, grid, sp, opts);
    try {
      return visibility(sm.pattern, b1.m, b2.m, census);
    } catch (const NoFringe&) {
      return 0.0;  // fully washed out counts as zero contrast
    }
  };

  const double v0 = vis_at(0.0);
  if (!(v0 > threshold))
    throw NeverVisible("unsmeared visibility already at or below threshold");
  if (vis_at(sigma_hi) > threshold)
    throw AlwaysVisible("visibility stays above threshold up to sigma_hi");

  double lo = 0.0;
  double hi = sigma_hi;
  SpreadResult certified{0.0, v0};
  SpreadResult nearest{0.0, v0};
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-4 * sigma_hi) break;
    const double mid = 0.5 * (lo + hi);
    const double v = vis_at(mid);
    if (std::fabs(v - threshold) < std::fabs(nearest.visibility - threshold))
      nearest = SpreadResult{mid, v};
    if (std::fabs(v - threshold) <= 0.002) break;
    if (v > threshold) {
      lo = mid;
      certified = SpreadResult{mid, v};
    } else {
      hi = mid;
    }
  }
  // Prefer the probe that pinned the threshold; if the visibility drops off a
  // cliff and never lands nearest it, report the widest spread still above.
  if (std::fabs(nearest.visibility - threshold) <= 0.01) return nearest;
  return certified;
}

}  // namespace twistkin
