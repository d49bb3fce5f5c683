#include "twistkin/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "json.hpp"
#include "twistkin/errors.hpp"
#include "twistkin/io.hpp"
#include "twistkin/kernels.hpp"
#include "twistkin/kinematics.hpp"
#include "twistkin/lineshape.hpp"
#include "twistkin/oracle.hpp"
#include "twistkin/smearing.hpp"
#include "twistkin/spectra.hpp"

namespace twistkin {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Emitter {
  std::string dir;
  std::string format;
  bool svg = false;
  std::vector<std::pair<std::string, std::string>> written;  // (file, hash)

  void put(const std::string& base, const std::string& content) {
    write_file(dir + "/" + base, content);
    written.emplace_back(base, fnv1a64_hex(content));
  }

  // Writes the table in the configured format; when both labels are given
  // and the first two columns are numeric, also renders an SVG line plot.
  void table(const Table& t, const std::string& xlabel = "",
             const std::string& ylabel = "") {
    if (format == "json") {
      put(t.name + ".json", render_json_table(t));
    } else {
      put(t.name + ".csv", render_csv(t));
    }
    if (!svg || xlabel.empty() || ylabel.empty()) return;
    std::vector<double> xs, ys;
    for (const auto& row : t.rows) {
      if (row.size() < 2 || row[0].kind != Cell::Kind::number ||
          row[1].kind != Cell::Kind::number)
        return;
      xs.push_back(row[0].num);
      ys.push_back(row[1].num);
    }
    put(t.name + ".svg", svg_line_plot(xs, ys, xlabel, ylabel));
  }
};

struct Ctx {
  const RunConfig& cfg;
  ScanOptions sopts;
  Emitter em;
  json resolved = json::object();
  std::vector<std::string> notes;
};

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw SchemaError("grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

const char* axis_column(PatternAxis axis) {
  switch (axis) {
    case PatternAxis::detuning:
      return "delta";
    case PatternAxis::k_perp:
      return "k_perp";
    case PatternAxis::theta:
      return "theta";
    case PatternAxis::phi_k:
      return "phi_k";
  }
  return "x";
}

Table pattern_table(const std::string& name, const FringePattern& p,
                    const std::vector<double>* err = nullptr) {
  Table t;
  t.name = name;
  t.columns = {axis_column(p.axis), "rate"};
  const bool with_err = err && !err->empty();
  if (with_err) t.columns.emplace_back("std_error");
  t.rows.reserve(p.grid.size());
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    std::vector<Cell> row{Cell::of(p.grid[i]), Cell::of(p.values[i])};
    if (with_err) row.push_back(Cell::of((*err)[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

double annulus_mid(const RunConfig& cfg) {
  const double lo = std::fabs(cfg.photon1.kappa - cfg.photon2.kappa);
  const double hi = cfg.photon1.kappa + cfg.photon2.kappa;
  return 0.5 * (lo + hi);
}

std::vector<double> scan_grid_or(const Ctx& ctx, const DetuningWindow& w) {
  const ScanSpec& s = ctx.cfg.scan;
  if (is_set(s.lo)) return linspace(s.lo, s.hi, s.n);
  return linspace(w.delta_min, w.delta_max, s.n);
}

void note_grid(Ctx& ctx, const std::vector<double>& grid) {
  ctx.resolved["grid_lo"] = grid.front();
  ctx.resolved["grid_hi"] = grid.back();
  ctx.resolved["grid_n"] = grid.size();
}

void run_geometry(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const GeometrySpec g = cfg.geometry.value_or(GeometrySpec{});
  const double kp = is_set(g.k_perp) ? g.k_perp : annulus_mid(cfg);
  const TriangleGeometry tri = triangle_geometry(
      cfg.photon1.kappa, cfg.photon2.kappa, kp, cfg.eps_boundary);
  const ConfigAzimuths az = config_azimuths(tri, g.phi_k);
  const TransferVector K{kp, g.phi_k, cfg.photon1.kz + cfg.photon2.kz};
  const double delta = detuning_from_transfer(cfg.photon1, cfg.photon2,
                                              cfg.atom, K);
  Table t;
  t.name = "geometry";
  t.columns = {"k_perp", "phi_k",  "area",   "delta1", "delta2", "degenerate",
               "phi1_a", "phi2_a", "phi1_b", "phi2_b", "detuning"};
  t.rows.push_back({Cell::of(kp), Cell::of(g.phi_k), Cell::of(tri.area),
                    Cell::of(tri.delta1), Cell::of(tri.delta2),
                    Cell::of_int(tri.degenerate ? 1 : 0), Cell::of(az.phi1_a),
                    Cell::of(az.phi2_a), Cell::of(az.phi1_b),
                    Cell::of(az.phi2_b), Cell::of(delta)});
  ctx.em.table(t);
  ctx.resolved["k_perp"] = kp;
  ctx.resolved["phi_k"] = g.phi_k;
}

void run_window(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const DetuningWindow rest =
      detuning_window_rest(cfg.photon1, cfg.photon2, cfg.atom);
  const DetuningWindow crossed =
      detuning_window_crossed(cfg.photon1, cfg.photon2, cfg.atom);
  Table t;
  t.name = "window";
  t.columns = {"kind", "delta_min", "delta_max"};
  t.rows.push_back({Cell::of_text("rest"), Cell::of(rest.delta_min),
                    Cell::of(rest.delta_max)});
  t.rows.push_back({Cell::of_text("crossed"), Cell::of(crossed.delta_min),
                    Cell::of(crossed.delta_max)});
  ctx.em.table(t);
  ctx.resolved["rest_delta_max"] = rest.delta_max;
  ctx.resolved["crossed_delta_max"] = crossed.delta_max;
}

void emit_census(Ctx& ctx, const FringePattern& pat) {
  const RunConfig& cfg = ctx.cfg;
  try {
    const FringeCensus c = fringe_census(pat, cfg.photon1.m, cfg.photon2.m);
    Table t;
    t.name = "census";
    t.columns = {"position", "height", "contrast"};
    for (const Fringe& f : c.fringes)
      t.rows.push_back(
          {Cell::of(f.position), Cell::of(f.height), Cell::of(f.contrast)});
    ctx.em.table(t);
    ctx.resolved["fringe_count"] = c.fringes.size();
    ctx.resolved["zero_count"] = c.zero_count;
    double best = 0.0;
    for (const Fringe& f : c.fringes) best = std::max(best, f.contrast);
    if (!c.fringes.empty()) ctx.resolved["visibility"] = best;
  } catch (const Undersampled& e) {
    ctx.notes.push_back(std::string("census skipped: ") + e.what());
  }
}

void run_fringes(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::vector<double> grid = scan_grid_or(
      ctx, detuning_window_rest(cfg.photon1, cfg.photon2, cfg.atom));
  const FringePattern pat = detuning_scan(cfg.photon1, cfg.photon2, cfg.atom,
                                          cfg.amplitude, grid, ctx.sopts);
  ctx.em.table(pattern_table("fringes", pat), "delta [eV]", "rate");
  note_grid(ctx, grid);
  ctx.resolved["excluded_fraction"] = pat.excluded_fraction;
  emit_census(ctx, pat);
}

void run_crossed(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::vector<double> grid = scan_grid_or(
      ctx, detuning_window_crossed(cfg.photon1, cfg.photon2, cfg.atom));
  const FringePattern pat = crossed_beam_scan(
      cfg.photon1, cfg.photon2, cfg.atom, cfg.amplitude, grid, ctx.sopts);
  ctx.em.table(pattern_table("crossed", pat), "delta [eV]", "rate");
  note_grid(ctx, grid);
  emit_census(ctx, pat);
}

void run_angular(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AngularSpec a = cfg.angular.value_or(AngularSpec{});
  double delta = a.delta;
  if (!is_set(delta)) {
    const DetuningWindow w =
        detuning_window_rest(cfg.photon1, cfg.photon2, cfg.atom);
    delta = 0.5 * (w.delta_min + w.delta_max);
  }
  const FringePattern pat =
      angular_distribution(cfg.photon1, cfg.photon2, cfg.atom, cfg.amplitude,
                           delta, a.n_theta, ctx.sopts);
  ctx.em.table(pattern_table("angular", pat), "theta [rad]", "rate");
  ctx.resolved["delta"] = delta;
  ctx.resolved["n_theta"] = a.n_theta;
}

void run_azimuthal(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const AzimuthalSpec a = cfg.azimuthal.value_or(AzimuthalSpec{});
  const double kp = is_set(a.k_perp) ? a.k_perp : annulus_mid(cfg);
  const FringePattern pat =
      azimuthal_distribution(cfg.photon1, cfg.photon2, cfg.atom, cfg.amplitude,
                             kp, a.n_phi, ctx.sopts);
  Table t = pattern_table("azimuthal", pat);
  t.columns[1] = "density";
  ctx.em.table(t, "phi_k [rad]", "density");
  ctx.resolved["k_perp"] = kp;
  ctx.resolved["n_phi"] = a.n_phi;
}

void run_events(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const EventsSpec e = cfg.events.value_or(EventsSpec{});
  SampleOptions so;
  so.trim = cfg.scan.trim;
  so.seed = cfg.seed;
  so.threads = cfg.threads;
  SampleStats st;
  const std::vector<KickEvent> events =
      sample_kicks(cfg.photon1, cfg.photon2, cfg.atom, cfg.amplitude,
                   static_cast<std::size_t>(e.n), so, &st);
  Table t;
  t.name = "events";
  t.columns = {"k_perp", "phi_k", "kz", "delta", "weight"};
  t.rows.reserve(events.size());
  for (const KickEvent& ev : events)
    t.rows.push_back({Cell::of(ev.K.k_perp), Cell::of(ev.K.phi_k),
                      Cell::of(ev.K.kz), Cell::of(ev.delta),
                      Cell::of(ev.weight)});
  ctx.em.table(t);

  const double lo = std::fabs(cfg.photon1.kappa - cfg.photon2.kappa);
  const double hi = cfg.photon1.kappa + cfg.photon2.kappa;
  const double trim =
      cfg.scan.trim < 0.0 ? 1e-4 * (cfg.photon1.kappa + cfg.photon2.kappa)
                          : cfg.scan.trim;
  const double kmin = lo + trim;
  const double kmax = hi - trim;
  const int nb = std::max(1, e.bins);
  std::vector<long long> counts(static_cast<std::size_t>(nb), 0);
  for (const KickEvent& ev : events) {
    const double f = (ev.K.k_perp - kmin) / (kmax - kmin);
    const int b = std::clamp(static_cast<int>(f * nb), 0, nb - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  Table h;
  h.name = "events_hist";
  h.columns = {"k_lo", "k_hi", "count"};
  for (int b = 0; b < nb; ++b) {
    h.rows.push_back({Cell::of(kmin + (kmax - kmin) * b / nb),
                      Cell::of(kmin + (kmax - kmin) * (b + 1) / nb),
                      Cell::of_int(counts[static_cast<std::size_t>(b)])});
  }
  ctx.em.table(h);
  ctx.resolved["proposals"] = st.proposals;
  ctx.resolved["accepted"] = st.accepted;
  ctx.resolved["acceptance_rate"] = st.acceptance_rate;
  ctx.resolved["envelope_bound"] = st.bound;
  if (st.low_acceptance)
    ctx.notes.push_back("low acceptance rate; check the trim and the model");
}

void run_oracle(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const OracleSpec o = cfg.oracle.value_or(OracleSpec{});
  const double kmin = std::min(cfg.photon1.kappa, cfg.photon2.kappa);
  const double sigma0 =
      is_set(o.sigma) ? o.sigma
                      : (cfg.ring_sigma > 0.0 ? cfg.ring_sigma : 1e-3 * kmin);
  const double kp = is_set(o.k_perp) ? o.k_perp : annulus_mid(cfg);
  const TransferVector K{kp, o.phi_k, cfg.photon1.kz + cfg.photon2.kz};
  const complexd exact =
      twisted_amplitude(cfg.photon1, cfg.photon2, K, cfg.amplitude,
                        cfg.eps_boundary)
          .value;
  const double exact_abs = std::abs(exact);

  Table t;
  t.name = "oracle";
  t.columns = {"sigma", "j_re", "j_im", "j_abs", "exact_abs", "ratio",
               "defect"};
  std::vector<double> defects;
  double sigma = sigma0;
  double final_ratio = 0.0;
  for (int i = 0; i <= o.halvings; ++i) {
    RingRegularization reg;
    reg.sigma = sigma;
    const complexd J =
        ring_quadrature_amplitude(cfg.photon1, cfg.photon2, K, cfg.amplitude,
                                  reg);
    const double defect = std::abs(J - exact);
    const double ratio =
        exact_abs > 0.0 ? std::abs(J) / exact_abs
                        : std::numeric_limits<double>::quiet_NaN();
    defects.push_back(defect);
    final_ratio = ratio;
    t.rows.push_back({Cell::of(sigma), Cell::of(J.real()), Cell::of(J.imag()),
                      Cell::of(std::abs(J)), Cell::of(exact_abs),
                      Cell::of(ratio), Cell::of(defect)});
    sigma *= 0.5;
  }
  ctx.em.table(t);
  json orders = json::array();
  for (std::size_t i = 0; i + 1 < defects.size(); ++i) {
    if (defects[i] > 0.0 && defects[i + 1] > 0.0)
      orders.push_back(std::log2(defects[i] / defects[i + 1]));
  }
  ctx.resolved["k_perp"] = kp;
  ctx.resolved["phi_k"] = o.phi_k;
  ctx.resolved["sigma0"] = sigma0;
  ctx.resolved["final_ratio"] = final_ratio;
  ctx.resolved["orders"] = orders;
}

void run_forward(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (!cfg.lineshape_forward)
    throw SchemaError("config section lineshape_forward is required");
  const ForwardSpec& f = *cfg.lineshape_forward;
  const LineProfile prof = f.profile.make();

  std::vector<double> xs;
  if (is_set(cfg.scan.lo)) {
    xs = linspace(cfg.scan.lo, cfg.scan.hi, cfg.scan.n);
  } else {
    const DetuningWindow w =
        detuning_window_rest(cfg.photon1, cfg.photon2, cfg.atom);
    xs = linspace(w.delta_min + prof.grid.front(),
                  w.delta_max + prof.grid.back(), cfg.scan.n);
  }

  MeasurementSet set{cfg.photon1, cfg.photon2,   cfg.atom, cfg.amplitude,
                     ScanKind::detuning_rest,    f.settings, ctx.sopts};
  const std::vector<FringePattern> pats = forward_pattern(set, prof, xs);

  Table t;
  t.name = "patterns";
  t.columns = {"setting", "m1", "m2", "x", "rate", "sigma"};
  for (std::size_t s = 0; s < pats.size(); ++s) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      t.rows.push_back({Cell::of_int(static_cast<long long>(s)),
                        Cell::of_int(f.settings[s].m1),
                        Cell::of_int(f.settings[s].m2), Cell::of(xs[i]),
                        Cell::of(pats[s].values[i]), Cell::of(0.0)});
    }
  }
  ctx.em.table(t);

  Table p;
  p.name = "profile_in";
  p.columns = {"position", "weight"};
  for (std::size_t j = 0; j < prof.grid.size(); ++j)
    p.rows.push_back({Cell::of(prof.grid[j]), Cell::of(prof.weights[j])});
  ctx.em.table(p, "position [eV]", "weight");
  note_grid(ctx, xs);
  ctx.resolved["settings"] = f.settings.size();
}

double to_num(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("bad number '" + s + "' in " + what);
  }
}

void run_invert(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (!cfg.lineshape_invert)
    throw SchemaError("config section lineshape_invert is required");
  const InvertSpec& v = *cfg.lineshape_invert;
  const CsvTable in = read_csv(v.input);
  const std::vector<std::string> want = {"setting", "m1",   "m2",
                                         "x",       "rate", "sigma"};
  const bool with_sigma = in.columns.size() == 6;
  if (in.columns.size() < 5 || in.columns.size() > 6)
    throw SchemaError("measured CSV needs columns setting,m1,m2,x,rate[,sigma]");
  for (std::size_t j = 0; j < in.columns.size(); ++j) {
    if (in.columns[j] != want[j])
      throw SchemaError("measured CSV column " + std::to_string(j) +
                        " must be '" + want[j] + "'");
  }

  struct Series {
    int m1 = 0;
    int m2 = 0;
    std::vector<double> xs, rates, sigmas;
  };
  std::map<long long, Series> series;
  for (const auto& row : in.rows) {
    const long long s =
        static_cast<long long>(to_num(row[0], "setting column"));
    Series& sr = series[s];
    const int m1 = static_cast<int>(to_num(row[1], "m1 column"));
    const int m2 = static_cast<int>(to_num(row[2], "m2 column"));
    if (sr.xs.empty()) {
      sr.m1 = m1;
      sr.m2 = m2;
    } else if (sr.m1 != m1 || sr.m2 != m2) {
      throw SchemaError("inconsistent m1/m2 within one setting");
    }
    sr.xs.push_back(to_num(row[3], "x column"));
    sr.rates.push_back(to_num(row[4], "rate column"));
    sr.sigmas.push_back(with_sigma ? to_num(row[5], "sigma column") : 0.0);
  }
  if (series.empty()) throw SchemaError("measured CSV has no data rows");

  MeasurementSet set;
  set.b1 = cfg.photon1;
  set.b2 = cfg.photon2;
  set.atom = cfg.atom;
  set.model = cfg.amplitude;
  set.kind = ScanKind::detuning_rest;
  set.scan = ctx.sopts;
  std::vector<Measurement> measured;
  const std::vector<double>* ref_xs = nullptr;
  bool any_sigma = false;
  bool all_sigma = true;
  for (const auto& [idx, sr] : series) {
    (void)idx;
    if (!ref_xs) {
      ref_xs = &sr.xs;
    } else if (sr.xs != *ref_xs) {
      throw SchemaError("all settings must share the same x grid");
    }
    for (double sg : sr.sigmas) {
      if (sg < 0.0) throw SchemaError("sigma column must be >= 0");
      if (sg > 0.0)
        any_sigma = true;
      else
        all_sigma = false;
    }
    set.settings.push_back(MeasurementSetting{sr.m1, sr.m2});
    Measurement m;
    m.pattern.axis = PatternAxis::detuning;
    m.pattern.grid = sr.xs;
    m.pattern.values = sr.rates;
    m.sigma = sr.sigmas;
    measured.push_back(std::move(m));
  }
  if (any_sigma && !all_sigma)
    throw SchemaError("sigma column must be all positive or all zero");
  if (!any_sigma)
    for (Measurement& m : measured) m.sigma.clear();

  ReconstructionConfig rc;
  rc.profile_grid = v.profile_grid.points();
  rc.lambda = v.lambda;
  rc.nonnegativity = v.nonneg;
  rc.lcurve_points = v.lcurve_points;
  const Reconstruction rec = invert_lineshape(set, measured, rc);

  Table p;
  p.name = "profile";
  p.columns = {"position", "weight"};
  for (std::size_t j = 0; j < rec.profile.grid.size(); ++j)
    p.rows.push_back(
        {Cell::of(rec.profile.grid[j]), Cell::of(rec.profile.weights[j])});
  ctx.em.table(p, "position [eV]", "weight");

  Table lc;
  lc.name = "lcurve";
  lc.columns = {"lambda", "residual", "seminorm", "curvature"};
  for (const LCurvePoint& pt : rec.lcurve)
    lc.rows.push_back({Cell::of(pt.lambda), Cell::of(pt.residual),
                       Cell::of(pt.seminorm), Cell::of(pt.curvature)});
  ctx.em.table(lc);
  ctx.resolved["lambda"] = rec.lambda;
  ctx.resolved["residual"] = rec.residual;
  ctx.resolved["rank"] = rec.rank;
  ctx.resolved["settings"] = set.settings.size();
}

void run_smear(Ctx& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const SmearSpec s = cfg.smear.value_or(SmearSpec{});
  const ScanKind kind =
      s.kind == "crossed" ? ScanKind::crossed_beam : ScanKind::detuning_rest;
  const DetuningWindow w =
      kind == ScanKind::crossed_beam
          ? detuning_window_crossed(cfg.photon1, cfg.photon2, cfg.atom)
          : detuning_window_rest(cfg.photon1, cfg.photon2, cfg.atom);
  const std::vector<double> grid = scan_grid_or(ctx, w);
  const MomentumSpread sp = s.spread(cfg.seed);

  const SmearedPattern sm = smear_pattern(cfg.photon1, cfg.photon2, cfg.atom,
                                          cfg.amplitude, kind, grid, sp,
                                          ctx.sopts);
  ctx.em.table(pattern_table("smear", sm.pattern, &sm.std_error),
               "delta [eV]", "rate");
  note_grid(ctx, grid);
  ctx.resolved["nodes"] = sm.nodes;
  ctx.resolved["used_mc"] = sm.used_mc;

  const double maxc =
      std::max({s.sigma_p.x, s.sigma_p.y, s.sigma_p.z});
  const Vec3 dir = maxc > 0.0 ? (1.0 / maxc) * s.sigma_p : Vec3{1.0, 1.0, 1.0};
  const double ladder_max =
      is_set(s.ladder_max) ? s.ladder_max : (maxc > 0.0 ? 2.0 * maxc : -1.0);

  if (ladder_max > 0.0 && s.ladder_n > 1) {
    Table t;
    t.name = "visibility";
    t.columns = {"sigma", "visibility"};
    for (int i = 0; i < s.ladder_n; ++i) {
      const double scale =
          ladder_max * static_cast<double>(i) /
          static_cast<double>(s.ladder_n - 1);
      MomentumSpread spi = sp;
      spi.sigma_p = scale * dir;
      const SmearedPattern si = smear_pattern(cfg.photon1, cfg.photon2,
                                              cfg.atom, cfg.amplitude, kind,
                                              grid, spi, ctx.sopts);
      double vis = 0.0;
      try {
        vis = visibility(si.pattern, cfg.photon1.m, cfg.photon2.m);
      } catch (const NoFringe&) {
        vis = 0.0;
      }
      t.rows.push_back({Cell::of(scale), Cell::of(vis)});
    }
    ctx.em.table(t, "sigma_p [eV]", "visibility");
    ctx.resolved["ladder_max"] = ladder_max;
  }

  if (is_set(s.threshold)) {
    MomentumSpread tmpl = sp;
    tmpl.sigma_p = dir;
    std::string status = "ok";
    SpreadResult r{0.0, 0.0};
    try {
      r = tolerable_spread(cfg.photon1, cfg.photon2, cfg.atom, cfg.amplitude,
                           kind, grid, s.threshold, tmpl, s.sigma_hi,
                           ctx.sopts);
    } catch (const AlwaysVisible&) {
      status = "always_visible";
      r.sigma = s.sigma_hi;
      ctx.notes.push_back(
          "tolerable spread: visibility stays above threshold up to "
          "sigma_hi");
    } catch (const NeverVisible&) {
      status = "never_visible";
      ctx.notes.push_back(
          "tolerable spread: unsmeared visibility already at or below "
          "threshold");
    }
    Table t;
    t.name = "tolerable";
    t.columns = {"status", "sigma", "visibility"};
    t.rows.push_back(
        {Cell::of_text(status), Cell::of(r.sigma), Cell::of(r.visibility)});
    ctx.em.table(t);
    ctx.resolved["tolerable_status"] = status;
    ctx.resolved["tolerable_sigma"] = r.sigma;
    ctx.resolved["tolerable_visibility"] = r.visibility;
  }
}

}  // namespace

std::vector<std::string> subcommand_names() {
  return {"geometry",  "window", "fringes",           "angular",
          "azimuthal", "crossed", "events",           "oracle",
          "lineshape-forward",   "lineshape-invert",  "smear"};
}

RunResult run_subcommand(const std::string& name, const RunConfig& cfg,
                         const std::string& out_dir) {
  validate_mode(cfg.photon1);
  validate_mode(cfg.photon2);
  validate_atom(cfg.atom);
  validate_model(cfg.amplitude);

  switch (cfg.kernel) {
    case KernelChoice::automatic:
      kern::select_kernel(kern::kernel_supported(kern::Kind::avx2)
                              ? kern::Kind::avx2
                              : kern::Kind::scalar);
      break;
    case KernelChoice::scalar:
      kern::select_kernel(kern::Kind::scalar);
      break;
    case KernelChoice::avx2:
      kern::select_kernel(kern::Kind::avx2);
      break;
  }

  const std::string dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(dir);

  Ctx ctx{cfg,
          ScanOptions{cfg.scan.trim, cfg.scan.rel_tol, cfg.scan.min_panels,
                      cfg.scan.max_panels, cfg.threads},
          Emitter{dir, cfg.output.format, cfg.output.svg, {}},
          json::object(),
          {}};

  if (name == "geometry") {
    run_geometry(ctx);
  } else if (name == "window") {
    run_window(ctx);
  } else if (name == "fringes") {
    run_fringes(ctx);
  } else if (name == "angular") {
    run_angular(ctx);
  } else if (name == "azimuthal") {
    run_azimuthal(ctx);
  } else if (name == "crossed") {
    run_crossed(ctx);
  } else if (name == "events") {
    run_events(ctx);
  } else if (name == "oracle") {
    run_oracle(ctx);
  } else if (name == "lineshape-forward") {
    run_forward(ctx);
  } else if (name == "lineshape-invert") {
    run_invert(ctx);
  } else if (name == "smear") {
    run_smear(ctx);
  } else {
    throw SchemaError("unknown subcommand: " + name);
  }

  json man;
  man["tool"] = "twistkin";
  man["version"] = kVersion;
  man["subcommand"] = name;
  const std::string canon = canonical_config(cfg);
  man["config"] = json::parse(canon);
  man["config_hash"] = fnv1a64_hex(canon);
  man["seed"] = cfg.seed;
  man["threads"] = cfg.threads;
  man["kernel"] =
      kern::active_kernel() == kern::Kind::avx2 ? "avx2" : "scalar";
  man["resolved"] = ctx.resolved;
  json outs = json::array();
  for (const auto& [base, hash] : ctx.em.written) {
    json o;
    o["file"] = base;
    o["fnv1a64"] = hash;
    outs.push_back(o);
  }
  man["outputs"] = outs;
  man["notes"] = ctx.notes;
  ctx.em.put("run_manifest.json", man.dump(2) + "\n");

  RunResult res;
  for (const auto& [base, hash] : ctx.em.written) res.files.push_back(base);
  res.notes = ctx.notes;
  res.resolved_json = ctx.resolved.dump();
  return res;
}

}  // namespace twistkin
