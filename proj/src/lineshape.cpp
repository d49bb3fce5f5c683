#include "twistkin/lineshape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <sstream>

#include "twistkin/parallel.hpp"

namespace twistkin {

double uniform_step(const std::vector<double>& grid) {
  if (grid.size() < 2) throw SchemaError("grid needs at least two points");
  const double h = (grid.back() - grid.front()) / (grid.size() - 1);
  if (!(h > 0.0)) throw SchemaError("grid must increase");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::fabs(grid[i] - grid[i - 1] - h) > 1e-9 * h)
      throw SchemaError("grid is not uniform");
  }
  return h;
}

void validate_profile(const LineProfile& profile) {
  if (profile.grid.size() != profile.weights.size())
    throw SchemaError("profile grid and weights differ in length");
  const double h = uniform_step(profile.grid);
  double mass = 0.0;
  for (double w : profile.weights) {
    if (!(w >= 0.0)) throw SchemaError("profile weights must be non-negative");
    mass += w;
  }
  mass *= h;
  if (std::fabs(mass - 1.0) > 1e-9)
    throw SchemaError("profile does not integrate to 1");
}

namespace {

LineProfile normalized(LineProfile p) {
  const double h = uniform_step(p.grid);
  double mass = 0.0;
  for (double w : p.weights) mass += w;
  mass *= h;
  if (!(mass > 0.0)) throw SchemaError("profile has no mass on this grid");
  for (double& w : p.weights) w /= mass;
  return p;
}

}  // namespace

LineProfile delta_profile(const std::vector<double>& grid, double center) {
  LineProfile p;
  p.kind = LineProfile::Kind::delta;
  p.grid = grid;
  p.weights.assign(grid.size(), 0.0);
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::fabs(grid[i] - center) < std::fabs(grid[best] - center)) best = i;
  }
  const double h = uniform_step(grid);
  p.weights[best] = 1.0 / h;
  return p;
}

LineProfile lorentzian_profile(const std::vector<double>& grid, double center,
                               double gamma) {
  if (!(gamma > 0.0)) throw SchemaError("lorentzian width must be positive");
  LineProfile p;
  p.kind = LineProfile::Kind::lorentzian;
  p.grid = grid;
  p.weights.resize(grid.size());
  const double hw = 0.5 * gamma;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i] - center;
    p.weights[i] = hw / (M_PI * (x * x + hw * hw));
  }
  return normalized(p);
}

LineProfile gaussian_profile(const std::vector<double>& grid, double center,
                             double sigma) {
  if (!(sigma > 0.0)) throw SchemaError("gaussian width must be positive");
  LineProfile p;
  p.kind = LineProfile::Kind::gaussian;
  p.grid = grid;
  p.weights.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = (grid[i] - center) / sigma;
    p.weights[i] = std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * M_PI));
  }
  return normalized(p);
}

namespace {

// Single-line scan values for one setting at the shifted arguments
// y = x_i - e_j. Shifts that coincide exactly (aligned grids) are evaluated
// once.
std::vector<double> kernel_values(const MeasurementSet& set,
                                  const MeasurementSetting& s,
                                  const std::vector<double>& x_grid,
                                  const std::vector<double>& profile_grid,
                                  std::vector<std::size_t>& index) {
  BesselMode b1 = set.b1;
  BesselMode b2 = set.b2;
  b1.m = s.m1;
  b2.m = s.m2;
  PatternEvaluator ev(b1, b2, set.atom, set.model, set.kind, set.scan);

  std::map<double, std::size_t> seen;
  std::vector<double> unique;
  index.resize(x_grid.size() * profile_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    for (std::size_t j = 0; j < profile_grid.size(); ++j) {
      const double y = x_grid[i] - profile_grid[j];
      auto [it, fresh] = seen.emplace(y, unique.size());
      if (fresh) unique.push_back(y);
      index[i * profile_grid.size() + j] = it->second;
    }
  }
  std::vector<double> values(unique.size());
  parallel_for(unique.size(), set.scan.threads,
               [&](std::size_t k) { values[k] = ev(unique[k]); });
  return values;
}

}  // namespace

std::vector<FringePattern> forward_pattern(const MeasurementSet& set,
                                           const LineProfile& profile,
                                           const std::vector<double>& x_grid) {
  validate_profile(profile);
  if (set.settings.empty()) throw SchemaError("measurement set has no settings");
  const double h = uniform_step(profile.grid);
  std::vector<FringePattern> out;
  out.reserve(set.settings.size());
  for (const auto& s : set.settings) {
    std::vector<std::size_t> index;
    const std::vector<double> values =
        kernel_values(set, s, x_grid, profile.grid, index);
    FringePattern pat;
    pat.axis = PatternAxis::detuning;
    pat.grid = x_grid;
    pat.values.assign(x_grid.size(), 0.0);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < profile.grid.size(); ++j) {
        acc += profile.weights[j] * values[index[i * profile.grid.size() + j]];
      }
      pat.values[i] = acc * h;
    }
    out.push_back(std::move(pat));
  }
  return out;
}

DesignMatrix build_design_matrix(const MeasurementSet& set,
                                 const std::vector<double>& x_grid,
                                 const std::vector<double>& profile_grid) {
  if (set.settings.empty()) throw SchemaError("measurement set has no settings");
  const double h = uniform_step(profile_grid);
  DesignMatrix dm;
  dm.cols = profile_grid.size();
  dm.rows = set.settings.size() * x_grid.size();
  dm.a.resize(dm.rows * dm.cols);
  dm.setting_of_row.resize(dm.rows);
  dm.x_of_row.resize(dm.rows);

  for (std::size_t s = 0; s < set.settings.size(); ++s) {
    std::vector<std::size_t> index;
    const std::vector<double> values =
        kernel_values(set, set.settings[s], x_grid, profile_grid, index);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const std::size_t row = s * x_grid.size() + i;
      dm.setting_of_row[row] = static_cast<int>(s);
      dm.x_of_row[row] = x_grid[i];
      for (std::size_t j = 0; j < dm.cols; ++j) {
        dm.a[row * dm.cols + j] =
            h * values[index[i * profile_grid.size() + j]];
      }
    }
  }
  return dm;
}

namespace {

struct Stacked {
  Eigen::MatrixXd a;       // weighted design matrix
  Eigen::VectorXd b;       // weighted data
  Eigen::MatrixXd l;       // second-difference operator
};

Eigen::VectorXd solve_tikhonov(const Stacked& sys, double lambda,
                               bool nonneg) {
  const Eigen::Index n = sys.a.cols();
  const Eigen::Index nl = sys.l.rows();
  Eigen::MatrixXd big(sys.a.rows() + (lambda > 0.0 ? nl : 0), n);
  Eigen::VectorXd rhs(big.rows());
  big.topRows(sys.a.rows()) = sys.a;
  rhs.head(sys.a.rows()) = sys.b;
  if (lambda > 0.0) {
    big.bottomRows(nl) = lambda * sys.l;
    rhs.tail(nl).setZero();
  }
  Eigen::VectorXd w = big.colPivHouseholderQr().solve(rhs);
  if (!nonneg) return w;

  // Projected gradient on || big w - rhs ||^2 from the clipped LS start.
  const Eigen::MatrixXd gram = big.transpose() * big;
  const Eigen::VectorXd atb = big.transpose() * rhs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double lip = es.eigenvalues().maxCoeff();
  const double step = lip > 0.0 ? 1.0 / lip : 1.0;
  w = w.cwiseMax(0.0);
  for (int it = 0; it < 20000; ++it) {
    const Eigen::VectorXd grad = gram * w - atb;
    Eigen::VectorXd next = (w - step * grad).cwiseMax(0.0);
    const double move = (next - w).norm();
    w = next;
    if (move <= 1e-13 * (1.0 + w.norm())) break;
  }
  return w;
}

}  // namespace

Reconstruction invert_lineshape(const MeasurementSet& set,
                                const std::vector<Measurement>& measured,
                                const ReconstructionConfig& cfg) {
  if (measured.size() != set.settings.size())
    throw SchemaError("one measurement per setting required");
  if (cfg.profile_grid.size() < 4)
    throw SchemaError("profile grid too short to regularize");
  for (const auto& m : measured) {
    if (m.pattern.axis != PatternAxis::detuning)
      throw SchemaError("measurements must be on the detuning axis");
    if (m.pattern.grid != measured.front().pattern.grid)
      throw SchemaError("measurements must share one x grid");
    if (!m.sigma.empty() && m.sigma.size() != m.pattern.grid.size())
      throw SchemaError("noise vector length does not match the x grid");
  }
  const std::vector<double>& x_grid = measured.front().pattern.grid;
  const DesignMatrix dm = build_design_matrix(set, x_grid, cfg.profile_grid);

  Stacked sys;
  sys.a.resize(dm.rows, dm.cols);
  sys.b.resize(dm.rows);
  for (std::size_t s = 0; s < measured.size(); ++s) {
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const std::size_t row = s * x_grid.size() + i;
      double wgt = 1.0;
      if (!measured[s].sigma.empty()) {
        const double sg = measured[s].sigma[i];
        if (!(sg > 0.0)) throw SchemaError("noise sigma must be positive");
        wgt = 1.0 / sg;
      }
      sys.b(row) = wgt * measured[s].pattern.values[i];
      for (std::size_t j = 0; j < dm.cols; ++j)
        sys.a(row, j) = wgt * dm.a[row * dm.cols + j];
    }
  }
  sys.l = Eigen::MatrixXd::Zero(dm.cols - 2, dm.cols);
  for (std::size_t j = 0; j + 2 < dm.cols; ++j) {
    sys.l(j, j) = 1.0;
    sys.l(j, j + 1) = -2.0;
    sys.l(j, j + 2) = 1.0;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.a);
  const double smax = svd.singularValues()(0);
  const int rank =
      (svd.setThreshold(1e-12), static_cast<int>(svd.rank()));
  if (rank < static_cast<int>(dm.cols) && !(cfg.lambda > 0.0) &&
      cfg.lambda >= 0.0) {
    std::ostringstream os;
    os << "design matrix rank " << rank << " below " << dm.cols
       << " unknowns with no regularization";
    throw IllPosed(os.str());
  }

  Reconstruction rec;
  auto residual_of = [&](const Eigen::VectorXd& w) {
    return (sys.a * w - sys.b).norm();
  };

  double lambda = cfg.lambda;
  if (lambda < 0.0) {
    std::vector<double> lgrid = cfg.lambda_grid;
    if (lgrid.empty()) {
      const int npts = std::max(5, cfg.lcurve_points);
      const double l_hi = 10.0 * smax;
      const double l_lo = 1e-10 * smax;
      for (int i = 0; i < npts; ++i) {
        lgrid.push_back(
            l_lo * std::pow(l_hi / l_lo, static_cast<double>(i) / (npts - 1)));
      }
    }
    rec.lcurve.resize(lgrid.size());
    for (std::size_t i = 0; i < lgrid.size(); ++i) {
      const Eigen::VectorXd w =
          solve_tikhonov(sys, lgrid[i], cfg.nonnegativity);
      rec.lcurve[i].lambda = lgrid[i];
      rec.lcurve[i].residual = residual_of(w);
      rec.lcurve[i].seminorm = (sys.l * w).norm();
    }
    // Corner: maximum curvature of (log residual, log seminorm) against
    // log lambda, by centered differences.
    const double tiny = 1e-300;
    std::size_t best = rec.lcurve.size() / 2;
    double best_curv = -1e300;
    for (std::size_t i = 1; i + 1 < rec.lcurve.size(); ++i) {
      const auto& pm = rec.lcurve[i - 1];
      const auto& p0 = rec.lcurve[i];
      const auto& pp = rec.lcurve[i + 1];
      const double tm = std::log(pm.lambda);
      const double t0 = std::log(p0.lambda);
      const double tp = std::log(pp.lambda);
      const double xm = std::log(pm.residual + tiny);
      const double x0 = std::log(p0.residual + tiny);
      const double xp = std::log(pp.residual + tiny);
      const double ym = std::log(pm.seminorm + tiny);
      const double y0 = std::log(p0.seminorm + tiny);
      const double yp = std::log(pp.seminorm + tiny);
      const double hm = t0 - tm;
      const double hp = tp - t0;
      const double dx = (xp - xm) / (hp + hm);
      const double dy = (yp - ym) / (hp + hm);
      const double ddx = 2.0 * (hm * xp - (hp + hm) * x0 + hp * xm) /
                         (hp * hm * (hp + hm));
      const double ddy = 2.0 * (hm * yp - (hp + hm) * y0 + hp * ym) /
                         (hp * hm * (hp + hm));
      const double denom = std::pow(dx * dx + dy * dy, 1.5);
      const double curv = denom > 0.0 ? (dx * ddy - dy * ddx) / denom : 0.0;
      rec.lcurve[i].curvature = curv;
      if (curv > best_curv) {
        best_curv = curv;
        best = i;
      }
    }
    lambda = rec.lcurve[best].lambda;
  }

  const Eigen::VectorXd w = solve_tikhonov(sys, lambda, cfg.nonnegativity);
  rec.lambda = lambda;
  rec.rank = rank;
  rec.residual = residual_of(w);
  rec.profile.kind = LineProfile::Kind::table;
  rec.profile.grid = cfg.profile_grid;
  rec.profile.weights.assign(w.data(), w.data() + w.size());
  return rec;
}

FringePattern angular_to_detuning(const FringePattern& pattern,
                                  const BesselMode& b1, const BesselMode& b2,
                                  const AtomBeam& atom, double delta0,
                                  double cos_floor) {
  if (pattern.axis != PatternAxis::theta)
    throw SchemaError("angular_to_detuning expects a theta-axis pattern");
  const double rs2 = 2.0 * atom.mass_i * delta0;
  if (!(rs2 > 0.0)) throw NoSolution("no energy shell at the nominal detuning");
  const double rs = std::sqrt(rs2);
  const double kz = b1.kz + b2.kz;

  FringePattern out;
  out.axis = PatternAxis::detuning;
  out.boundary_cutoff = pattern.boundary_cutoff;
  out.excluded_fraction = pattern.excluded_fraction;
  for (std::size_t i = 0; i < pattern.grid.size(); ++i) {
    const double th = pattern.grid[i];
    const double c = std::cos(th);
    if (std::fabs(c) < cos_floor) continue;
    const double kp = rs * std::sin(th);
    out.grid.push_back((kp * kp + kz * kz) / (2.0 * atom.mass_i));
    out.values.push_back(pattern.values[i] / (rs * std::fabs(c)));
  }
  return out;
}

}  // namespace twistkin
