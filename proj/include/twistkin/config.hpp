#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "twistkin/amplitude.hpp"
#include "twistkin/lineshape.hpp"
#include "twistkin/smearing.hpp"

// JSON run configuration. Sections photon1 / photon2 / atom / amplitude /
// scan / output / regularization plus one optional section per subcommand.
// Unknown keys anywhere are rejected, and the physical invariants of every
// referenced type are re-checked on load.

namespace twistkin {

constexpr double kUnsetD = std::numeric_limits<double>::quiet_NaN();

inline bool is_set(double v) { return v == v; }

struct GridSpec {
  double lo = kUnsetD;
  double hi = kUnsetD;
  int n = 0;
  std::vector<double> points() const;
};

struct ScanSpec {
  double lo = kUnsetD;  // unset: the subcommand picks its natural range
  double hi = kUnsetD;
  int n = 200;
  double rel_tol = 1e-6;
  double trim = -1.0;
  int min_panels = 64;
  int max_panels = 1 << 18;
};

struct OutputSpec {
  std::string format = "csv";  // csv or json
  bool svg = false;
};

struct GeometrySpec {
  double k_perp = kUnsetD;  // unset: annulus midpoint
  double phi_k = 0.0;
};

struct AngularSpec {
  double delta = kUnsetD;  // unset: midpoint of the rest window
  int n_theta = 181;
};

struct AzimuthalSpec {
  double k_perp = kUnsetD;  // unset: annulus midpoint
  int n_phi = 360;
};

struct EventsSpec {
  std::uint64_t n = 10000;
  int bins = 50;
};

struct OracleSpec {
  double k_perp = kUnsetD;  // unset: annulus midpoint
  double phi_k = 0.3;
  double sigma = kUnsetD;  // unset: the regularization ring_sigma default
  int halvings = 4;
};

struct ProfileSpec {
  std::string kind = "lorentzian";  // delta | lorentzian | gaussian | table
  double center = 0.0;
  double width = kUnsetD;  // gamma or sigma; unused for delta and table
  GridSpec grid;
  std::vector<double> weights;  // table only
  LineProfile make() const;
};

struct ForwardSpec {
  ProfileSpec profile;
  std::vector<MeasurementSetting> settings;
};

struct InvertSpec {
  std::string input;  // CSV path: setting,m1,m2,x,rate,sigma
  GridSpec profile_grid;
  double lambda = -1.0;
  bool nonneg = false;
  int lcurve_points = 25;
};

struct SmearSpec {
  Vec3 sigma_p{0.0, 0.0, 0.0};
  std::string kind = "rest";  // rest | crossed
  int n_quad = 12;
  int n_mc = 512;
  std::string method = "auto";  // auto | quadrature | mc
  int ladder_n = 10;
  double ladder_max = kUnsetD;  // unset: 2 * max component of sigma_p
  double threshold = kUnsetD;   // set: also solve for the tolerable spread
  double sigma_hi = kUnsetD;
  MomentumSpread spread(std::uint64_t seed) const;
};

enum class KernelChoice { automatic, scalar, avx2 };

struct RunConfig {
  BesselMode photon1;
  BesselMode photon2;
  AtomBeam atom;
  PWAmplitudeModel amplitude;
  ScanSpec scan;
  OutputSpec output;
  std::uint64_t seed = 1;
  int threads = 1;
  KernelChoice kernel = KernelChoice::automatic;
  double eps_boundary = -1.0;
  double ring_sigma = -1.0;  // unset: 1e-3 * min(kappa1, kappa2)
  std::optional<GeometrySpec> geometry;
  std::optional<AngularSpec> angular;
  std::optional<AzimuthalSpec> azimuthal;
  std::optional<EventsSpec> events;
  std::optional<OracleSpec> oracle;
  std::optional<ForwardSpec> lineshape_forward;
  std::optional<InvertSpec> lineshape_invert;
  std::optional<SmearSpec> smear;
};

// Parse and fully validate a JSON config. Throws SchemaError for malformed
// JSON, unknown keys, wrong types or missing required keys; PhysicsError
// (via the module validators) for violated physical invariants.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Canonical JSON echo of the config with every default materialized; the
// manifest embeds it and hashes it, and feeding it back through
// parse_config_text reproduces the run.
std::string canonical_config(const RunConfig& cfg);

}  // namespace twistkin
