#include "twistkin/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "twistkin/errors.hpp"
#include "twistkin/kinematics.hpp"

namespace twistkin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw SchemaError(msg); }

std::string where_key(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    fail((where.empty() ? std::string("config") : where) +
         " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail("unknown key '" + it.key() + "' in " +
           (where.empty() ? std::string("config") : where));
    }
  }
}

double num_at(const json& o, const char* key, const std::string& where) {
  const auto it = o.find(key);
  if (it == o.end()) fail(where_key(where, key) + " is required");
  if (!it->is_number()) fail(where_key(where, key) + " must be a number");
  return it->get<double>();
}

double num_or(const json& o, const char* key, const std::string& where,
              double dflt) {
  const auto it = o.find(key);
  if (it == o.end()) return dflt;
  if (!it->is_number()) fail(where_key(where, key) + " must be a number");
  return it->get<double>();
}

long long int_at(const json& o, const char* key, const std::string& where) {
  const auto it = o.find(key);
  if (it == o.end()) fail(where_key(where, key) + " is required");
  if (!it->is_number_integer())
    fail(where_key(where, key) + " must be an integer");
  return it->get<long long>();
}

long long int_or(const json& o, const char* key, const std::string& where,
                 long long dflt) {
  const auto it = o.find(key);
  if (it == o.end()) return dflt;
  if (!it->is_number_integer())
    fail(where_key(where, key) + " must be an integer");
  return it->get<long long>();
}

std::uint64_t u64_or(const json& o, const char* key, const std::string& where,
                     std::uint64_t dflt) {
  const auto it = o.find(key);
  if (it == o.end()) return dflt;
  if (!it->is_number_integer() || (it->is_number_integer() &&
                                   !it->is_number_unsigned() &&
                                   it->get<long long>() < 0))
    fail(where_key(where, key) + " must be a non-negative integer");
  return it->get<std::uint64_t>();
}

bool bool_or(const json& o, const char* key, const std::string& where,
             bool dflt) {
  const auto it = o.find(key);
  if (it == o.end()) return dflt;
  if (!it->is_boolean()) fail(where_key(where, key) + " must be a boolean");
  return it->get<bool>();
}

std::string str_at(const json& o, const char* key, const std::string& where) {
  const auto it = o.find(key);
  if (it == o.end()) fail(where_key(where, key) + " is required");
  if (!it->is_string()) fail(where_key(where, key) + " must be a string");
  return it->get<std::string>();
}

std::string str_or(const json& o, const char* key, const std::string& where,
                   const std::string& dflt) {
  const auto it = o.find(key);
  if (it == o.end()) return dflt;
  if (!it->is_string()) fail(where_key(where, key) + " must be a string");
  return it->get<std::string>();
}

std::vector<double> dvec_at(const json& o, const char* key,
                            const std::string& where) {
  const auto it = o.find(key);
  if (it == o.end()) fail(where_key(where, key) + " is required");
  if (!it->is_array())
    fail(where_key(where, key) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number())
      fail(where_key(where, key) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Vec3 vec3_or(const json& o, const char* key, const std::string& where,
             const Vec3& dflt) {
  const auto it = o.find(key);
  if (it == o.end()) return dflt;
  if (!it->is_array() || it->size() != 3)
    fail(where_key(where, key) + " must be an array of 3 numbers");
  const std::vector<double> v = dvec_at(o, key, where);
  return Vec3{v[0], v[1], v[2]};
}

BesselMode parse_mode(const json& o, const std::string& where) {
  check_keys(o, where, {"omega", "kz", "kappa", "m", "mass"});
  BesselMode b;
  b.omega = num_at(o, "omega", where);
  b.kz = num_at(o, "kz", where);
  b.kappa = num_at(o, "kappa", where);
  b.m = static_cast<int>(int_at(o, "m", where));
  b.mass = num_or(o, "mass", where, 0.0);
  return b;
}

AtomBeam parse_atom(const json& o) {
  check_keys(o, "atom", {"mass", "p", "e_exc", "relativistic"});
  AtomBeam a;
  a.mass_i = num_at(o, "mass", "atom");
  a.p = vec3_or(o, "p", "atom", Vec3{0.0, 0.0, 0.0});
  a.E_exc = num_at(o, "e_exc", "atom");
  a.relativistic = bool_or(o, "relativistic", "atom", false);
  return a;
}

complexd parse_complex(const json& o, const char* key,
                       const std::string& where, complexd dflt) {
  const auto it = o.find(key);
  if (it == o.end()) return dflt;
  if (!it->is_array() || it->size() != 2)
    fail(where_key(where, key) + " must be [re, im]");
  const std::vector<double> v = dvec_at(o, key, where);
  return complexd{v[0], v[1]};
}

PWAmplitudeModel parse_amplitude(const json& o) {
  check_keys(o, "amplitude", {"kind", "m0", "phase_ab", "table"});
  PWAmplitudeModel m;
  const std::string kind = str_or(o, "kind", "amplitude", "constant");
  if (kind == "constant") {
    m.kind = PWAmplitudeModel::Kind::constant;
  } else if (kind == "relative_phase") {
    m.kind = PWAmplitudeModel::Kind::relative_phase;
  } else if (kind == "user_table") {
    m.kind = PWAmplitudeModel::Kind::user_table;
  } else {
    fail("amplitude.kind must be constant, relative_phase or user_table");
  }
  m.m0 = parse_complex(o, "m0", "amplitude", complexd{1.0, 0.0});
  m.phase_ab = num_or(o, "phase_ab", "amplitude", 0.0);
  if (o.contains("table")) {
    const json& t = o.at("table");
    check_keys(t, "amplitude.table", {"n1", "n2", "re", "im"});
    m.table_n1 = static_cast<int>(int_at(t, "n1", "amplitude.table"));
    m.table_n2 = static_cast<int>(int_at(t, "n2", "amplitude.table"));
    const std::vector<double> re = dvec_at(t, "re", "amplitude.table");
    const std::vector<double> im = dvec_at(t, "im", "amplitude.table");
    if (re.size() != im.size())
      fail("amplitude.table re and im must have equal length");
    m.table.resize(re.size());
    for (std::size_t i = 0; i < re.size(); ++i)
      m.table[i] = complexd{re[i], im[i]};
  } else if (m.kind == PWAmplitudeModel::Kind::user_table) {
    fail("amplitude.table is required for kind user_table");
  }
  return m;
}

GridSpec parse_grid(const json& o, const std::string& where) {
  check_keys(o, where, {"lo", "hi", "n"});
  GridSpec g;
  g.lo = num_at(o, "lo", where);
  g.hi = num_at(o, "hi", where);
  g.n = static_cast<int>(int_at(o, "n", where));
  return g;
}

ScanSpec parse_scan(const json& o) {
  check_keys(o, "scan",
             {"lo", "hi", "n", "rel_tol", "trim", "min_panels", "max_panels"});
  ScanSpec s;
  s.lo = num_or(o, "lo", "scan", kUnsetD);
  s.hi = num_or(o, "hi", "scan", kUnsetD);
  s.n = static_cast<int>(int_or(o, "n", "scan", s.n));
  s.rel_tol = num_or(o, "rel_tol", "scan", s.rel_tol);
  s.trim = num_or(o, "trim", "scan", s.trim);
  s.min_panels = static_cast<int>(int_or(o, "min_panels", "scan", s.min_panels));
  s.max_panels = static_cast<int>(int_or(o, "max_panels", "scan", s.max_panels));
  if (s.n < 1) fail("scan.n must be >= 1");
  if (is_set(s.lo) != is_set(s.hi)) fail("scan.lo and scan.hi come together");
  if (is_set(s.lo) && !(s.lo < s.hi) && s.n > 1)
    fail("scan.lo must be < scan.hi");
  return s;
}

OutputSpec parse_output(const json& o) {
  check_keys(o, "output", {"format", "svg"});
  OutputSpec out;
  out.format = str_or(o, "format", "output", out.format);
  if (out.format != "csv" && out.format != "json")
    fail("output.format must be csv or json");
  out.svg = bool_or(o, "svg", "output", out.svg);
  return out;
}

ForwardSpec parse_forward(const json& o) {
  check_keys(o, "lineshape_forward", {"profile", "settings"});
  ForwardSpec f;
  if (!o.contains("profile")) fail("lineshape_forward.profile is required");
  const json& p = o.at("profile");
  check_keys(p, "lineshape_forward.profile",
             {"kind", "center", "width", "grid", "weights"});
  f.profile.kind = str_or(p, "kind", "lineshape_forward.profile", "lorentzian");
  f.profile.center = num_or(p, "center", "lineshape_forward.profile", 0.0);
  f.profile.width = num_or(p, "width", "lineshape_forward.profile", kUnsetD);
  if (!p.contains("grid")) fail("lineshape_forward.profile.grid is required");
  f.profile.grid = parse_grid(p.at("grid"), "lineshape_forward.profile.grid");
  if (p.contains("weights"))
    f.profile.weights = dvec_at(p, "weights", "lineshape_forward.profile");
  const auto it = o.find("settings");
  if (it == o.end()) fail("lineshape_forward.settings is required");
  if (!it->is_array() || it->empty())
    fail("lineshape_forward.settings must be a non-empty array of [m1, m2]");
  for (const auto& s : *it) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() ||
        !s[1].is_number_integer())
      fail("lineshape_forward.settings entries must be [m1, m2] integers");
    f.settings.push_back(MeasurementSetting{s[0].get<int>(), s[1].get<int>()});
  }
  return f;
}

InvertSpec parse_invert(const json& o) {
  check_keys(o, "lineshape_invert",
             {"input", "profile_grid", "lambda", "nonneg", "lcurve_points"});
  InvertSpec v;
  v.input = str_at(o, "input", "lineshape_invert");
  if (!o.contains("profile_grid"))
    fail("lineshape_invert.profile_grid is required");
  v.profile_grid =
      parse_grid(o.at("profile_grid"), "lineshape_invert.profile_grid");
  v.lambda = num_or(o, "lambda", "lineshape_invert", v.lambda);
  v.nonneg = bool_or(o, "nonneg", "lineshape_invert", v.nonneg);
  v.lcurve_points = static_cast<int>(
      int_or(o, "lcurve_points", "lineshape_invert", v.lcurve_points));
  return v;
}

SmearSpec parse_smear(const json& o) {
  check_keys(o, "smear",
             {"sigma_p", "kind", "n_quad", "n_mc", "method", "ladder_n",
              "ladder_max", "threshold", "sigma_hi"});
  SmearSpec s;
  s.sigma_p = vec3_or(o, "sigma_p", "smear", s.sigma_p);
  s.kind = str_or(o, "kind", "smear", s.kind);
  if (s.kind != "rest" && s.kind != "crossed")
    fail("smear.kind must be rest or crossed");
  s.n_quad = static_cast<int>(int_or(o, "n_quad", "smear", s.n_quad));
  s.n_mc = static_cast<int>(int_or(o, "n_mc", "smear", s.n_mc));
  s.method = str_or(o, "method", "smear", s.method);
  if (s.method != "auto" && s.method != "quadrature" && s.method != "mc")
    fail("smear.method must be auto, quadrature or mc");
  s.ladder_n = static_cast<int>(int_or(o, "ladder_n", "smear", s.ladder_n));
  s.ladder_max = num_or(o, "ladder_max", "smear", kUnsetD);
  s.threshold = num_or(o, "threshold", "smear", kUnsetD);
  s.sigma_hi = num_or(o, "sigma_hi", "smear", kUnsetD);
  if (is_set(s.threshold) && !is_set(s.sigma_hi))
    fail("smear.threshold needs smear.sigma_hi for the search range");
  return s;
}

RunConfig parse_json(const json& root) {
  check_keys(root, "",
             {"photon1", "photon2", "atom", "amplitude", "scan", "output",
              "regularization", "seed", "threads", "kernel", "geometry",
              "window", "fringes", "angular", "azimuthal", "crossed", "events",
              "oracle", "lineshape_forward", "lineshape_invert", "smear"});
  RunConfig cfg;
  if (!root.contains("photon1")) fail("photon1 is required");
  if (!root.contains("photon2")) fail("photon2 is required");
  if (!root.contains("atom")) fail("atom is required");
  cfg.photon1 = parse_mode(root.at("photon1"), "photon1");
  cfg.photon2 = parse_mode(root.at("photon2"), "photon2");
  cfg.atom = parse_atom(root.at("atom"));
  if (root.contains("amplitude"))
    cfg.amplitude = parse_amplitude(root.at("amplitude"));
  if (root.contains("scan")) cfg.scan = parse_scan(root.at("scan"));
  if (root.contains("output")) cfg.output = parse_output(root.at("output"));
  if (root.contains("regularization")) {
    const json& r = root.at("regularization");
    check_keys(r, "regularization", {"eps_boundary", "ring_sigma"});
    cfg.eps_boundary = num_or(r, "eps_boundary", "regularization", -1.0);
    cfg.ring_sigma = num_or(r, "ring_sigma", "regularization", -1.0);
  }
  cfg.seed = u64_or(root, "seed", "", cfg.seed);
  cfg.threads = static_cast<int>(int_or(root, "threads", "", cfg.threads));
  if (cfg.threads < 0) fail("threads must be >= 0");
  const std::string kern = str_or(root, "kernel", "", "auto");
  if (kern == "auto") {
    cfg.kernel = KernelChoice::automatic;
  } else if (kern == "scalar") {
    cfg.kernel = KernelChoice::scalar;
  } else if (kern == "avx2") {
    cfg.kernel = KernelChoice::avx2;
  } else {
    fail("kernel must be auto, scalar or avx2");
  }
  if (root.contains("window")) check_keys(root.at("window"), "window", {});
  if (root.contains("fringes")) check_keys(root.at("fringes"), "fringes", {});
  if (root.contains("crossed")) check_keys(root.at("crossed"), "crossed", {});
  if (root.contains("geometry")) {
    const json& g = root.at("geometry");
    check_keys(g, "geometry", {"k_perp", "phi_k"});
    GeometrySpec s;
    s.k_perp = num_or(g, "k_perp", "geometry", kUnsetD);
    s.phi_k = num_or(g, "phi_k", "geometry", 0.0);
    cfg.geometry = s;
  }
  if (root.contains("angular")) {
    const json& g = root.at("angular");
    check_keys(g, "angular", {"delta", "n_theta"});
    AngularSpec s;
    s.delta = num_or(g, "delta", "angular", kUnsetD);
    s.n_theta = static_cast<int>(int_or(g, "n_theta", "angular", s.n_theta));
    cfg.angular = s;
  }
  if (root.contains("azimuthal")) {
    const json& g = root.at("azimuthal");
    check_keys(g, "azimuthal", {"k_perp", "n_phi"});
    AzimuthalSpec s;
    s.k_perp = num_or(g, "k_perp", "azimuthal", kUnsetD);
    s.n_phi = static_cast<int>(int_or(g, "n_phi", "azimuthal", s.n_phi));
    cfg.azimuthal = s;
  }
  if (root.contains("events")) {
    const json& g = root.at("events");
    check_keys(g, "events", {"n", "bins"});
    EventsSpec s;
    s.n = u64_or(g, "n", "events", s.n);
    s.bins = static_cast<int>(int_or(g, "bins", "events", s.bins));
    cfg.events = s;
  }
  if (root.contains("oracle")) {
    const json& g = root.at("oracle");
    check_keys(g, "oracle", {"k_perp", "phi_k", "sigma", "halvings"});
    OracleSpec s;
    s.k_perp = num_or(g, "k_perp", "oracle", kUnsetD);
    s.phi_k = num_or(g, "phi_k", "oracle", s.phi_k);
    s.sigma = num_or(g, "sigma", "oracle", kUnsetD);
    s.halvings = static_cast<int>(int_or(g, "halvings", "oracle", s.halvings));
    cfg.oracle = s;
  }
  if (root.contains("lineshape_forward"))
    cfg.lineshape_forward = parse_forward(root.at("lineshape_forward"));
  if (root.contains("lineshape_invert"))
    cfg.lineshape_invert = parse_invert(root.at("lineshape_invert"));
  if (root.contains("smear")) cfg.smear = parse_smear(root.at("smear"));

  validate_mode(cfg.photon1);
  validate_mode(cfg.photon2);
  validate_atom(cfg.atom);
  validate_model(cfg.amplitude);
  return cfg;
}

json mode_json(const BesselMode& b) {
  json o;
  o["omega"] = b.omega;
  o["kz"] = b.kz;
  o["kappa"] = b.kappa;
  o["m"] = b.m;
  o["mass"] = b.mass;
  return o;
}

void put_if_set(json& o, const char* key, double v) {
  if (is_set(v)) o[key] = v;
}

}  // namespace

std::vector<double> GridSpec::points() const {
  if (!is_set(lo) || !is_set(hi)) fail("grid lo and hi are required");
  if (n < 1) fail("grid n must be >= 1");
  if (n == 1) return {lo};
  if (!(lo < hi)) fail("grid lo must be < hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

LineProfile ProfileSpec::make() const {
  const std::vector<double> pts = grid.points();
  if (kind == "delta") return delta_profile(pts, center);
  if (kind == "lorentzian") {
    if (!is_set(width) || !(width > 0.0))
      fail("lorentzian profile needs width > 0");
    return lorentzian_profile(pts, center, width);
  }
  if (kind == "gaussian") {
    if (!is_set(width) || !(width > 0.0))
      fail("gaussian profile needs width > 0");
    return gaussian_profile(pts, center, width);
  }
  if (kind == "table") {
    if (weights.size() != pts.size())
      fail("table profile weights must match the grid length");
    LineProfile p;
    p.kind = LineProfile::Kind::table;
    p.grid = pts;
    p.weights = weights;
    validate_profile(p);
    return p;
  }
  fail("profile kind must be delta, lorentzian, gaussian or table");
}

MomentumSpread SmearSpec::spread(std::uint64_t seed) const {
  MomentumSpread sp;
  sp.sigma_p = sigma_p;
  sp.n_quad = n_quad;
  sp.n_mc = n_mc;
  sp.seed = seed;
  sp.method = method == "quadrature" ? SmearMethod::quadrature
              : method == "mc"       ? SmearMethod::mc
                                     : SmearMethod::automatic;
  return sp;
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_json(root);
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string canonical_config(const RunConfig& cfg) {
  json root;
  root["photon1"] = mode_json(cfg.photon1);
  root["photon2"] = mode_json(cfg.photon2);
  json atom;
  atom["mass"] = cfg.atom.mass_i;
  atom["p"] = {cfg.atom.p.x, cfg.atom.p.y, cfg.atom.p.z};
  atom["e_exc"] = cfg.atom.E_exc;
  atom["relativistic"] = cfg.atom.relativistic;
  root["atom"] = atom;
  json amp;
  amp["kind"] = cfg.amplitude.kind == PWAmplitudeModel::Kind::constant
                    ? "constant"
                : cfg.amplitude.kind == PWAmplitudeModel::Kind::relative_phase
                    ? "relative_phase"
                    : "user_table";
  amp["m0"] = {cfg.amplitude.m0.real(), cfg.amplitude.m0.imag()};
  amp["phase_ab"] = cfg.amplitude.phase_ab;
  if (cfg.amplitude.kind == PWAmplitudeModel::Kind::user_table) {
    json t;
    t["n1"] = cfg.amplitude.table_n1;
    t["n2"] = cfg.amplitude.table_n2;
    json re = json::array();
    json im = json::array();
    for (const complexd& c : cfg.amplitude.table) {
      re.push_back(c.real());
      im.push_back(c.imag());
    }
    t["re"] = re;
    t["im"] = im;
    amp["table"] = t;
  }
  root["amplitude"] = amp;
  json scan;
  put_if_set(scan, "lo", cfg.scan.lo);
  put_if_set(scan, "hi", cfg.scan.hi);
  scan["n"] = cfg.scan.n;
  scan["rel_tol"] = cfg.scan.rel_tol;
  scan["trim"] = cfg.scan.trim;
  scan["min_panels"] = cfg.scan.min_panels;
  scan["max_panels"] = cfg.scan.max_panels;
  root["scan"] = scan;
  json out;
  out["format"] = cfg.output.format;
  out["svg"] = cfg.output.svg;
  root["output"] = out;
  json reg;
  reg["eps_boundary"] = cfg.eps_boundary;
  reg["ring_sigma"] = cfg.ring_sigma;
  root["regularization"] = reg;
  root["seed"] = cfg.seed;
  root["threads"] = cfg.threads;
  root["kernel"] = cfg.kernel == KernelChoice::automatic ? "auto"
                   : cfg.kernel == KernelChoice::scalar  ? "scalar"
                                                         : "avx2";
  if (cfg.geometry) {
    json g;
    put_if_set(g, "k_perp", cfg.geometry->k_perp);
    g["phi_k"] = cfg.geometry->phi_k;
    root["geometry"] = g;
  }
  if (cfg.angular) {
    json g;
    put_if_set(g, "delta", cfg.angular->delta);
    g["n_theta"] = cfg.angular->n_theta;
    root["angular"] = g;
  }
  if (cfg.azimuthal) {
    json g;
    put_if_set(g, "k_perp", cfg.azimuthal->k_perp);
    g["n_phi"] = cfg.azimuthal->n_phi;
    root["azimuthal"] = g;
  }
  if (cfg.events) {
    json g;
    g["n"] = cfg.events->n;
    g["bins"] = cfg.events->bins;
    root["events"] = g;
  }
  if (cfg.oracle) {
    json g;
    put_if_set(g, "k_perp", cfg.oracle->k_perp);
    g["phi_k"] = cfg.oracle->phi_k;
    put_if_set(g, "sigma", cfg.oracle->sigma);
    g["halvings"] = cfg.oracle->halvings;
    root["oracle"] = g;
  }
  if (cfg.lineshape_forward) {
    const ForwardSpec& f = *cfg.lineshape_forward;
    json p;
    p["kind"] = f.profile.kind;
    p["center"] = f.profile.center;
    put_if_set(p, "width", f.profile.width);
    json pg;
    pg["lo"] = f.profile.grid.lo;
    pg["hi"] = f.profile.grid.hi;
    pg["n"] = f.profile.grid.n;
    p["grid"] = pg;
    if (!f.profile.weights.empty()) p["weights"] = f.profile.weights;
    json sets = json::array();
    for (const MeasurementSetting& s : f.settings)
      sets.push_back({s.m1, s.m2});
    json g;
    g["profile"] = p;
    g["settings"] = sets;
    root["lineshape_forward"] = g;
  }
  if (cfg.lineshape_invert) {
    const InvertSpec& v = *cfg.lineshape_invert;
    json g;
    g["input"] = v.input;
    json pg;
    pg["lo"] = v.profile_grid.lo;
    pg["hi"] = v.profile_grid.hi;
    pg["n"] = v.profile_grid.n;
    g["profile_grid"] = pg;
    g["lambda"] = v.lambda;
    g["nonneg"] = v.nonneg;
    g["lcurve_points"] = v.lcurve_points;
    root["lineshape_invert"] = g;
  }
  if (cfg.smear) {
    const SmearSpec& s = *cfg.smear;
    json g;
    g["sigma_p"] = {s.sigma_p.x, s.sigma_p.y, s.sigma_p.z};
    g["kind"] = s.kind;
    g["n_quad"] = s.n_quad;
    g["n_mc"] = s.n_mc;
    g["method"] = s.method;
    g["ladder_n"] = s.ladder_n;
    put_if_set(g, "ladder_max", s.ladder_max);
    put_if_set(g, "threshold", s.threshold);
    put_if_set(g, "sigma_hi", s.sigma_hi);
    root["smear"] = g;
  }
  return root.dump(2);
}

}  // namespace twistkin
