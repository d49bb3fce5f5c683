#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "twistkin/config.hpp"
#include "twistkin/errors.hpp"
#include "twistkin/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kinematics of two twisted-photon absorption"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format;
  std::string kernel;
  bool svg = false;
  std::uint64_t seed = 0;
  int threads = 0;
  double eps_boundary = 0.0;
  double ring_sigma = 0.0;

  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--out", out_dir, "output directory (default .)");
  app.add_option("--format", format, "table format override")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--svg", svg, "also render SVG line plots");
  app.add_option("--seed", seed, "seed override");
  app.add_option("--threads", threads, "worker cap override (0 = all cores)");
  app.add_option("--eps-boundary", eps_boundary,
                 "annulus rim tolerance override");
  app.add_option("--ring-sigma", ring_sigma, "oracle ring width override");
  app.add_option("--kernel", kernel, "batch kernel override")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  const char* descs[][2] = {
      {"geometry", "triangle angles and the two azimuth assignments"},
      {"window", "rest and crossed-beam detuning windows"},
      {"fringes", "detuning scan with a fringe census"},
      {"angular", "kick polar-angle distribution at fixed detuning"},
      {"azimuthal", "density versus transfer azimuth"},
      {"crossed", "crossed-beam detuning scan"},
      {"events", "rejection-sampled transverse kicks"},
      {"oracle", "ring-regularized quadrature versus the closed form"},
      {"lineshape-forward", "patterns for a known line profile"},
      {"lineshape-invert", "profile reconstruction from measured patterns"},
      {"smear", "momentum-spread smearing and visibility"},
  };
  for (const auto& d : descs) app.add_subcommand(d[0], d[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    twistkin::RunConfig cfg = twistkin::parse_config(config_path);
    if (app.count("--format")) cfg.output.format = format;
    if (app.count("--svg")) cfg.output.svg = true;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--threads")) cfg.threads = threads;
    if (app.count("--eps-boundary")) cfg.eps_boundary = eps_boundary;
    if (app.count("--ring-sigma")) cfg.ring_sigma = ring_sigma;
    if (app.count("--kernel")) {
      cfg.kernel = kernel == "scalar" ? twistkin::KernelChoice::scalar
                   : kernel == "avx2" ? twistkin::KernelChoice::avx2
                                      : twistkin::KernelChoice::automatic;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const twistkin::RunResult res =
        twistkin::run_subcommand(name, cfg, out_dir);
    std::cout << res.resolved_json << "\n";
    for (const std::string& f : res.files)
      std::cout << "wrote " << out_dir << "/" << f << "\n";
    for (const std::string& n : res.notes) std::cerr << "note: " << n << "\n";
    return 0;
  } catch (const twistkin::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const twistkin::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
