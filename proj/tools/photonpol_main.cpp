// photonpol: command-line driver for the polarization experiments.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "photonpol/error.hpp"
#include "photonpol/experiment.hpp"

namespace ex = photonpol::experiment;
using nlohmann::json;

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> out, format, grid, velocities, omegas, polarization;
  std::optional<std::uint64_t> seed;
  std::optional<double> omega, k_a, delta_z, delta_r, truncation, rms_tilt;
  std::optional<std::string> a, theta, phi;
  std::optional<int> b_steps, mc_samples, random_packets;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON configuration file");
  sub->add_option("--out", f.out, "Output file (default: stdout)");
  sub->add_option("--format", f.format, "json or csv");
  sub->add_option("--grid", f.grid, "Node counts nz,nr,nphi");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--omega", f.omega, "Relative transverse spread delta_r / k_A");
  sub->add_option("--k-a", f.k_a, "Central momentum k_A");
  sub->add_option("--delta-z", f.delta_z, "Longitudinal momentum spread");
  sub->add_option("--delta-r", f.delta_r, "Transverse momentum spread");
  sub->add_option("--truncation", f.truncation, "Grid half-width in units of the spreads");
  sub->add_option("--polarization", f.polarization, "plus, minus or linear:<angle>");
  sub->add_option("--velocities", f.velocities, "Observer velocities: list or start:stop:count");
}

// Flags patch the configuration file; absent flags leave it untouched.
json overlay(json config, const std::string& mode, const Flags& f) {
  config["mode"] = mode;
  json& packet = config["packet"];
  if (!packet.is_object()) packet = json::object();
  if (f.out) config["out"] = *f.out;
  if (f.format) config["format"] = *f.format;
  if (f.grid) config["grid"] = *f.grid;
  if (f.seed) config["seed"] = *f.seed;
  if (f.k_a) packet["k_A"] = *f.k_a;
  if (f.delta_r) {
    packet.erase("omega");
    packet["delta_r"] = *f.delta_r;
  }
  if (f.omega) packet["omega"] = *f.omega;
  if (f.delta_z) packet["delta_z"] = *f.delta_z;
  if (f.truncation) packet["truncation"] = *f.truncation;
  if (f.polarization) packet["polarization"] = *f.polarization;
  if (f.velocities) config["velocities"] = *f.velocities;
  if (f.omegas) config["omegas"] = *f.omegas;
  if (f.mc_samples) config["mc_samples"] = *f.mc_samples;
  if (f.random_packets) config["random_packets"] = *f.random_packets;
  if (f.a || f.theta || f.phi || f.b_steps || f.rms_tilt) {
    json& cl = config["classical"];
    if (!cl.is_object()) cl = json::object();
    if (f.a) cl["a"] = *f.a;
    if (f.theta) cl["theta"] = *f.theta;
    if (f.phi) cl["phi"] = *f.phi;
    if (f.b_steps) cl["b_steps"] = *f.b_steps;
    if (f.rms_tilt) cl["rms_tilt"] = *f.rms_tilt;
  }
  return config;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ex::ConfigError("config", "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ex::ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization of photon wave packets under boosts"};
  app.require_subcommand(1);
  Flags f;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"classical", "Malus-law flux for a tilted plane wave or a Gaussian beam"},
      {"rho", "Reduced polarization matrix of a packet, optionally boosted"},
      {"pe-scan", "Helstrom error of the helicity pair against Omega"},
      {"doppler-scan", "Boosted Helstrom error ratio against velocity"},
      {"reconstruct", "Off-diagonal entries from POVM expectations"},
      {"cp-witness", "Distinguishability gain under a boost"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, f);
    const std::string name = s.name;
    if (name == "classical") {
      sub->add_option("--a", f.a, "Polarization angle (e.g. 30deg)");
      sub->add_option("--theta", f.theta, "Tilt of the wave vector");
      sub->add_option("--phi", f.phi, "Azimuth of the wave vector");
      sub->add_option("--b-steps", f.b_steps, "Detector angles sampled over [-pi/2, pi/2)");
      sub->add_option("--rms-tilt", f.rms_tilt, "Gaussian beam angular spread (radians)");
    }
    if (name == "rho") sub->add_option("--mc-samples", f.mc_samples, "Monte Carlo cross-check samples");
    if (name == "pe-scan") sub->add_option("--omega-range", f.omegas, "Omega values: list or start:stop:count");
    if (name == "reconstruct")
      sub->add_option("--random-packets", f.random_packets, "Number of random seeded packets");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  ex::ExperimentConfig config;
  try {
    config = ex::ExperimentConfig::from_json(overlay(load_config(f.config_path), mode, f));
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const photonpol::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return ex::run(config, std::cerr);
}
