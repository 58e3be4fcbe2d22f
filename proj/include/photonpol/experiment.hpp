#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "photonpol/photon_state.hpp"
#include "photonpol/polarization_povm.hpp"

namespace photonpol::experiment {

/// Invalid configuration; names the offending field. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Mode { Classical, Rho, PeScan, DopplerScan, Reconstruct, CpWitness };
enum class Format { Json, Csv };

std::string to_string(Mode m);

struct HelicityPolarization {
  int sign = 1;
};
struct LinearPolarization {
  double angle = 0.0;
};
struct CustomPolarization {
  cplx alpha_plus{1.0};
  cplx alpha_minus{0.0};
};
using PolarizationSpec = std::variant<HelicityPolarization, LinearPolarization, CustomPolarization>;

/// Packet description: grid, Gaussian widths and polarization.
struct PacketSpec {
  GridSpec grid;
  PolarizationSpec polarization = HelicityPolarization{};

  double omega() const { return grid.delta_r / grid.k_a; }
  /// Same packet with delta_r = omega * k_a and delta_z scaled to keep the ratio.
  PacketSpec with_omega(double omega) const;
};

struct ExperimentConfig {
  Mode mode = Mode::Rho;
  PacketSpec packet;
  std::vector<double> velocities;
  std::vector<double> omegas;

  // classical mode
  double a = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  int b_steps = 180;
  double rms_tilt = 0.0;  ///< > 0 averages over a Gaussian beam profile
  int profile_nodes = 64;

  int mc_samples = 0;
  int random_packets = 0;
  std::uint64_t seed = 1;

  Format format = Format::Json;
  std::string out_path;  ///< empty: stdout

  /// Parses and validates; throws ConfigError naming the field.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Angle given as a number (radians) or a string with a `deg`/`rad` suffix.
double parse_angle(const nlohmann::json& value, const std::string& field);

/// Values from "start:stop:count" or a comma separated list.
std::vector<double> parse_list(const std::string& text, const std::string& field);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Output {
  Mode mode;
  nlohmann::json metadata;  ///< config echo and grid resolution
  std::vector<Table> tables;
  nlohmann::json extra;     ///< JSON-only attachments (e.g. serialised matrices)
  std::vector<std::string> warnings;
};

/// Runs the experiment. Photon-state errors propagate as photonpol::Error.
Output compute(const ExperimentConfig& config);

/// CSV: per table a header row then one line per row, 17 significant digits,
/// tables separated by a blank line and introduced by `# <name>`.
std::string render(const Output& out, Format format);

/// compute + render + write. Returns 0 on success, 1 on numerical failure.
int run(const ExperimentConfig& config, std::ostream& diagnostics);

/// Matrix serialisation: nine re/im pairs row-major, trace and eigenvalues.
nlohmann::json matrix_to_json(const PolarizationMatrix& rho);
/// Inverse of matrix_to_json (validated as a polarization matrix).
PolarizationMatrix matrix_from_json(const nlohmann::json& j);

PhotonWavePacket build_packet(const PacketSpec& spec);
PhotonWavePacket build_packet(const PacketSpec& spec, std::shared_ptr<const MomentumGrid> grid);

}  // namespace photonpol::experiment
