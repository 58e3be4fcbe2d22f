#include "photonpol/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "photonpol/boost_channel.hpp"
#include "photonpol/classical_beam.hpp"
#include "photonpol/error.hpp"

namespace photonpol::experiment {

using nlohmann::json;

namespace {

constexpr double kDefaultOmega = 0.02;
constexpr double kDefaultDeltaZRatio = 0.1;

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

int positive_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
  const auto x = j.get<long long>();
  if (x <= 0 || x > 1'000'000'000) throw ConfigError(field, "must be a positive integer");
  return static_cast<int>(x);
}

int nonnegative_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
  const auto x = j.get<long long>();
  if (x < 0 || x > 1'000'000'000) throw ConfigError(field, "must be a nonnegative integer");
  return static_cast<int>(x);
}

cplx complex_pair(const json& j, const std::string& field) {
  if (j.is_number()) return {number(j, field), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError(field, "expected [re, im]");
  return {number(j[0], field), number(j[1], field)};
}

std::vector<double> number_list(const json& j, const std::string& field) {
  if (j.is_string()) return parse_list(j.get<std::string>(), field);
  if (j.is_number()) return {number(j, field)};
  if (!j.is_array()) throw ConfigError(field, "expected a list, a number or \"start:stop:count\"");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, field));
  return out;
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(item, &used);
      if (used != item.size() || n <= 0) throw std::invalid_argument(item);
      out.push_back(n);
    } catch (const std::exception&) {
      throw ConfigError("grid", "expected nz,nr,nphi positive integers, got '" + text + "'");
    }
  }
  if (out.size() != 3) throw ConfigError("grid", "expected three values nz,nr,nphi");
  return out;
}

PacketSpec parse_packet(const json& j) {
  PacketSpec p;
  if (!j.is_object()) throw ConfigError("packet", "expected an object");
  GridSpec& g = p.grid;
  if (j.contains("k_A")) g.k_a = number(j["k_A"], "packet.k_A");
  if (!(g.k_a > 0.0)) throw ConfigError("packet.k_A", "must be positive");

  double omega = kDefaultOmega;
  if (j.contains("delta_r")) omega = number(j["delta_r"], "packet.delta_r") / g.k_a;
  if (j.contains("omega")) omega = number(j["omega"], "packet.omega");
  if (!(omega > 0.0)) throw ConfigError(j.contains("omega") ? "packet.omega" : "packet.delta_r", "must be positive");
  g.delta_r = omega * g.k_a;

  double ratio = kDefaultDeltaZRatio;
  if (j.contains("delta_z_ratio")) ratio = number(j["delta_z_ratio"], "packet.delta_z_ratio");
  if (!(ratio > 0.0)) throw ConfigError("packet.delta_z_ratio", "must be positive");
  g.delta_z = ratio * g.delta_r;
  if (j.contains("delta_z")) g.delta_z = number(j["delta_z"], "packet.delta_z");
  if (!(g.delta_z > 0.0)) throw ConfigError("packet.delta_z", "must be positive");

  if (j.contains("n_z")) g.n_z = positive_int(j["n_z"], "packet.n_z");
  if (j.contains("n_r")) g.n_r = positive_int(j["n_r"], "packet.n_r");
  if (j.contains("n_phi")) g.n_phi = positive_int(j["n_phi"], "packet.n_phi");
  if (j.contains("truncation")) g.truncation = number(j["truncation"], "packet.truncation");
  if (!(g.truncation > 0.0)) throw ConfigError("packet.truncation", "must be positive");
  if (g.k_a - g.truncation * g.delta_z <= 0.0)
    throw ConfigError("packet.delta_z", "k_z window would reach k_z <= 0");

  if (j.contains("polarization")) {
    const json& pol = j["polarization"];
    if (pol.is_string()) {
      const auto s = pol.get<std::string>();
      if (s == "plus" || s == "+") p.polarization = HelicityPolarization{+1};
      else if (s == "minus" || s == "-") p.polarization = HelicityPolarization{-1};
      else if (s.rfind("linear:", 0) == 0)
        p.polarization = LinearPolarization{parse_angle(json(s.substr(7)), "packet.polarization")};
      else throw ConfigError("packet.polarization", "expected plus, minus or linear:<angle>");
    } else if (pol.is_object() && pol.contains("helicity")) {
      const json& h = pol["helicity"];
      if (!h.is_number_integer() || (h.get<int>() != 1 && h.get<int>() != -1))
        throw ConfigError("packet.polarization.helicity", "must be +1 or -1");
      p.polarization = HelicityPolarization{h.get<int>()};
    } else if (pol.is_object() && pol.contains("linear_angle")) {
      p.polarization = LinearPolarization{parse_angle(pol["linear_angle"], "packet.polarization.linear_angle")};
    } else if (pol.is_object() && pol.contains("custom")) {
      const json& c = pol["custom"];
      if (!c.is_object() || !c.contains("alpha_plus") || !c.contains("alpha_minus"))
        throw ConfigError("packet.polarization.custom", "needs alpha_plus and alpha_minus");
      CustomPolarization cp{complex_pair(c["alpha_plus"], "packet.polarization.custom.alpha_plus"),
                            complex_pair(c["alpha_minus"], "packet.polarization.custom.alpha_minus")};
      const double n = std::sqrt(std::norm(cp.alpha_plus) + std::norm(cp.alpha_minus));
      if (!(n > 0.0)) throw ConfigError("packet.polarization.custom", "zero polarization vector");
      cp.alpha_plus /= n;
      cp.alpha_minus /= n;
      p.polarization = cp;
    } else {
      throw ConfigError("packet.polarization", "expected {helicity}, {linear_angle} or {custom}");
    }
  }
  return p;
}

json packet_to_json(const PacketSpec& p) {
  json j = {{"k_A", p.grid.k_a},         {"delta_z", p.grid.delta_z}, {"delta_r", p.grid.delta_r},
            {"n_z", p.grid.n_z},         {"n_r", p.grid.n_r},         {"n_phi", p.grid.n_phi},
            {"truncation", p.grid.truncation}};
  std::visit(
      [&](const auto& pol) {
        using T = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<T, HelicityPolarization>) {
          j["polarization"] = {{"helicity", pol.sign}};
        } else if constexpr (std::is_same_v<T, LinearPolarization>) {
          j["polarization"] = {{"linear_angle", pol.angle}};
        } else {
          j["polarization"] = {{"custom",
                                {{"alpha_plus", {pol.alpha_plus.real(), pol.alpha_plus.imag()}},
                                 {"alpha_minus", {pol.alpha_minus.real(), pol.alpha_minus.imag()}}}}};
        }
      },
      p.polarization);
  return j;
}

json grid_json(const GridSpec& g) { return {{"n_z", g.n_z}, {"n_r", g.n_r}, {"n_phi", g.n_phi}}; }

std::vector<double> grid_columns(const GridSpec& g) {
  return {static_cast<double>(g.n_z), static_cast<double>(g.n_r), static_cast<double>(g.n_phi)};
}

double rel_dev(double value, double analytic) { return std::abs(value - analytic) / std::abs(analytic); }

// Leading-order rho for a helicity packet at relative spread omega.
CMat3 leading_order_rho(int sign, double omega) {
  const double o2 = omega * omega;
  CMat3 m;
  const double a = 0.5 * (1.0 - 0.5 * o2);
  m(0, 0) = a;
  m(1, 1) = a;
  m(0, 1) = cplx{0.0, -a};
  m(1, 0) = cplx{0.0, a};
  m(2, 2) = 0.5 * o2;
  return sign > 0 ? m : m.conj();
}

struct HelicityPair {
  PhotonWavePacket plus;
  PhotonWavePacket minus;
};

HelicityPair build_pair(const PacketSpec& spec) {
  auto grid = std::make_shared<const MomentumGrid>(MomentumGrid::make(spec.grid));
  const auto f = gaussian_amplitude(*grid, spec.grid.k_a, spec.grid.delta_z, spec.grid.delta_r);
  return {helicity_packet(grid, f, +1), helicity_packet(grid, f, -1)};
}

double pe_of(const PacketSpec& spec) {
  const auto pair = build_pair(spec);
  return helstrom_error(reduced_density_matrix(pair.plus), reduced_density_matrix(pair.minus));
}

template <class T, class F>
std::vector<T> parallel_map(const std::vector<double>& xs, F&& fn) {
  std::vector<std::future<T>> futures;
  futures.reserve(xs.size());
  for (double x : xs) futures.push_back(std::async(std::launch::async, fn, x));
  std::vector<T> out;
  out.reserve(xs.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

std::vector<double> join(std::initializer_list<std::vector<double>> parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// --- classical ---------------------------------------------------------------

Output run_classical(const ExperimentConfig& c) {
  Output out{Mode::Classical, {}, {}, {}, {}};
  const bool averaged = c.rms_tilt > 0.0;
  const int nodes = c.profile_nodes;
  const int half = std::max(2, nodes / 2);
  std::optional<classical::BeamProfile> full, coarse;
  if (averaged) {
    full = classical::BeamProfile::gaussian(c.rms_tilt, 5.0, nodes, nodes);
    coarse = classical::BeamProfile::gaussian(c.rms_tilt, 5.0, half, half);
  }
  const auto flux_at = [&](double b, bool use_coarse) {
    if (!averaged) return classical::detected_flux({c.theta, c.phi, c.a}, {b});
    return classical::beam_average_flux(use_coarse ? *coarse : *full, c.a, b);
  };

  Table flux{"flux", {"b", "flux", "flux_half", "n_theta", "n_phi"}, {}};
  double best_b = 0.0;
  double best = -1.0;
  for (int i = 0; i < c.b_steps; ++i) {
    const double b = -kPi / 2 + kPi * i / c.b_steps;
    const double value = flux_at(b, false);
    if (value > best) {
      best = value;
      best_b = b;
    }
    flux.rows.push_back({b, value, flux_at(b, true), averaged ? double(nodes) : 1.0,
                         averaged ? double(nodes) : 1.0});
  }
  out.tables.push_back(std::move(flux));

  // Analytic single-component forms, evaluated in the component's own frame.
  const double a_rel = c.a - c.phi;
  const double apparent = classical::apparent_angle(std::remainder(a_rel, kPi), c.theta) + c.phi;
  const double loss_analytic =
      averaged ? 0.5 * c.rms_tilt * c.rms_tilt : classical::loss_fraction({c.theta, c.phi, c.a});
  const double loss = 1.0 - (averaged ? classical::beam_average_flux(*full, c.a, c.a)
                                      : classical::detected_flux({c.theta, c.phi, c.a}, {c.a}));
  Table summary{"summary",
                {"a", "theta", "argmax_b", "apparent_angle_analytic", "apparent_deviation", "loss",
                 "loss_analytic", "loss_deviation"},
                {}};
  const double apparent_dev = std::abs(std::remainder(best_b - apparent, kPi));
  const double loss_dev = loss_analytic > 0.0 ? rel_dev(loss, loss_analytic) : std::abs(loss);
  summary.rows.push_back({c.a, c.theta, best_b, apparent, apparent_dev, loss, loss_analytic, loss_dev});
  out.tables.push_back(std::move(summary));

  if (!c.velocities.empty()) {
    Table tilt{"doppler_tilt", {"v", "theta", "theta_exact", "theta_small_angle", "rel_dev"}, {}};
    for (double v : c.velocities) {
      const BoostParameter b(v);
      const double exact = classical::doppler_tilt(c.theta, b, classical::TiltMode::Exact);
      const double small = classical::doppler_tilt(c.theta, b, classical::TiltMode::SmallAngle);
      tilt.rows.push_back({v, c.theta, exact, small, exact != 0.0 ? rel_dev(exact, small) : 0.0});
    }
    out.tables.push_back(std::move(tilt));
  }
  out.metadata["profile"] = averaged ? json{{"rms_tilt", c.rms_tilt}, {"n_theta", nodes}, {"n_phi", nodes}}
                                     : json("plane_wave");
  return out;
}

// --- rho ---------------------------------------------------------------------

struct McEstimate {
  CMat3 mean;
  std::array<double, 9> se_re{};
  std::array<double, 9> se_im{};
};

// Samples k from |f|^2 dmu for the Gaussian packet (truncated like the grid).
McEstimate monte_carlo_rho(const PacketSpec& spec, const PolarizationField::Amplitudes& alpha,
                           int samples, std::uint64_t seed) {
  const GridSpec& g = spec.grid;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(g.k_a, g.delta_z / std::sqrt(2.0));
  std::normal_distribution<double> r(0.0, g.delta_r / std::sqrt(2.0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double zmax = g.truncation * g.delta_z;
  const double rmax = g.truncation * g.delta_r;
  const double kmin = g.k_a - zmax;

  std::array<double, 9> sum_re{}, sum_im{}, sq_re{}, sq_im{};
  for (int s = 0; s < samples;) {
    const double kz = z(rng);
    const double kx = r(rng);
    const double ky = r(rng);
    const double kr = std::hypot(kx, ky);
    if (std::abs(kz - g.k_a) > zmax || kr > rmax) continue;
    if (u(rng) > kmin / std::hypot(kz, kr)) continue;  // 1/k0 factor of the measure
    const Direction dir(std::atan2(kr, kz), std::atan2(ky, kx));
    CVec3 amp;
    for (std::size_t m = 0; m < 3; ++m) {
      const TransversalPart t = transversal_part(dir, static_cast<Axis>(m));
      amp[m] = std::conj(t.plus) * alpha[0] + std::conj(t.minus) * alpha[1];
    }
    const CMat3 term = CMat3::outer(amp, amp);
    for (std::size_t i = 0; i < 9; ++i) {
      sum_re[i] += term.a[i].real();
      sum_im[i] += term.a[i].imag();
      sq_re[i] += term.a[i].real() * term.a[i].real();
      sq_im[i] += term.a[i].imag() * term.a[i].imag();
    }
    ++s;
  }
  McEstimate est;
  const double n = samples;
  for (std::size_t i = 0; i < 9; ++i) {
    const double mr = sum_re[i] / n;
    const double mi = sum_im[i] / n;
    est.mean.a[i] = {mr, mi};
    est.se_re[i] = std::sqrt(std::max(0.0, sq_re[i] / n - mr * mr) / (n - 1.0));
    est.se_im[i] = std::sqrt(std::max(0.0, sq_im[i] / n - mi * mi) / (n - 1.0));
  }
  return est;
}

PolarizationField::Amplitudes constant_alpha(const PolarizationSpec& p) {
  const double s = 1.0 / std::sqrt(2.0);
  return std::visit(
      [&](const auto& pol) -> PolarizationField::Amplitudes {
        using T = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<T, HelicityPolarization>) {
          return pol.sign > 0 ? PolarizationField::Amplitudes{1.0, 0.0}
                              : PolarizationField::Amplitudes{0.0, 1.0};
        } else if constexpr (std::is_same_v<T, LinearPolarization>) {
          return {s * std::polar(1.0, -pol.angle), s * std::polar(1.0, pol.angle)};
        } else {
          return {pol.alpha_plus, pol.alpha_minus};
        }
      },
      p);
}

Output run_rho(const ExperimentConfig& c) {
  Output out{Mode::Rho, {}, {}, json::object(), {}};
  const PacketSpec& spec = c.packet;
  const PhotonWavePacket packet = build_packet(spec);
  const PhotonWavePacket coarse = build_packet(PacketSpec{spec.grid.half_resolution(), spec.polarization});
  const int sign = packet.polarization().helicity_sign();

  std::vector<double> velocities = c.velocities;
  if (velocities.empty()) velocities.push_back(0.0);

  std::vector<std::string> cols{"v", "row", "col", "re", "im", "re_half", "im_half"};
  if (sign != 0) {
    for (const char* name : {"analytic_re", "analytic_im", "rel_dev"}) cols.emplace_back(name);
  }
  for (const char* name : {"n_z", "n_r", "n_phi"}) cols.emplace_back(name);
  Table entries{"rho", cols, {}};
  Table spectrum{"spectrum", {"v", "trace", "eig0", "eig1", "eig2", "entropy"}, {}};

  json matrices = json::array();
  for (double v : velocities) {
    const BoostParameter b(v);
    const auto rho = v == 0.0 ? reduced_density_matrix(packet) : boosted_rho_methodB(packet, b);
    const auto rho_half = v == 0.0 ? reduced_density_matrix(coarse) : boosted_rho_methodB(coarse, b);
    CMat3 analytic;
    double scale = 1.0;
    if (sign != 0) {
      analytic = leading_order_rho(sign, b.doppler() * spec.omega());
      scale = 0.0;
      for (const auto& x : analytic.a) scale = std::max(scale, std::abs(x));
    }
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t col = 0; col < 3; ++col) {
        std::vector<double> row{v,
                                double(r),
                                double(col),
                                rho(r, col).real(),
                                rho(r, col).imag(),
                                rho_half(r, col).real(),
                                rho_half(r, col).imag()};
        if (sign != 0) {
          row.push_back(analytic(r, col).real());
          row.push_back(analytic(r, col).imag());
          row.push_back(std::abs(rho(r, col) - analytic(r, col)) / scale);
        }
        const auto gc = grid_columns(spec.grid);
        row.insert(row.end(), gc.begin(), gc.end());
        entries.rows.push_back(std::move(row));
      }
    }
    const auto ev = rho.eigenvalues();
    spectrum.rows.push_back({v, rho.matrix().trace().real(), ev[0], ev[1], ev[2], von_neumann_entropy(rho)});
    matrices.push_back({{"v", v}, {"matrix", matrix_to_json(rho)}});
  }
  out.tables.push_back(std::move(entries));
  out.tables.push_back(std::move(spectrum));
  out.extra["matrices"] = matrices;

  if (c.mc_samples > 0) {
    const auto est = monte_carlo_rho(spec, constant_alpha(spec.polarization), c.mc_samples, c.seed);
    const auto rho = reduced_density_matrix(packet);
    Table mc{"monte_carlo",
             {"row", "col", "quad_re", "quad_im", "mc_re", "mc_im", "se_re", "se_im", "z_re", "z_im"},
             {}};
    const auto zscore = [](double d, double se) { return se > 0.0 ? d / se : (d == 0.0 ? 0.0 : INFINITY); };
    for (std::size_t i = 0; i < 9; ++i) {
      const cplx q = rho.matrix().a[i];
      const cplx m = est.mean.a[i];
      mc.rows.push_back({double(i / 3), double(i % 3), q.real(), q.imag(), m.real(), m.imag(),
                         est.se_re[i], est.se_im[i], zscore(q.real() - m.real(), est.se_re[i]),
                         zscore(q.imag() - m.imag(), est.se_im[i])});
    }
    out.tables.push_back(std::move(mc));
    out.metadata["mc_samples"] = c.mc_samples;
  }
  return out;
}

// --- scans -------------------------------------------------------------------

Output run_pe_scan(const ExperimentConfig& c) {
  Output out{Mode::PeScan, {}, {}, {}, {}};
  Table t{"pe_scan",
          {"omega", "pe", "pe_half", "analytic", "pe_over_omega2_4", "rel_dev", "n_z", "n_r", "n_phi"},
          {}};
  const auto rows = parallel_map<std::vector<double>>(c.omegas, [&](double omega) {
    const PacketSpec spec = c.packet.with_omega(omega);
    PacketSpec half = spec;
    half.grid = spec.grid.half_resolution();
    const double pe = pe_of(spec);
    const double analytic = omega * omega / 4.0;
    return join({{omega, pe, pe_of(half), analytic, pe / analytic, rel_dev(pe, analytic)},
                 grid_columns(spec.grid)});
  });
  t.rows = rows;
  out.tables.push_back(std::move(t));
  return out;
}

struct DopplerRow {
  std::vector<double> values;
  bool warn;
};

Output run_doppler_scan(const ExperimentConfig& c) {
  Output out{Mode::DopplerScan, {}, {}, {}, {}};
  Table t{"doppler_scan",
          {"v", "pe", "pe_boosted", "pe_ratio", "pe_ratio_half", "analytic", "rel_dev",
           "omega_effective", "regime_warning", "n_z", "n_r", "n_phi"},
          {}};
  const auto full = build_pair(c.packet);
  PacketSpec half_spec = c.packet;
  half_spec.grid = c.packet.grid.half_resolution();
  const auto half = build_pair(half_spec);

  const auto rows = parallel_map<DopplerRow>(c.velocities, [&](double v) {
    const BoostParameter b(v);
    const DopplerRatio r = doppler_error_ratio(full.plus, full.minus, b);
    const DopplerRatio rh = doppler_error_ratio(half.plus, half.minus, b);
    return DopplerRow{join({{v, r.pe, r.pe_boosted, r.ratio, rh.ratio, r.analytic,
                             rel_dev(r.ratio, r.analytic), b.doppler() * c.packet.omega(),
                             r.outside_small_omega ? 1.0 : 0.0},
                            grid_columns(c.packet.grid)}),
                      r.outside_small_omega};
  });
  for (const auto& r : rows) {
    if (r.warn)
      out.warnings.push_back(fmt::format(
          "v = {}: (doppler * omega)^2 > 0.01, leading-order Doppler law degrades", r.values[0]));
    t.rows.push_back(r.values);
  }
  out.tables.push_back(std::move(t));
  return out;
}

Output run_cp_witness(const ExperimentConfig& c) {
  Output out{Mode::CpWitness, {}, {}, {}, {}};
  Table t{"cp_witness",
          {"v", "pe", "pe_boosted", "pe_boosted_alt", "ratio", "ratio_half", "analytic", "rel_dev",
           "tolerance", "violated", "n_z", "n_r", "n_phi"},
          {}};
  const auto full = build_pair(c.packet);
  PacketSpec half_spec = c.packet;
  half_spec.grid = c.packet.grid.half_resolution();
  const auto half = build_pair(half_spec);

  const auto rows = parallel_map<std::vector<double>>(c.velocities, [&](double v) {
    const BoostParameter b(v);
    const CpWitness w = cp_violation_witness(full.plus, full.minus, b);
    const DopplerRatio rh = doppler_error_ratio(half.plus, half.minus, b);
    const double analytic = b.doppler() * b.doppler();
    return join({{v, w.pe, w.pe_boosted, w.pe_boosted_alt, w.ratio, rh.ratio, analytic,
                  rel_dev(w.ratio, analytic), w.tolerance, w.violated ? 1.0 : 0.0},
                 grid_columns(c.packet.grid)});
  });
  t.rows = rows;
  out.tables.push_back(std::move(t));
  return out;
}

Output run_reconstruct(const ExperimentConfig& c) {
  Output out{Mode::Reconstruct, {}, {}, {}, {}};
  std::vector<PacketSpec> specs;
  if (c.random_packets > 0) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> omega(0.01, 0.1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < c.random_packets; ++i) {
      PacketSpec s = c.packet.with_omega(omega(rng));
      CustomPolarization pol{{gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}};
      const double n = std::sqrt(std::norm(pol.alpha_plus) + std::norm(pol.alpha_minus));
      pol.alpha_plus /= n;
      pol.alpha_minus /= n;
      s.polarization = pol;
      specs.push_back(s);
    }
  } else {
    specs.push_back(c.packet);
  }

  Table t{"reconstruct",
          {"packet", "omega", "m", "n", "direct_re", "direct_im", "recon_re", "recon_im", "abs_dev",
           "recon_half_re", "recon_half_im", "n_z", "n_r", "n_phi"},
          {}};
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& spec = specs[k];
    const PhotonWavePacket packet = build_packet(spec);
    const PhotonWavePacket coarse = build_packet(PacketSpec{spec.grid.half_resolution(), spec.polarization});
    const auto rho = reduced_density_matrix(packet);
    for (std::size_t m = 0; m < 3; ++m) {
      for (std::size_t n = 0; n < 3; ++n) {
        if (m == n) continue;
        const cplx r = reconstruct_offdiagonal(packet, static_cast<Axis>(m), static_cast<Axis>(n));
        const cplx rh = reconstruct_offdiagonal(coarse, static_cast<Axis>(m), static_cast<Axis>(n));
        t.rows.push_back(join({{double(k), spec.omega(), double(m), double(n), rho(m, n).real(),
                                rho(m, n).imag(), r.real(), r.imag(), std::abs(r - rho(m, n)),
                                rh.real(), rh.imag()},
                               grid_columns(spec.grid)}));
      }
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Classical: return "classical";
    case Mode::Rho: return "rho";
    case Mode::PeScan: return "pe-scan";
    case Mode::DopplerScan: return "doppler-scan";
    case Mode::Reconstruct: return "reconstruct";
    case Mode::CpWitness: return "cp-witness";
  }
  return "unknown";
}

PacketSpec PacketSpec::with_omega(double omega) const {
  PacketSpec p = *this;
  const double ratio = grid.delta_z / grid.delta_r;
  p.grid.delta_r = omega * grid.k_a;
  p.grid.delta_z = ratio * p.grid.delta_r;
  return p;
}

double parse_angle(const json& value, const std::string& field) {
  if (value.is_number()) return number(value, field);
  if (!value.is_string()) throw ConfigError(field, "expected an angle such as 45deg or 0.3rad");
  std::string s = value.get<std::string>();
  double scale = 1.0;
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "deg") == 0) {
    scale = kPi / 180.0;
    s.resize(s.size() - 3);
  } else if (s.size() > 3 && s.compare(s.size() - 3, 3, "rad") == 0) {
    s.resize(s.size() - 3);
  }
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
    return x * scale;
  } catch (const std::exception&) {
    throw ConfigError(field, "cannot parse angle '" + value.get<std::string>() + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  const auto to_double = [&](const std::string& item) {
    try {
      std::size_t used = 0;
      const double x = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(x)) throw std::invalid_argument(item);
      return x;
    } catch (const std::exception&) {
      throw ConfigError(field, "cannot parse number '" + item + "'");
    }
  };
  std::vector<std::string> parts;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError(field, "range must be start:stop:count");
    const double start = to_double(parts[0]);
    const double stop = to_double(parts[1]);
    const double count = to_double(parts[2]);
    if (count < 1 || count != std::floor(count)) throw ConfigError(field, "range count must be a positive integer");
    const int n = static_cast<int>(count);
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? start : start + (stop - start) * i / (n - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  std::vector<double> out;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  static const std::vector<std::string> known{
      "mode", "packet", "velocities", "omegas", "classical", "grid", "mc_samples", "random_packets",
      "seed", "format", "out"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(key, "unknown configuration field");
  }

  ExperimentConfig c;
  if (!j.contains("mode") || !j["mode"].is_string()) throw ConfigError("mode", "missing or not a string");
  const auto mode = j["mode"].get<std::string>();
  if (mode == "classical") c.mode = Mode::Classical;
  else if (mode == "rho") c.mode = Mode::Rho;
  else if (mode == "pe-scan") c.mode = Mode::PeScan;
  else if (mode == "doppler-scan") c.mode = Mode::DopplerScan;
  else if (mode == "reconstruct") c.mode = Mode::Reconstruct;
  else if (mode == "cp-witness") c.mode = Mode::CpWitness;
  else throw ConfigError("mode", "unknown mode '" + mode + "'");

  c.packet = parse_packet(j.value("packet", json::object()));
  if (j.contains("grid")) {
    if (!j["grid"].is_string()) throw ConfigError("grid", "expected \"nz,nr,nphi\"");
    const auto g = parse_grid(j["grid"].get<std::string>());
    c.packet.grid.n_z = g[0];
    c.packet.grid.n_r = g[1];
    c.packet.grid.n_phi = g[2];
  }

  if (j.contains("velocities")) {
    c.velocities = number_list(j["velocities"], "velocities");
    if (c.velocities.empty()) throw ConfigError("velocities", "scan range is empty");
  } else if (c.mode == Mode::DopplerScan) {
    c.velocities = parse_list("-0.6:0.6:7", "velocities");
  } else if (c.mode == Mode::CpWitness) {
    c.velocities = {-0.5};
  }
  for (double v : c.velocities) {
    if (!(std::abs(v) < 1.0)) throw ConfigError("velocities", fmt::format("{} is outside (-1, 1)", v));
  }

  if (j.contains("omegas")) {
    c.omegas = number_list(j["omegas"], "omegas");
    if (c.omegas.empty()) throw ConfigError("omegas", "scan range is empty");
  } else if (c.mode == Mode::PeScan) {
    c.omegas = parse_list("0.01:0.05:5", "omegas");
  }
  for (double o : c.omegas) {
    if (!(o > 0.0)) throw ConfigError("omegas", "values must be positive");
    if (c.packet.grid.k_a - c.packet.grid.truncation * c.packet.with_omega(o).grid.delta_z <= 0.0)
      throw ConfigError("omegas", fmt::format("omega {} pushes the k_z window below zero", o));
  }

  if (j.contains("classical")) {
    const json& cl = j["classical"];
    if (!cl.is_object()) throw ConfigError("classical", "expected an object");
    if (cl.contains("a")) c.a = parse_angle(cl["a"], "classical.a");
    if (cl.contains("theta")) c.theta = parse_angle(cl["theta"], "classical.theta");
    if (cl.contains("phi")) c.phi = parse_angle(cl["phi"], "classical.phi");
    if (cl.contains("b_steps")) c.b_steps = positive_int(cl["b_steps"], "classical.b_steps");
    if (cl.contains("rms_tilt")) c.rms_tilt = parse_angle(cl["rms_tilt"], "classical.rms_tilt");
    if (cl.contains("profile_nodes")) c.profile_nodes = positive_int(cl["profile_nodes"], "classical.profile_nodes");
  }
  if (!(c.theta >= 0.0 && c.theta < kPi / 2)) throw ConfigError("classical.theta", "must lie in [0, pi/2)");
  if (c.rms_tilt < 0.0 || 5.0 * c.rms_tilt >= kPi / 2)
    throw ConfigError("classical.rms_tilt", "must be >= 0 with 5*rms < pi/2");

  if (j.contains("mc_samples")) c.mc_samples = nonnegative_int(j["mc_samples"], "mc_samples");
  if (c.mc_samples == 1) throw ConfigError("mc_samples", "need at least 2 samples for an error estimate");
  if (j.contains("random_packets")) c.random_packets = nonnegative_int(j["random_packets"], "random_packets");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw ConfigError("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("format")) {
    const json& f = j["format"];
    if (f == "json") c.format = Format::Json;
    else if (f == "csv") c.format = Format::Csv;
    else throw ConfigError("format", "expected json or csv");
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("out", "expected a path");
    c.out_path = j["out"].get<std::string>();
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j = {{"mode", experiment::to_string(mode)},
            {"packet", packet_to_json(packet)},
            {"classical",
             {{"a", a}, {"theta", theta}, {"phi", phi}, {"b_steps", b_steps}, {"rms_tilt", rms_tilt},
              {"profile_nodes", profile_nodes}}},
            {"mc_samples", mc_samples},
            {"random_packets", random_packets},
            {"seed", seed},
            {"format", format == Format::Json ? "json" : "csv"}};
  if (!velocities.empty()) j["velocities"] = velocities;
  if (!omegas.empty()) j["omegas"] = omegas;
  if (!out_path.empty()) j["out"] = out_path;
  return j;
}

PhotonWavePacket build_packet(const PacketSpec& spec) {
  return build_packet(spec, std::make_shared<const MomentumGrid>(MomentumGrid::make(spec.grid)));
}

PhotonWavePacket build_packet(const PacketSpec& spec, std::shared_ptr<const MomentumGrid> grid) {
  auto f = gaussian_amplitude(*grid, spec.grid.k_a, spec.grid.delta_z, spec.grid.delta_r);
  const std::size_t n = grid->size();
  return PhotonWavePacket(std::move(grid), std::move(f),
                          PolarizationField::uniform(n, constant_alpha(spec.polarization)));
}

json matrix_to_json(const PolarizationMatrix& rho) {
  json entries = json::array();
  for (std::size_t i = 0; i < 9; ++i) entries.push_back({rho.matrix().a[i].real(), rho.matrix().a[i].imag()});
  const auto ev = rho.eigenvalues();
  return {{"order", "row-major (x,y,z)"},
          {"entries", entries},
          {"trace", rho.matrix().trace().real()},
          {"eigenvalues", {ev[0], ev[1], ev[2]}}};
}

PolarizationMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array() || j["entries"].size() != 9)
    throw ConfigError("entries", "expected nine [re, im] pairs");
  CMat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = complex_pair(j["entries"][i], "entries");
  return PolarizationMatrix::from_matrix(m);
}

Output compute(const ExperimentConfig& config) {
  Output out = [&] {
    switch (config.mode) {
      case Mode::Classical: return run_classical(config);
      case Mode::Rho: return run_rho(config);
      case Mode::PeScan: return run_pe_scan(config);
      case Mode::DopplerScan: return run_doppler_scan(config);
      case Mode::Reconstruct: return run_reconstruct(config);
      case Mode::CpWitness: return run_cp_witness(config);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown mode");
  }();
  out.metadata["config"] = config.to_json();
  out.metadata["config"].erase("out");  // keeps reruns into different files byte-identical
  out.metadata["grid"] = grid_json(config.packet.grid);
  out.metadata["grid_half"] = grid_json(config.packet.grid.half_resolution());
  return out;
}

std::string render(const Output& out, Format format) {
  if (format == Format::Csv) {
    std::string s;
    for (std::size_t t = 0; t < out.tables.size(); ++t) {
      const Table& table = out.tables[t];
      if (t > 0) s += "\n";
      s += "# " + table.name + "\n";
      for (std::size_t i = 0; i < table.columns.size(); ++i) s += (i ? "," : "") + table.columns[i];
      s += "\n";
      for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
        s += "\n";
      }
    }
    return s;
  }

  json j;
  j["mode"] = to_string(out.mode);
  j["metadata"] = out.metadata;
  j["tables"] = json::object();
  for (const auto& table : out.tables) {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = row[i];
      rows.push_back(std::move(r));
    }
    j["tables"][table.name] = {{"columns", table.columns}, {"rows", rows}};
  }
  for (const auto& [key, value] : out.extra.items()) j[key] = value;
  j["warnings"] = out.warnings;
  return j.dump(2) + "\n";
}

int run(const ExperimentConfig& config, std::ostream& diagnostics) {
  Output out;
  try {
    out = compute(config);
  } catch (const Error& e) {
    diagnostics << "error (" << to_string(config.mode) << "): " << e.what() << "\n";
    return 1;
  }
  for (const auto& w : out.warnings) diagnostics << "warning: " << w << "\n";

  const std::string text = render(out, config.format);
  if (config.out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream file(config.out_path, std::ios::binary);
  if (!file) {
    diagnostics << "error: cannot open output file " << config.out_path << "\n";
    return 1;
  }
  file << text;
  return file ? 0 : 1;
}

}  // namespace photonpol::experiment
