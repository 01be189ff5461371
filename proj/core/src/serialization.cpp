#include "ionpulse/serialization.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kMHz = 1e6;

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

ordered_json complex_matrix(const Eigen::MatrixXcd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

ordered_json real_matrix(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json segments_json(const PulseSchedule& s, int slot) {
  ordered_json segs = ordered_json::array();
  for (int l = 0; l < s.segment_count; ++l) {
    segs.push_back({{"omega_mhz", to_hz(s.amplitudes[slot][l]) / kMHz},
                    {"phi_rad", s.phases[slot][l]}});
  }
  return segs;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void read_segments(const json& segs, const std::string& path, std::vector<double>& amp,
                   std::vector<double>& phase) {
  if (!segs.is_array() || segs.empty()) fail(path, "expected a non-empty array");
  for (std::size_t l = 0; l < segs.size(); ++l) {
    const std::string at = path + "/" + std::to_string(l);
    const json& seg = segs[l];
    if (!seg.is_object()) fail(at, "expected an object");
    for (auto it = seg.begin(); it != seg.end(); ++it) {
      if (it.key() != "omega_mhz" && it.key() != "phi_rad") {
        fail(at + "/" + it.key(), "unknown key");
      }
    }
    if (!seg.contains("omega_mhz") || !seg["omega_mhz"].is_number()) {
      fail(at + "/omega_mhz", "expected a number");
    }
    if (!seg.contains("phi_rad") || !seg["phi_rad"].is_number()) {
      fail(at + "/phi_rad", "expected a number");
    }
    amp.push_back(to_angular(seg["omega_mhz"].get<double>() * kMHz));
    phase.push_back(seg["phi_rad"].get<double>());
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string pulse_to_json(const PulseSchedule& s) {
  ordered_json j;
  j["tau_s_us"] = s.duration * 1e6;
  j["addressed"] = {s.addressed[0], s.addressed[1]};
  j["shared"] = s.shared;
  j["segments"] = segments_json(s, 0);
  if (!s.shared) j["segments_second"] = segments_json(s, 1);
  return j.dump(2) + "\n";
}

PulseSchedule pulse_from_json(const std::string& text, double omega_max) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed pulse JSON: ") + e.what());
  }
  if (!j.is_object()) fail("/", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "tau_s_us" && k != "addressed" && k != "shared" && k != "segments" &&
        k != "segments_second") {
      fail("/" + k, "unknown key");
    }
  }
  PulseSchedule s;
  if (!j.contains("tau_s_us") || !j["tau_s_us"].is_number()) {
    fail("/tau_s_us", "expected a number");
  }
  s.duration = j["tau_s_us"].get<double>() * 1e-6;
  if (!j.contains("addressed") || !j["addressed"].is_array() || j["addressed"].size() != 2 ||
      !j["addressed"][0].is_number_integer() || !j["addressed"][1].is_number_integer()) {
    fail("/addressed", "expected two ion indices");
  }
  s.addressed = {j["addressed"][0].get<int>(), j["addressed"][1].get<int>()};
  s.shared = true;
  if (j.contains("shared")) {
    if (!j["shared"].is_boolean()) fail("/shared", "expected true or false");
    s.shared = j["shared"].get<bool>();
  }
  if (!j.contains("segments")) fail("/segments", "missing");
  read_segments(j["segments"], "/segments", s.amplitudes[0], s.phases[0]);
  if (s.shared) {
    if (j.contains("segments_second")) {
      fail("/segments_second", "not allowed for a shared pulse");
    }
    s.amplitudes[1] = s.amplitudes[0];
    s.phases[1] = s.phases[0];
  } else {
    if (!j.contains("segments_second")) fail("/segments_second", "missing");
    read_segments(j["segments_second"], "/segments_second", s.amplitudes[1], s.phases[1]);
    if (s.amplitudes[1].size() != s.amplitudes[0].size()) {
      fail("/segments_second", "length differs from /segments");
    }
  }
  s.segment_count = static_cast<int>(s.amplitudes[0].size());
  // Decimal MHz may land a hair above the bound after conversion.
  for (auto& row : s.amplitudes) {
    for (double& a : row) {
      if (a > omega_max && a <= omega_max * (1.0 + 1e-12)) a = omega_max;
    }
  }
  s.validate(omega_max);
  return s;
}

PulseSchedule load_pulse(const std::string& path, double omega_max) {
  try {
    return pulse_from_json(read_file(path), omega_max);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ":" + e.what());
  }
}

std::string run_report_json(const OptimizeResult& r, std::uint64_t seed,
                            CostVariant variant) {
  ordered_json j;
  j["seed"] = seed;
  j["variant"] = to_string(variant);
  j["converged"] = r.converged;
  j["best_restart"] = r.best_restart;
  j["final_cost"] = r.cost.total;
  j["groups"] = {{"beta", r.cost.groups.beta},
                 {"beta_tilde", r.cost.groups.beta_tilde},
                 {"theta", r.cost.groups.theta},
                 {"theta_tilde", r.cost.groups.theta_tilde}};
  int iterations = 0;
  ordered_json restarts = ordered_json::array();
  for (const RestartSummary& s : r.restarts) {
    iterations += s.iterations;
    restarts.push_back({{"index", s.index},
                        {"iterations", s.iterations},
                        {"initial_cost", s.initial_cost},
                        {"final_cost", s.final_cost},
                        {"converged", s.converged}});
  }
  j["iterations"] = iterations;
  j["restarts"] = restarts;
  j["best_so_far"] = r.best_so_far;
  ordered_json trace = ordered_json::array();
  for (const TracePoint& p : r.trace) {
    trace.push_back({{"iteration", p.iteration},
                     {"cost", p.cost},
                     {"beta", p.groups.beta},
                     {"beta_tilde", p.groups.beta_tilde},
                     {"theta", p.groups.theta},
                     {"theta_tilde", p.groups.theta_tilde}});
  }
  j["trace"] = trace;
  return j.dump(2) + "\n";
}

std::string coupling_report_json(const CouplingReport& rep, const FidelityResult& fid) {
  ordered_json j;
  j["beta"] = complex_matrix(rep.beta);
  j["beta_tilde"] = complex_matrix(rep.beta_tilde);
  j["theta_pair"] = rep.theta_pair;
  j["theta_tilde_pair"] = rep.theta_tilde_pair;
  j["theta_total"] = rep.theta_total;
  j["theta_tilde_total"] = rep.theta_tilde_total;
  j["beta_sq_total"] = rep.beta_sq_total();
  j["fidelity"] = fid.fidelity;
  j["infidelity"] = fid.infidelity();
  j["phase_factor"] = fid.phase_factor;
  j["phonon_factor"] = fid.phonon_factor;
  return j.dump(2) + "\n";
}

std::string chain_json(const ChainModel& chain) {
  ordered_json j;
  std::vector<double> pos(chain.positions.data(),
                          chain.positions.data() + chain.positions.size());
  std::vector<double> freqs;
  for (Eigen::Index k = 0; k < chain.mode_freqs.size(); ++k) {
    freqs.push_back(to_hz(chain.mode_freqs(k)) / kMHz);
  }
  j["positions_m"] = pos;
  j["mode_freqs_mhz"] = freqs;
  j["mode_matrix"] = real_matrix(chain.mode_matrix);
  j["lamb_dicke"] = real_matrix(chain.lamb_dicke);
  j["warnings"] = chain.warnings;
  return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepGrid& grid) {
  std::string out =
      "delta_hz,tau_scale,infidelity,beta_sq_total,theta_total,phase_factor,"
      "phonon_factor,flag\n";
  for (const SweepRow& r : grid.rows) {
    out += format_double(r.delta_hz) + ',' + format_double(r.tau_scale) + ',' +
           format_double(r.infidelity) + ',' + format_double(r.beta_sq_total) + ',' +
           format_double(r.theta_total) + ',' + format_double(r.phase_factor) + ',' +
           format_double(r.phonon_factor) + ',' + r.flag + '\n';
  }
  return out;
}

std::string sweep_json(const SweepGrid& grid) {
  ordered_json j;
  j["mode"] = to_string(grid.mode);
  j["drift_points"] = grid.drift_points;
  j["scale_points"] = grid.scale_points;
  j["max_infidelity"] = number_or_null(grid.max_infidelity());
  j["flagged"] = grid.flagged();
  ordered_json rows = ordered_json::array();
  for (const SweepRow& r : grid.rows) {
    rows.push_back({{"delta_hz", r.delta_hz},
                    {"tau_scale", r.tau_scale},
                    {"infidelity", number_or_null(r.infidelity)},
                    {"beta_sq_total", number_or_null(r.beta_sq_total)},
                    {"theta_total", number_or_null(r.theta_total)},
                    {"phase_factor", number_or_null(r.phase_factor)},
                    {"phonon_factor", number_or_null(r.phonon_factor)},
                    {"flag", r.flag}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw Error(tmp.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(path + ": rename failed");
  }
}

}  // namespace ionpulse
