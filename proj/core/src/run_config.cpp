#include "ionpulse/run_config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ionpulse/errors.hpp"

namespace ionpulse {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError((path.empty() ? std::string("/") : path) + ": " + what);
}

// Reads the keys of one JSON object and remembers which ones were consumed,
// so leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(at(key), "expected a number");
      out = v->get<double>();
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        if (!v->is_number()) fail(at(key), "expected a number or null");
        out = v->get<double>();
      }
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(at(key), "expected an integer");
      const auto x = v->get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        fail(at(key), "integer out of range");
      }
      out = static_cast<int>(x);
    }
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        fail(at(key), "expected a non-negative integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void index_pair(const std::string& key, std::array<int, 2>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2) fail(at(key), "expected two ion indices");
      for (std::size_t i = 0; i < 2; ++i) {
        const json& e = (*v)[i];
        if (!e.is_number_integer()) fail(at(key) + "/" + std::to_string(i), "expected an integer");
        out[i] = e.get<int>();
      }
    }
  }

  // Nested object; returns nullptr when absent.
  const json* object(const std::string& key) {
    const json* v = find(key);
    if (v && !v->is_object()) fail(at(key), "expected an object");
    return v;
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void section(Reader& parent, const std::string& key, F&& body) {
  if (const json* node = parent.object(key)) {
    Reader r(*node, parent.at(key));
    body(r);
    r.finish();
  }
}

// Wraps enum parsers so their errors carry the location.
template <class F>
auto located(const std::string& path, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_col(text, e.byte) + ": malformed JSON (" + e.what() + ")");
  }
}

template <class S>
void read_sweep(Reader& r, S& sweep) {
  std::string mode;
  r.string("mode", mode);
  if (!mode.empty()) {
    sweep.mode = located(r.at("mode"), [&] { return parse_sweep_mode(mode); });
  }
  r.number("drift_min_hz", sweep.drift_min_hz);
  r.number("drift_max_hz", sweep.drift_max_hz);
  r.integer("drift_points", sweep.drift_points);
  r.number("scale_min", sweep.scale_min);
  r.number("scale_max", sweep.scale_max);
  r.integer("scale_points", sweep.scale_points);
}

}  // namespace

void RunConfig::validate() const {
  trap_config().validate();
  for (int i : drive.addressed) {
    if (i < 0 || i >= trap.ion_count) {
      std::ostringstream msg;
      msg << "/drive/addressed: ion index " << i << " outside a " << trap.ion_count
          << "-ion chain";
      throw ConfigError(msg.str());
    }
  }
  if (drive.addressed[0] == drive.addressed[1]) {
    throw ConfigError("/drive/addressed: the two ions must differ");
  }
  if (!(drive.mu_hz > 0.0)) throw ConfigError("/drive/mu_hz: must be positive");
  if (!(pulse.tau_s > 0.0)) throw ConfigError("/pulse/tau_s: must be positive");
  if (pulse.segments < 1) throw ConfigError("/pulse/segments: must be >= 1");
  if (!(pulse.omega_max_hz > 0.0)) throw ConfigError("/pulse/omega_max_hz: must be positive");
  if (!(env.temperature_k >= 0.0)) throw ConfigError("/env/temperature_k: must be >= 0");
  try {
    cost_spec().validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("/cost: ") + e.what());
  }
  try {
    optimizer_config().validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("/optimizer: ") + e.what());
  }
  try {
    sweep_spec().validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("/sweep: ") + e.what());
  }
  try {
    layout().require_minimum_parameters(trap.ion_count);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("/pulse: ") + e.what());
  }
}

TrapConfig RunConfig::trap_config() const {
  TrapConfig t;
  t.ion_count = trap.ion_count;
  t.ion_mass_kg = trap.ion_mass_amu * kAtomicMassUnit;
  t.axial_freq_hz = trap.axial_freq_hz;
  t.transverse_freq_hz = trap.transverse_freq_hz;
  t.wavevector_difference = trap.wavevector_difference;
  t.lamb_dicke_scale = trap.lamb_dicke_scale;
  return t;
}

DriveConfig RunConfig::drive_config() const {
  return DriveConfig{to_angular(drive.mu_hz), 0.0};
}

PulseLayout RunConfig::layout() const {
  return PulseLayout(pulse.segments, pulse.tau_s, omega_max(), drive.addressed,
                     pulse.shared, pulse.symmetric);
}

CostSpec RunConfig::cost_spec() const {
  CostSpec s;
  s.variant = cost.variant;
  s.weights = cost.weights;
  s.epsilon = cost.epsilon;
  s.tilde_rate = to_angular(cost.tilde_rate_hz);
  return s;
}

OptimizerConfig RunConfig::optimizer_config() const {
  OptimizerConfig o;
  o.max_iterations = optimizer.max_iterations;
  o.cost_tolerance = optimizer.cost_tolerance;
  o.step_tolerance = optimizer.step_tolerance;
  o.restarts = optimizer.restarts;
  o.seed = optimizer.seed;
  o.threads = optimizer.threads;
  return o;
}

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  s.mode = sweep.mode;
  s.drift_min_hz = sweep.drift_min_hz;
  s.drift_max_hz = sweep.drift_max_hz;
  s.drift_points = sweep.drift_points;
  s.scale_min = sweep.scale_min;
  s.scale_max = sweep.scale_max;
  s.scale_points = sweep.scale_points;
  return s;
}

RunConfig parse_run_config(const std::string& text) {
  const json root = parse_text(text);
  RunConfig c;
  Reader top(root, "");
  section(top, "trap", [&](Reader& r) {
    r.integer("ion_count", c.trap.ion_count);
    r.number("ion_mass_amu", c.trap.ion_mass_amu);
    r.number("axial_freq_hz", c.trap.axial_freq_hz);
    r.number("transverse_freq_hz", c.trap.transverse_freq_hz);
    r.number("wavevector_difference", c.trap.wavevector_difference);
    r.optional_number("lamb_dicke_scale", c.trap.lamb_dicke_scale);
  });
  section(top, "drive", [&](Reader& r) {
    r.number("mu_hz", c.drive.mu_hz);
    r.index_pair("addressed", c.drive.addressed);
  });
  section(top, "pulse", [&](Reader& r) {
    r.number("tau_s", c.pulse.tau_s);
    r.integer("segments", c.pulse.segments);
    r.number("omega_max_hz", c.pulse.omega_max_hz);
    r.boolean("shared", c.pulse.shared);
    r.boolean("symmetric", c.pulse.symmetric);
  });
  section(top, "cost", [&](Reader& r) {
    std::string variant;
    r.string("variant", variant);
    if (!variant.empty()) {
      c.cost.variant = located(r.at("variant"), [&] { return parse_cost_variant(variant); });
    }
    section(r, "weights", [&](Reader& w) {
      w.number("beta", c.cost.weights.beta);
      w.number("beta_tilde", c.cost.weights.beta_tilde);
      w.number("theta", c.cost.weights.theta);
      w.number("theta_tilde", c.cost.weights.theta_tilde);
    });
    r.number("epsilon", c.cost.epsilon);
    r.number("tilde_rate_hz", c.cost.tilde_rate_hz);
  });
  section(top, "optimizer", [&](Reader& r) {
    r.integer("max_iterations", c.optimizer.max_iterations);
    r.number("cost_tolerance", c.optimizer.cost_tolerance);
    r.number("step_tolerance", c.optimizer.step_tolerance);
    r.integer("restarts", c.optimizer.restarts);
    r.unsigned64("seed", c.optimizer.seed);
    r.integer("threads", c.optimizer.threads);
  });
  section(top, "sweep", [&](Reader& r) { read_sweep(r, c.sweep); });
  section(top, "env", [&](Reader& r) { r.number("temperature_k", c.env.temperature_k); });
  top.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ":" + e.what());
  }
}

std::string dump_run_config(const RunConfig& c) {
  json j;
  j["trap"] = {{"ion_count", c.trap.ion_count},
               {"ion_mass_amu", c.trap.ion_mass_amu},
               {"axial_freq_hz", c.trap.axial_freq_hz},
               {"transverse_freq_hz", c.trap.transverse_freq_hz},
               {"wavevector_difference", c.trap.wavevector_difference},
               {"lamb_dicke_scale", c.trap.lamb_dicke_scale
                                        ? json(*c.trap.lamb_dicke_scale)
                                        : json(nullptr)}};
  j["drive"] = {{"mu_hz", c.drive.mu_hz}, {"addressed", c.drive.addressed}};
  j["pulse"] = {{"tau_s", c.pulse.tau_s},
                {"segments", c.pulse.segments},
                {"omega_max_hz", c.pulse.omega_max_hz},
                {"shared", c.pulse.shared},
                {"symmetric", c.pulse.symmetric}};
  j["cost"] = {{"variant", to_string(c.cost.variant)},
               {"weights",
                {{"beta", c.cost.weights.beta},
                 {"beta_tilde", c.cost.weights.beta_tilde},
                 {"theta", c.cost.weights.theta},
                 {"theta_tilde", c.cost.weights.theta_tilde}}},
               {"epsilon", c.cost.epsilon},
               {"tilde_rate_hz", c.cost.tilde_rate_hz}};
  j["optimizer"] = {{"max_iterations", c.optimizer.max_iterations},
                    {"cost_tolerance", c.optimizer.cost_tolerance},
                    {"step_tolerance", c.optimizer.step_tolerance},
                    {"restarts", c.optimizer.restarts},
                    {"seed", c.optimizer.seed},
                    {"threads", c.optimizer.threads}};
  j["sweep"] = {{"mode", to_string(c.sweep.mode)},
                {"drift_min_hz", c.sweep.drift_min_hz},
                {"drift_max_hz", c.sweep.drift_max_hz},
                {"drift_points", c.sweep.drift_points},
                {"scale_min", c.sweep.scale_min},
                {"scale_max", c.sweep.scale_max},
                {"scale_points", c.sweep.scale_points}};
  j["env"] = {{"temperature_k", c.env.temperature_k}};
  return j.dump(2) + "\n";
}

SweepSpec parse_sweep_spec(const std::string& text, SweepSpec base) {
  const json root = parse_text(text);
  Reader r(root, "");
  read_sweep(r, base);
  r.finish();
  return base;
}

OracleConfig parse_oracle_config(const std::string& text, OracleConfig base) {
  const json root = parse_text(text);
  Reader r(root, "");
  if (const json* modes = r.find("modes")) {
    if (!modes->is_array()) fail("/modes", "expected an array of mode indices");
    base.modes.clear();
    for (std::size_t i = 0; i < modes->size(); ++i) {
      if (!(*modes)[i].is_number_integer()) {
        fail("/modes/" + std::to_string(i), "expected an integer");
      }
      base.modes.push_back((*modes)[i].get<int>());
    }
  }
  r.integer("fock_cutoff", base.fock_cutoff);
  r.integer("steps_per_cycle", base.steps_per_cycle);
  r.integer("min_steps_per_segment", base.min_steps_per_segment);
  std::uint64_t cap = base.dimension_cap, assemble = base.assemble_cap;
  r.unsigned64("dimension_cap", cap);
  r.unsigned64("assemble_cap", assemble);
  base.dimension_cap = static_cast<std::size_t>(cap);
  base.assemble_cap = static_cast<std::size_t>(assemble);
  r.number("thermal_weight_tolerance", base.thermal_weight_tolerance);
  r.finish();
  try {
    base.validate();
  } catch (const ConfigError& e) {
    fail("/", e.what());
  }
  return base;
}

}  // namespace ionpulse
