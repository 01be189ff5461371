#include "ionpulse/pulse_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ionpulse/constants.hpp"
#include "ionpulse/errors.hpp"

namespace ionpulse {

std::complex<double> PulseSchedule::weight(int slot, int l) const {
  return std::polar(amplitudes[slot][l], phases[slot][l]);
}

PulseSchedule PulseSchedule::stretched(double scale) const {
  PulseSchedule out = *this;
  out.duration *= scale;
  return out;
}

void PulseSchedule::validate(double omega_max) const {
  if (!(duration > 0)) throw ConfigError("pulse duration must be positive");
  if (segment_count < 1) throw ConfigError("pulse needs at least one segment");
  if (addressed[0] == addressed[1] || addressed[0] < 0 || addressed[1] < 0) {
    throw ConfigError("pulse must address two distinct ions");
  }
  for (int s = 0; s < 2; ++s) {
    if (static_cast<int>(amplitudes[s].size()) != segment_count ||
        static_cast<int>(phases[s].size()) != segment_count) {
      throw ConfigError("pulse segment arrays do not match segment_count");
    }
    for (int l = 0; l < segment_count; ++l) {
      const double a = amplitudes[s][l];
      if (!(a >= 0.0 && a <= omega_max)) {
        std::ostringstream msg;
        msg << "segment " << l << " amplitude " << a << " outside [0, "
            << omega_max << "]";
        throw ConfigError(msg.str());
      }
      const double p = phases[s][l];
      if (!(p > -kPi && p <= kPi)) {
        std::ostringstream msg;
        msg << "segment " << l << " phase " << p << " outside (-pi, pi]";
        throw ConfigError(msg.str());
      }
    }
  }
}

double wrap_phase(double phi) noexcept {
  double w = std::remainder(phi, kTwoPi);  // [-pi, pi]
  if (w <= -kPi) w += kTwoPi;
  return w;
}

PulseLayout::PulseLayout(int segment_count, double duration, double omega_max,
                         std::array<int, 2> addressed, bool shared,
                         bool symmetric)
    : segment_count_(segment_count),
      duration_(duration),
      omega_max_(omega_max),
      addressed_(addressed),
      shared_(shared),
      symmetric_(symmetric) {
  if (segment_count < 1) throw ConfigError("layout needs at least one segment");
  if (!(duration > 0)) throw ConfigError("layout duration must be positive");
  if (!(omega_max > 0)) throw ConfigError("layout omega_max must be positive");
  if (addressed[0] == addressed[1]) {
    throw ConfigError("layout must address two distinct ions");
  }

  const int free_segments = symmetric ? (segment_count + 1) / 2 : segment_count;
  const std::vector<std::vector<int>> groups =
      shared ? std::vector<std::vector<int>>{{0, 1}}
             : std::vector<std::vector<int>>{{0}, {1}};
  for (const auto& ions : groups) {
    for (int l = 0; l < free_segments; ++l) {
      const int mirror = symmetric ? segment_count - 1 - l : -1;
      slots_.push_back({SlotKind::kAmplitude, l, ions, mirror == l ? -1 : mirror});
    }
    for (int l = 0; l < free_segments; ++l) {
      const int mirror = symmetric ? segment_count - 1 - l : -1;
      if (mirror == l) continue;  // self-mirrored middle segment: phase = 0
      slots_.push_back({SlotKind::kPhase, l, ions, mirror});
    }
  }
}

PulseLayout PulseLayout::standard(int ion_count, double duration,
                                       double omega_max,
                                       std::array<int, 2> addressed) {
  return PulseLayout(5 * ion_count, duration, omega_max, addressed, true, true);
}

double PulseLayout::lower_bound(std::size_t i) const {
  return slots_.at(i).kind == SlotKind::kAmplitude ? 0.0 : -kPi;
}

double PulseLayout::upper_bound(std::size_t i) const {
  return slots_.at(i).kind == SlotKind::kAmplitude ? omega_max_ : kPi;
}

void PulseLayout::require_minimum_parameters(int ion_count) const {
  const std::size_t minimum = 4 * static_cast<std::size_t>(ion_count) + 2;
  if (size() < minimum) {
    std::ostringstream msg;
    msg << "pulse layout has " << size() << " free parameters; an " << ion_count
        << "-ion chain needs at least " << minimum;
    throw ConfigError(msg.str());
  }
}

PulseSchedule PulseLayout::empty_schedule() const {
  PulseSchedule schedule;
  schedule.duration = duration_;
  schedule.segment_count = segment_count_;
  schedule.addressed = addressed_;
  schedule.shared = shared_;
  for (int s = 0; s < 2; ++s) {
    schedule.amplitudes[s].assign(segment_count_, 0.0);
    schedule.phases[s].assign(segment_count_, 0.0);
  }
  return schedule;
}

void PulseLayout::expand(const std::vector<double>& values, PulseSchedule& out) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const ParamSlot& slot = slots_[i];
    const double v = values[i];
    const bool amplitude = slot.kind == SlotKind::kAmplitude;
    for (int s : slot.ion_slots) {
      auto& row = amplitude ? out.amplitudes[s] : out.phases[s];
      row[slot.segment] = v;
      if (slot.mirror_segment >= 0) {
        row[slot.mirror_segment] = amplitude ? v : (v == kPi ? kPi : -v);
      }
    }
  }
}

PulseSchedule build_schedule(const ParamVector& params, const PulseLayout& layout) {
  if (params.size() != layout.size()) {
    std::ostringstream msg;
    msg << "parameter vector has " << params.size() << " entries, layout expects "
        << layout.size();
    throw ParameterError(msg.str(), std::min(params.size(), layout.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double v = params[i];
    const ParamSlot& slot = layout.slots()[i];
    const bool amplitude = slot.kind == SlotKind::kAmplitude;
    const bool in_bounds = amplitude ? (v >= 0.0 && v <= layout.omega_max())
                                     : (v > -kPi && v <= kPi);
    if (!in_bounds) {
      std::ostringstream msg;
      msg << "parameter " << i << (amplitude ? " (amplitude" : " (phase")
          << ", segment " << slot.segment << ") = " << v << " is out of bounds";
      throw ParameterError(msg.str(), i);
    }
  }
  PulseSchedule schedule = layout.empty_schedule();
  layout.expand(params.values, schedule);
  return schedule;
}

ParamVector pack(const PulseSchedule& schedule, const PulseLayout& layout) {
  if (schedule.segment_count != layout.segment_count()) {
    throw ConfigError("schedule segment count does not match layout");
  }
  ParamVector params;
  params.values.reserve(layout.size());
  for (const ParamSlot& slot : layout.slots()) {
    const int s = slot.ion_slots.front();
    const auto& row = slot.kind == SlotKind::kAmplitude ? schedule.amplitudes[s]
                                                        : schedule.phases[s];
    params.values.push_back(row[slot.segment]);
  }
  return params;
}

PulseSample sample(const PulseSchedule& schedule, double t) {
  if (!(t >= 0.0 && t <= schedule.duration)) {
    std::ostringstream msg;
    msg << "sample time " << t << " outside [0, " << schedule.duration << "]";
    throw DomainError(msg.str());
  }
  const int last = schedule.segment_count - 1;
  const int l = std::min(static_cast<int>(std::floor(t / schedule.segment_duration())),
                         last);
  PulseSample out;
  for (int s = 0; s < 2; ++s) {
    out.amplitude[s] = schedule.amplitudes[s][l];
    out.phase[s] = schedule.phases[s][l];
  }
  return out;
}

}  // namespace ionpulse
