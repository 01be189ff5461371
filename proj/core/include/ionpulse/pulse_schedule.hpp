#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace ionpulse {

/// Piecewise-constant amplitude/phase drive on the two addressed ions.
///
/// Slot 0 drives `addressed[0]`, slot 1 drives `addressed[1]`. Amplitudes
/// are Rabi frequencies in rad/s, phases in radians within (-pi, pi].
/// All segments have equal length duration / segment_count.
struct PulseSchedule {
  double duration = 0.0;  ///< seconds
  int segment_count = 0;
  std::array<int, 2> addressed{0, 1};  ///< 0-based ion indices
  bool shared = true;
  std::array<std::vector<double>, 2> amplitudes;
  std::array<std::vector<double>, 2> phases;

  double segment_duration() const noexcept {
    return duration / static_cast<double>(segment_count);
  }
  /// Omega e^{i phi} of segment l (0-based) on slot s.
  std::complex<double> weight(int slot, int l) const;
  /// Copy with every segment stretched by `scale` at fixed amplitude/phase.
  PulseSchedule stretched(double scale) const;
  /// Throws ConfigError if sizes or values break the schedule invariants.
  void validate(double omega_max) const;
};

enum class SlotKind { kAmplitude, kPhase };

/// One free parameter and the schedule entries it controls.
struct ParamSlot {
  SlotKind kind;
  int segment;                 ///< primary segment (0-based)
  std::vector<int> ion_slots;  ///< {0} / {1} or {0, 1} when shared
  int mirror_segment = -1;     ///< generated mirror, -1 if none
};

/// Mapping between a flat free-parameter vector and a full schedule.
///
/// With the symmetric ansatz the second half of the pulse is generated:
/// Omega_{L-1-l} = Omega_l and phi_{L-1-l} = -phi_l. For odd L the middle
/// segment's phase is pinned to zero.
class PulseLayout {
 public:
  PulseLayout(int segment_count, double duration, double omega_max,
              std::array<int, 2> addressed, bool shared = true,
              bool symmetric = true);

  /// L = 5N segments, shared, symmetric: 5N free parameters for even L.
  static PulseLayout standard(int ion_count, double duration,
                                   double omega_max,
                                   std::array<int, 2> addressed);

  int segment_count() const noexcept { return segment_count_; }
  double duration() const noexcept { return duration_; }
  double omega_max() const noexcept { return omega_max_; }
  std::array<int, 2> addressed() const noexcept { return addressed_; }
  bool shared() const noexcept { return shared_; }
  bool symmetric() const noexcept { return symmetric_; }

  std::size_t size() const noexcept { return slots_.size(); }
  const std::vector<ParamSlot>& slots() const noexcept { return slots_; }
  double lower_bound(std::size_t i) const;
  double upper_bound(std::size_t i) const;

  /// Throws ConfigError unless the free-parameter count is at least 4N+2.
  void require_minimum_parameters(int ion_count) const;

  /// Writes raw values into a schedule of the right shape without bound
  /// checks (phases are not wrapped). Used on optimizer iterates.
  void expand(const std::vector<double>& values, PulseSchedule& out) const;
  PulseSchedule empty_schedule() const;

 private:
  int segment_count_;
  double duration_;
  double omega_max_;
  std::array<int, 2> addressed_;
  bool shared_;
  bool symmetric_;
  std::vector<ParamSlot> slots_;
};

struct ParamVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const ParamVector&) const = default;
};

/// Expands free parameters into a full schedule. Throws ParameterError on
/// a bound violation, naming the offending entry.
PulseSchedule build_schedule(const ParamVector& params, const PulseLayout& layout);

/// Inverse of build_schedule: reads the free entries back out.
ParamVector pack(const PulseSchedule& schedule, const PulseLayout& layout);

/// Maps any real phase into (-pi, pi].
double wrap_phase(double phi) noexcept;

struct PulseSample {
  std::array<double, 2> amplitude;
  std::array<double, 2> phase;
};

/// Drive values at time t: segment min(floor(t / tau_s), L - 1), right
/// continuous with the last segment closed at t = tau. Throws DomainError
/// outside [0, tau].
PulseSample sample(const PulseSchedule& schedule, double t);

}  // namespace ionpulse
