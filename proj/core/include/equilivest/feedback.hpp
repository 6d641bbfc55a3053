#pragma once

#include <optional>
#include <span>
#include <vector>

#include "equilivest/types.hpp"

namespace equilivest::feedback {

enum class Mapping { Linear, Quadratic };

// Frequency-increasing stimulation anchored on the distance to the
// breakpoint angle: off below the floor, f_max at and beyond theta_star.
struct VestibularFeedbackConfig {
    double pitch_floor_deg = 2.0;
    double f_min_hz = 1.0;
    double f_max_hz = 9.0;
    Mapping mapping = Mapping::Linear;
};

// pitch <= floor -> 0; pitch >= theta_star -> f_max; in between
// f_min + (f_max - f_min) * u^k with u the normalized distance above the
// floor and k = 1 (linear) or 2 (quadratic). Throws errc::config for an
// invalid config or theta_star <= pitch_floor.
double vestibular_frequency(double pitch_deg, double theta_star_deg,
                            const VestibularFeedbackConfig& cfg);

struct PacemakerConfig {
    double target_cadence_sps = 1.4;
    double pulse_duration_ms = 120.0;
    double intensity = 0.6;
};

// Pulses at period 1000/target_cadence_sps ms starting at start_t_ms;
// count = floor(horizon_ms / period) + 1.
// Throws errc::config for a non-positive cadence or horizon.
std::vector<TimedMotorCommand> pacemaker_schedule(const PacemakerConfig& cfg, double start_t_ms,
                                                  double horizon_ms);

// Mean signed offset from each step to its nearest scheduled pulse, mapped
// into (-period/2, period/2] (a tie goes to the earlier pulse, giving
// +period/2). Throws errc::undefined_measure when either input is empty.
double pacemaker_phase_error(std::span<const GaitEvent> steps,
                             std::span<const TimedMotorCommand> schedule);

// Assist-as-needed fading: stimulation gain decays along success streaks and
// snaps back to 1 on failure.
struct AssistFadeState {
    double gain = 1.0;
    int success_streak = 0;
};

struct AssistPolicy {
    double decay = 0.8;
    double gain_min = 0.1;
};

AssistFadeState assist_update(const AssistFadeState& state, bool window_success,
                              const AssistPolicy& policy = {});

// Success criterion for one evaluation window: no breakpoint events and
// cadence within tolerance_frac of the target.
bool window_success(bool any_breakpoint, double cadence_sps, double target_cadence_sps,
                    double tolerance_frac = 0.2);

struct RiskFeedbackConfig {
    double f_max_hz = 9.0;
    double duration_ms = 800.0;
};

// Off below the threshold; at or above it, a distinct alert burst at f_max
// with intensity scaled by the assist gain.
// Throws errc::invalid_argument when risk is outside [0, 1].
MotorCommand risk_feedback(double risk, double threshold, const RiskFeedbackConfig& cfg,
                           double assist_gain = 1.0);

// Strategy priority when several are active at once: risk alert beats
// vestibular beats pacemaker. Returns the highest-priority present command.
std::optional<TimedMotorCommand> arbitrate(const std::optional<TimedMotorCommand>& risk_alert,
                                           const std::optional<TimedMotorCommand>& vestibular,
                                           const std::optional<TimedMotorCommand>& pacemaker);

}  // namespace equilivest::feedback
