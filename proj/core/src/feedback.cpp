#include "equilivest/feedback.hpp"

#include <algorithm>
#include <cmath>

namespace equilivest::feedback {

double vestibular_frequency(double pitch_deg, double theta_star_deg,
                            const VestibularFeedbackConfig& cfg) {
    if (!(cfg.pitch_floor_deg >= 0.0)) {
        throw Error(errc::config, "vestibular: pitch_floor_deg must be >= 0");
    }
    if (!(cfg.f_min_hz > 0.0 && cfg.f_min_hz < cfg.f_max_hz)) {
        throw Error(errc::config, "vestibular: need 0 < f_min_hz < f_max_hz");
    }
    if (!(theta_star_deg > cfg.pitch_floor_deg)) {
        throw Error(errc::config, "vestibular: theta_star must exceed pitch_floor");
    }
    if (pitch_deg <= cfg.pitch_floor_deg) return 0.0;
    if (pitch_deg >= theta_star_deg) return cfg.f_max_hz;
    const double u = (pitch_deg - cfg.pitch_floor_deg) / (theta_star_deg - cfg.pitch_floor_deg);
    const double shaped = cfg.mapping == Mapping::Quadratic ? u * u : u;
    return cfg.f_min_hz + (cfg.f_max_hz - cfg.f_min_hz) * shaped;
}

std::vector<TimedMotorCommand> pacemaker_schedule(const PacemakerConfig& cfg, double start_t_ms,
                                                  double horizon_ms) {
    if (!(cfg.target_cadence_sps > 0.0)) {
        throw Error(errc::config, "pacemaker: target_cadence_sps must be > 0");
    }
    if (!(horizon_ms > 0.0)) {
        throw Error(errc::config, "pacemaker: horizon_ms must be > 0");
    }
    const double period_ms = 1000.0 / cfg.target_cadence_sps;
    if (!(cfg.pulse_duration_ms > 0.0 && cfg.pulse_duration_ms < period_ms)) {
        throw Error(errc::config, "pacemaker: pulse_duration_ms must be in (0, period)");
    }
    const auto count =
        static_cast<std::size_t>(std::floor(horizon_ms * cfg.target_cadence_sps / 1000.0)) + 1;

    std::vector<TimedMotorCommand> schedule;
    schedule.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        TimedMotorCommand pulse;
        pulse.t_ms = start_t_ms + static_cast<double>(k) * period_ms;
        // One vibration burst filling the pulse window.
        pulse.command.frequency_hz = 1000.0 / cfg.pulse_duration_ms;
        pulse.command.intensity = cfg.intensity;
        pulse.command.duration_ms = cfg.pulse_duration_ms;
        schedule.push_back(pulse);
    }
    return schedule;
}

double pacemaker_phase_error(std::span<const GaitEvent> steps,
                             std::span<const TimedMotorCommand> schedule) {
    if (steps.empty() || schedule.empty()) {
        throw Error(errc::undefined_measure, "phase error needs steps and a schedule");
    }
    // The schedule is an arithmetic progression; recover the period from it
    // (a single pulse has no period, treat offsets as-is).
    const double t0 = schedule.front().t_ms;
    const double period =
        schedule.size() > 1 ? (schedule.back().t_ms - t0) / static_cast<double>(schedule.size() - 1)
                            : 0.0;

    double sum = 0.0;
    std::size_t count = 0;
    for (const GaitEvent& step : steps) {
        if (step.kind != GaitEventKind::StepDetected) continue;
        const double raw = static_cast<double>(step.t_ms) - t0;
        double offset;
        if (period > 0.0) {
            // Nearest pulse index, clamped to the schedule span; offset lands
            // in (-period/2, period/2] with ties mapping to +period/2.
            double k = std::ceil(raw / period - 0.5);
            k = std::clamp(k, 0.0, static_cast<double>(schedule.size() - 1));
            offset = raw - k * period;
        } else {
            offset = raw;
        }
        sum += offset;
        ++count;
    }
    if (count == 0) {
        throw Error(errc::undefined_measure, "phase error: no step events in input");
    }
    return sum / static_cast<double>(count);
}

AssistFadeState assist_update(const AssistFadeState& state, bool window_success,
                              const AssistPolicy& policy) {
    AssistFadeState next;
    if (!window_success) {
        next.success_streak = 0;
        next.gain = 1.0;
        return next;
    }
    next.success_streak = state.success_streak + 1;
    next.gain = std::max(policy.gain_min, std::pow(policy.decay, next.success_streak));
    return next;
}

bool window_success(bool any_breakpoint, double cadence_sps, double target_cadence_sps,
                    double tolerance_frac) {
    if (any_breakpoint) return false;
    return std::fabs(cadence_sps - target_cadence_sps) <= tolerance_frac * target_cadence_sps;
}

MotorCommand risk_feedback(double risk, double threshold, const RiskFeedbackConfig& cfg,
                           double assist_gain) {
    if (!(risk >= 0.0 && risk <= 1.0)) {
        throw Error(errc::invalid_argument, "risk_feedback: risk must be in [0, 1]");
    }
    if (risk < threshold) return MotorCommand{};
    MotorCommand alert;
    alert.frequency_hz = cfg.f_max_hz;
    alert.intensity = std::clamp(assist_gain, 0.0, 1.0);
    alert.duration_ms = cfg.duration_ms;
    return alert;
}

std::optional<TimedMotorCommand> arbitrate(const std::optional<TimedMotorCommand>& risk_alert,
                                           const std::optional<TimedMotorCommand>& vestibular,
                                           const std::optional<TimedMotorCommand>& pacemaker) {
    if (risk_alert) return risk_alert;
    if (vestibular) return vestibular;
    return pacemaker;
}

}  // namespace equilivest::feedback
