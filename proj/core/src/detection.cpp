#include "equilivest/detection.hpp"

#include <algorithm>
#include <cmath>

namespace equilivest::detection {

namespace {

void check_breakpoint_config(const BreakpointConfig& cfg) {
    if (!(cfg.theta_star_deg > 0.0)) {
        throw Error(errc::config, "BreakpointConfig: theta_star_deg must be > 0");
    }
    if (cfg.hysteresis_deg < 0.0) {
        throw Error(errc::config, "BreakpointConfig: hysteresis_deg must be >= 0");
    }
    if (cfg.min_dwell_ms < 0.0) {
        throw Error(errc::config, "BreakpointConfig: min_dwell_ms must be >= 0");
    }
}

void check_step_config(const StepDetectorConfig& cfg) {
    if (!(cfg.peak_threshold > 0.0)) {
        throw Error(errc::config, "StepDetectorConfig: peak_threshold must be > 0");
    }
    if (!(cfg.refractory_ms > 0.0)) {
        throw Error(errc::config, "StepDetectorConfig: refractory_ms must be > 0");
    }
    if (cfg.smoothing_window < 1) {
        throw Error(errc::config, "StepDetectorConfig: smoothing_window must be >= 1");
    }
}

}  // namespace

BreakpointDetector::BreakpointDetector(const BreakpointConfig& cfg) : cfg_(cfg) {
    check_breakpoint_config(cfg);
}

std::optional<GaitEvent> BreakpointDetector::update(std::uint64_t t_ms, double pitch_deg) {
    switch (phase_) {
        case Phase::Armed:
            if (pitch_deg >= cfg_.theta_star_deg) {
                entered_t_ms_ = t_ms;
                if (static_cast<double>(t_ms - entered_t_ms_) >= cfg_.min_dwell_ms) {
                    phase_ = Phase::Refractory;
                    return GaitEvent{GaitEventKind::BreakpointCrossed, t_ms, pitch_deg};
                }
                phase_ = Phase::Tracking;
            }
            return std::nullopt;
        case Phase::Tracking:
            if (pitch_deg < cfg_.theta_star_deg) {
                phase_ = Phase::Armed;
                return std::nullopt;
            }
            if (static_cast<double>(t_ms - entered_t_ms_) >= cfg_.min_dwell_ms) {
                phase_ = Phase::Refractory;
                return GaitEvent{GaitEventKind::BreakpointCrossed, t_ms, pitch_deg};
            }
            return std::nullopt;
        case Phase::Refractory:
            if (pitch_deg < cfg_.theta_star_deg - cfg_.hysteresis_deg) {
                phase_ = Phase::Armed;
            }
            return std::nullopt;
    }
    return std::nullopt;
}

void BreakpointDetector::reset() noexcept {
    phase_ = Phase::Armed;
    entered_t_ms_ = 0;
}

std::vector<GaitEvent> detect_breakpoint(std::span<const PitchSample> pitch,
                                         const BreakpointConfig& cfg) {
    BreakpointDetector detector(cfg);
    std::vector<GaitEvent> events;
    for (const PitchSample& p : pitch) {
        if (auto event = detector.update(p.t_ms, p.pitch_deg)) {
            events.push_back(*event);
        }
    }
    return events;
}

BreakpointConfig calibrate_breakpoint(std::span<const LabeledFallRun> runs, int percentile) {
    if (runs.empty()) {
        throw Error(errc::calibration, "calibrate_breakpoint: no labeled runs");
    }
    if (percentile < 0 || percentile > 100) {
        throw Error(errc::calibration, "calibrate_breakpoint: percentile must be in [0, 100]");
    }
    std::vector<double> onset_pitches;
    onset_pitches.reserve(runs.size());
    for (const LabeledFallRun& run : runs) {
        if (run.pitch.empty()) {
            throw Error(errc::calibration, "calibrate_breakpoint: run with no samples");
        }
        // Pitch at the last sample not later than the labeled onset.
        const PitchSample* at_onset = &run.pitch.front();
        for (const PitchSample& p : run.pitch) {
            if (static_cast<double>(p.t_ms) > run.fall_onset_ms) break;
            at_onset = &p;
        }
        onset_pitches.push_back(at_onset->pitch_deg);
    }
    std::sort(onset_pitches.begin(), onset_pitches.end());
    // Nearest-rank percentile: rank = ceil(p/100 * n), 1-based.
    const std::size_t n = onset_pitches.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(static_cast<double>(percentile) / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);

    BreakpointConfig cfg;
    cfg.theta_star_deg = onset_pitches[rank - 1];
    cfg.hysteresis_deg = 2.0;
    cfg.min_dwell_ms = 50.0;
    return cfg;
}

StepDetector::StepDetector(const StepDetectorConfig& cfg) : cfg_(cfg) { check_step_config(cfg); }

double StepDetector::smooth_at(std::size_t center_offset) const {
    // center_offset indexes into raw_; the centered window truncates at the
    // stream edges. Trimming keeps every sample a future window can reach,
    // so offset arithmetic below never clips an available sample.
    const auto h_before = static_cast<std::size_t>((cfg_.smoothing_window - 1) / 2);
    const auto h_after = static_cast<std::size_t>(cfg_.smoothing_window / 2);

    const std::size_t lo = center_offset >= h_before ? center_offset - h_before : 0;
    const std::size_t hi = std::min(center_offset + h_after, raw_.size() - 1);

    double sum_gx = 0.0, sum_gz = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        sum_gx += raw_[i].gx;
        sum_gz += raw_[i].gz;
    }
    const double count = static_cast<double>(hi - lo + 1);
    return std::hypot(sum_gx / count, sum_gz / count);
}

std::optional<GaitEvent> StepDetector::push_smoothed(std::uint64_t t_ms, double magnitude) {
    smoothed_.push_back(Smoothed{t_ms, magnitude});
    if (smoothed_.size() > 3) smoothed_.pop_front();
    if (smoothed_.size() < 3) return std::nullopt;

    const Smoothed& prev = smoothed_[0];
    const Smoothed& mid = smoothed_[1];
    const Smoothed& next = smoothed_[2];
    const bool is_peak =
        mid.magnitude >= cfg_.peak_threshold && mid.magnitude > prev.magnitude &&
        mid.magnitude >= next.magnitude;
    if (!is_peak) return std::nullopt;
    if (have_last_step_ &&
        static_cast<double>(mid.t_ms - last_step_t_ms_) < cfg_.refractory_ms) {
        return std::nullopt;
    }
    have_last_step_ = true;
    last_step_t_ms_ = mid.t_ms;
    return GaitEvent{GaitEventKind::StepDetected, mid.t_ms, mid.magnitude};
}

std::vector<GaitEvent> StepDetector::update(std::uint64_t t_ms, double gx_dps, double gz_dps) {
    raw_.push_back(Raw{t_ms, gx_dps, gz_dps});
    ++total_raw_;

    std::vector<GaitEvent> events;
    const std::size_t h_before = static_cast<std::size_t>((cfg_.smoothing_window - 1) / 2);
    const std::size_t h_after = static_cast<std::size_t>(cfg_.smoothing_window / 2);

    // Produce smoothed values whose full right context has arrived.
    while (emitted_smooth_ + h_after < total_raw_) {
        const std::size_t base_index = total_raw_ - raw_.size();
        const std::size_t center_offset = emitted_smooth_ - base_index;
        const std::uint64_t center_t = raw_[center_offset].t_ms;
        if (auto event = push_smoothed(center_t, smooth_at(center_offset))) {
            events.push_back(*event);
        }
        ++emitted_smooth_;
        // Drop raw samples no future window can reach.
        while (total_raw_ - raw_.size() + h_before < emitted_smooth_) {
            raw_.pop_front();
        }
    }
    return events;
}

std::vector<GaitEvent> StepDetector::finish() {
    std::vector<GaitEvent> events;
    // Remaining centers use windows truncated at the stream end. The final
    // smoothed point has no right neighbor and can never be a peak.
    while (emitted_smooth_ < total_raw_) {
        const std::size_t base_index = total_raw_ - raw_.size();
        const std::size_t center_offset = emitted_smooth_ - base_index;
        const std::uint64_t center_t = raw_[center_offset].t_ms;
        if (auto event = push_smoothed(center_t, smooth_at(center_offset))) {
            events.push_back(*event);
        }
        ++emitted_smooth_;
    }
    return events;
}

void StepDetector::reset() noexcept {
    raw_.clear();
    smoothed_.clear();
    emitted_smooth_ = 0;
    total_raw_ = 0;
    have_last_step_ = false;
    last_step_t_ms_ = 0;
}

std::vector<GaitEvent> detect_steps(std::span<const RateSample> gyro,
                                    const StepDetectorConfig& cfg) {
    StepDetector detector(cfg);
    std::vector<GaitEvent> events;
    for (const RateSample& s : gyro) {
        auto batch = detector.update(s.t_ms, s.gx_dps, s.gz_dps);
        events.insert(events.end(), batch.begin(), batch.end());
    }
    auto tail = detector.finish();
    events.insert(events.end(), tail.begin(), tail.end());
    return events;
}

double estimate_cadence(std::span<const GaitEvent> steps, double window_ms, double at_t_ms) {
    if (!(window_ms > 0.0)) {
        throw Error(errc::invalid_argument, "estimate_cadence: window_ms must be > 0");
    }
    std::size_t count = 0;
    for (const GaitEvent& e : steps) {
        if (e.kind != GaitEventKind::StepDetected) continue;
        const double t = static_cast<double>(e.t_ms);
        if (t > at_t_ms - window_ms && t <= at_t_ms) ++count;
    }
    if (count < 2) return 0.0;
    return static_cast<double>(count) / (window_ms / 1000.0);
}

double estimate_cadence(std::span<const GaitEvent> steps, double window_ms) {
    std::uint64_t last_t = 0;
    bool any = false;
    for (const GaitEvent& e : steps) {
        if (e.kind != GaitEventKind::StepDetected) continue;
        last_t = std::max(last_t, e.t_ms);
        any = true;
    }
    if (!any) {
        if (!(window_ms > 0.0)) {
            throw Error(errc::invalid_argument, "estimate_cadence: window_ms must be > 0");
        }
        return 0.0;
    }
    return estimate_cadence(steps, window_ms, static_cast<double>(last_t));
}

}  // namespace equilivest::detection
