#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "equilivest/types.hpp"

namespace equilivest::detection {

struct PitchSample {
    std::uint64_t t_ms = 0;
    double pitch_deg = 0.0;
};

struct RateSample {
    std::uint64_t t_ms = 0;
    double gx_dps = 0.0;
    double gz_dps = 0.0;
};

struct BreakpointConfig {
    double theta_star_deg = 15.0;  // pitch beyond which the fall is treated as unavoidable
    double hysteresis_deg = 2.0;   // re-arm band below the threshold
    double min_dwell_ms = 50.0;    // pitch must stay above threshold this long
};

struct StepDetectorConfig {
    double peak_threshold = 8.0;  // minimum smoothed gx/gz magnitude [deg/s]
    double refractory_ms = 300.0;
    int smoothing_window = 5;  // centered moving average length, samples
};

// Dwell-and-hysteresis threshold crossing. Fires once per excursion: pitch
// must hold >= theta_star for min_dwell_ms, and the detector re-arms only
// after pitch < theta_star - hysteresis.
class BreakpointDetector {
public:
    explicit BreakpointDetector(const BreakpointConfig& cfg);

    std::optional<GaitEvent> update(std::uint64_t t_ms, double pitch_deg);
    void reset() noexcept;

private:
    enum class Phase { Armed, Tracking, Refractory };
    BreakpointConfig cfg_;
    Phase phase_ = Phase::Armed;
    std::uint64_t entered_t_ms_ = 0;
};

std::vector<GaitEvent> detect_breakpoint(std::span<const PitchSample> pitch,
                                         const BreakpointConfig& cfg);

// One pitch stream per fall run plus the labeled fall onset time.
struct LabeledFallRun {
    std::vector<PitchSample> pitch;
    double fall_onset_ms = 0.0;
};

// theta_star = nearest-rank p-th percentile of the per-run pitch at fall
// onset; hysteresis 2 deg and dwell 50 ms defaults. Order-invariant.
// Throws errc::calibration on empty input.
BreakpointConfig calibrate_breakpoint(std::span<const LabeledFallRun> runs, int percentile = 10);

// Peak detector over the centered-moving-average-smoothed gx/gz magnitude.
// A step is a local maximum at or above peak_threshold separated from the
// previous step by at least refractory_ms. Emits events a few samples late
// (the smoother needs future context); identical output online and batch.
class StepDetector {
public:
    explicit StepDetector(const StepDetectorConfig& cfg);

    // Feed one sample; returns any step events that became decidable.
    std::vector<GaitEvent> update(std::uint64_t t_ms, double gx_dps, double gz_dps);
    // Flush the tail of the stream; call once at end of input.
    std::vector<GaitEvent> finish();
    void reset() noexcept;

private:
    struct Raw {
        std::uint64_t t_ms;
        double gx, gz;
    };
    struct Smoothed {
        std::uint64_t t_ms;
        double magnitude;
    };

    StepDetectorConfig cfg_;
    std::deque<Raw> raw_;             // pending samples awaiting smoothing context
    std::deque<Smoothed> smoothed_;   // last up-to-3 smoothed points for the peak test
    std::size_t emitted_smooth_ = 0;  // count of smoothed values produced so far
    std::size_t total_raw_ = 0;
    bool have_last_step_ = false;
    std::uint64_t last_step_t_ms_ = 0;

    std::optional<GaitEvent> push_smoothed(std::uint64_t t_ms, double magnitude);
    double smooth_at(std::size_t center_offset) const;
};

std::vector<GaitEvent> detect_steps(std::span<const RateSample> gyro,
                                    const StepDetectorConfig& cfg);

// Steps in the trailing window ending at at_t_ms divided by the window
// length; 0 when fewer than 2 steps fall inside the window. The two-argument
// form anchors the window at the last step. Throws errc::invalid_argument
// for window_ms <= 0.
double estimate_cadence(std::span<const GaitEvent> steps, double window_ms, double at_t_ms);
double estimate_cadence(std::span<const GaitEvent> steps, double window_ms);

}  // namespace equilivest::detection
