#pragma once

#include <span>
#include <vector>

#include "equilivest/types.hpp"

namespace equilivest::fusion {

// Complementary filter blend: alpha weights the gyro integral, (1 - alpha)
// the accelerometer tilt angles.
struct FilterConfig {
    double alpha = 0.98;
    double nominal_rate_hz = 100.0;
};

struct TiltAngles {
    double roll_deg = 0.0;
    double pitch_deg = 0.0;
};

// Gravity-decomposition tilt from one sample:
//   roll  = atan2(-ax, ay), pitch = atan2(az, sqrt(ax^2 + ay^2)).
// Forward lean gives positive pitch. Throws errc::degenerate_input for a
// zero accel vector (caller holds its previous estimate).
TiltAngles accel_angles(const ImuSample& sample);

// One filter step over dt_s seconds:
//   pitch' = wrap(a*(pitch + gx*dt) + (1-a)*pitch_acc)
//   roll'  = wrap(a*(roll  + gz*dt) + (1-a)*roll_acc)
//   yaw'   = wrap(yaw + gy*dt)            (gravity cannot observe yaw)
// A zero accel vector falls back to gyro-only roll/pitch.
// Throws errc::invalid_argument for dt_s <= 0.
OrientationState complementary_update(const OrientationState& state, const ImuSample& sample,
                                      double dt_s, const FilterConfig& cfg);

// Streaming filter with the run_filter policies built in: first-sample
// initialization from accelerometer tilt (yaw = 0), dt clamped to
// [0.5, 2] x nominal period, and re-initialization from the accelerometer
// after a gap longer than 20 nominal periods.
class ComplementaryFilter {
public:
    explicit ComplementaryFilter(const FilterConfig& cfg);

    // Consumes one sample and returns the updated state.
    // Throws errc::stream_order if the timestamp moves backwards.
    OrientationState update(const ImuSample& sample);

    bool initialized() const noexcept { return initialized_; }
    const OrientationState& state() const noexcept { return state_; }
    void reset() noexcept;

private:
    FilterConfig cfg_;
    OrientationState state_{};
    bool initialized_ = false;

    void initialize_from(const ImuSample& sample, double yaw_deg);
};

// One OrientationState per sample. Empty stream yields empty output.
// Throws errc::stream_order naming the offending index when timestamps
// decrease.
std::vector<OrientationState> run_filter(std::span<const ImuSample> stream,
                                         const FilterConfig& cfg);

}  // namespace equilivest::fusion
