#include "equilivest/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace equilivest::fusion {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool accel_is_zero(const ImuSample& sample) noexcept {
    return sample.accel[0] == 0.0f && sample.accel[1] == 0.0f && sample.accel[2] == 0.0f;
}

}  // namespace

TiltAngles accel_angles(const ImuSample& sample) {
    if (accel_is_zero(sample)) {
        throw Error(errc::degenerate_input, "accel_angles: zero accel vector");
    }
    const double ax = sample.accel[0];
    const double ay = sample.accel[1];
    const double az = sample.accel[2];
    TiltAngles tilt;
    tilt.roll_deg = std::atan2(-ax, ay) * kRadToDeg;
    tilt.pitch_deg = std::atan2(az, std::sqrt(ax * ax + ay * ay)) * kRadToDeg;
    return tilt;
}

OrientationState complementary_update(const OrientationState& state, const ImuSample& sample,
                                      double dt_s, const FilterConfig& cfg) {
    if (!(dt_s > 0.0)) {
        throw Error(errc::invalid_argument, "complementary_update: dt must be positive");
    }
    const double a = cfg.alpha;
    const double gx = sample.gyro[0];
    const double gy = sample.gyro[1];
    const double gz = sample.gyro[2];

    OrientationState next;
    next.t_ms = sample.t_ms;
    next.yaw_deg = wrap_angle(state.yaw_deg + gy * dt_s);

    if (accel_is_zero(sample)) {
        // Gravity unobservable; integrate gyro only.
        next.pitch_deg = wrap_angle(state.pitch_deg + gx * dt_s);
        next.roll_deg = wrap_angle(state.roll_deg + gz * dt_s);
        return next;
    }

    const TiltAngles tilt = accel_angles(sample);
    next.pitch_deg = wrap_angle(a * (state.pitch_deg + gx * dt_s) + (1.0 - a) * tilt.pitch_deg);
    next.roll_deg = wrap_angle(a * (state.roll_deg + gz * dt_s) + (1.0 - a) * tilt.roll_deg);
    return next;
}

ComplementaryFilter::ComplementaryFilter(const FilterConfig& cfg) : cfg_(cfg) {
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
        throw Error(errc::invalid_argument, "FilterConfig: alpha must be in [0, 1]");
    }
    if (!(cfg.nominal_rate_hz > 0.0)) {
        throw Error(errc::invalid_argument, "FilterConfig: nominal_rate_hz must be positive");
    }
}

void ComplementaryFilter::initialize_from(const ImuSample& sample, double yaw_deg) {
    if (accel_is_zero(sample)) {
        state_ = OrientationState{0.0, 0.0, yaw_deg, sample.t_ms};
    } else {
        const TiltAngles tilt = accel_angles(sample);
        state_ = OrientationState{tilt.roll_deg, tilt.pitch_deg, yaw_deg, sample.t_ms};
    }
    initialized_ = true;
}

OrientationState ComplementaryFilter::update(const ImuSample& sample) {
    if (!initialized_) {
        initialize_from(sample, 0.0);
        return state_;
    }
    if (sample.t_ms < state_.t_ms) {
        throw Error(errc::stream_order, "filter: timestamp moved backwards");
    }
    const double period_s = 1.0 / cfg_.nominal_rate_hz;
    const double dt_raw = static_cast<double>(sample.t_ms - state_.t_ms) / 1000.0;
    if (dt_raw > 20.0 * period_s) {
        // Telemetry gap: the gyro integral is stale, restart from gravity.
        // Yaw has no absolute reference and is carried over.
        initialize_from(sample, state_.yaw_deg);
        return state_;
    }
    const double dt = std::clamp(dt_raw, 0.5 * period_s, 2.0 * period_s);
    state_ = complementary_update(state_, sample, dt, cfg_);
    return state_;
}

void ComplementaryFilter::reset() noexcept {
    state_ = OrientationState{};
    initialized_ = false;
}

std::vector<OrientationState> run_filter(std::span<const ImuSample> stream,
                                         const FilterConfig& cfg) {
    std::vector<OrientationState> out;
    out.reserve(stream.size());
    ComplementaryFilter filter(cfg);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (i > 0 && stream[i].t_ms < stream[i - 1].t_ms) {
            throw Error(errc::stream_order,
                        "run_filter: non-monotone timestamp at index " + std::to_string(i));
        }
        out.push_back(filter.update(stream[i]));
    }
    return out;
}

}  // namespace equilivest::fusion
