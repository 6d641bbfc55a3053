#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "equilivest/errors.hpp"

namespace equilivest {

// Sensor full-scale bounds used as validity limits on incoming data.
inline constexpr double kAccelFullScaleG = 16.0;
inline constexpr double kGyroFullScaleDps = 2000.0;

// Body frame: X = medio-lateral (left), Y = vertical (up), Z = anterior.
// Quiet stance reads accel = (0, +1, 0) g. Pitch rotates about X (sagittal),
// roll about Z (coronal), yaw about Y (horizontal).

// One timestamped 6-axis inertial reading. accel in g, gyro in deg/s.
// Components are stored as float to match the wire format exactly.
struct ImuSample {
    std::uint64_t t_ms = 0;
    std::array<float, 3> accel{};  // ax, ay, az [g]
    std::array<float, 3> gyro{};   // gx, gy, gz [deg/s]
    std::uint32_t seq = 0;

    bool operator==(const ImuSample&) const = default;
};

// True when every component is finite and inside the sensor full-scale range.
bool sample_in_range(const ImuSample& sample) noexcept;

// Roll/pitch/yaw estimate in degrees, each wrapped to (-180, 180].
struct OrientationState {
    double roll_deg = 0.0;   // about Z (anterior), coronal plane
    double pitch_deg = 0.0;  // about X (medio-lateral), sagittal plane
    double yaw_deg = 0.0;    // about Y (vertical), horizontal plane
    std::uint64_t t_ms = 0;

    bool operator==(const OrientationState&) const = default;
};

enum class GaitEventKind { StepDetected, BreakpointCrossed, FallDetected };

const char* gait_event_kind_name(GaitEventKind kind) noexcept;
std::optional<GaitEventKind> gait_event_kind_from_name(const std::string& name) noexcept;

// Discrete detection. value is the step peak magnitude for steps, the pitch
// at crossing for breakpoints, and the peak pitch for falls.
struct GaitEvent {
    GaitEventKind kind = GaitEventKind::StepDetected;
    std::uint64_t t_ms = 0;
    double value = 0.0;

    bool operator==(const GaitEvent&) const = default;
};

// Vibrotactile actuation request. frequency_hz == 0 means motor off.
struct MotorCommand {
    double frequency_hz = 0.0;
    double intensity = 0.0;    // normalized [0, 1]
    double duration_ms = 0.0;  // validity window; > 0 whenever frequency > 0

    bool operator==(const MotorCommand&) const = default;
};

// Command paired with its emission time. Pulse schedules can place commands
// between sample ticks, so the time is fractional milliseconds.
struct TimedMotorCommand {
    double t_ms = 0.0;
    MotorCommand command{};

    bool operator==(const TimedMotorCommand&) const = default;
};

struct SessionMeta {
    std::string session_id;
    std::string start_time;  // wall-clock, informational only
    std::string scenario;
    // Free-form key=value pairs (e.g. simulator ground truth used as labels).
    std::vector<std::pair<std::string, std::string>> annotations;

    bool operator==(const SessionMeta&) const = default;

    std::optional<std::string> annotation(const std::string& key) const;
    void set_annotation(const std::string& key, std::string value);
};

// Everything captured in one session: samples sorted by t_ms with strictly
// increasing seq, plus time-ordered events and emitted commands.
struct SessionRecording {
    SessionMeta meta;
    std::vector<ImuSample> samples;
    // Device-side orientation estimates; either empty or one entry per sample.
    std::vector<std::optional<OrientationState>> device_orientation;
    std::vector<GaitEvent> events;
    std::vector<TimedMotorCommand> commands;

    bool operator==(const SessionRecording&) const = default;
};

// Reduces an angle to the equivalent value in (-180, 180].
// Throws errc::invalid_argument for non-finite input.
double wrap_angle(double angle_deg);

}  // namespace equilivest
