#include "equilivest/types.hpp"

#include <cmath>

namespace equilivest {

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::invalid_argument: return "invalid argument";
        case errc::degenerate_input: return "degenerate input";
        case errc::stream_order: return "stream order";
        case errc::packet_length: return "packet length";
        case errc::packet_magic: return "packet magic";
        case errc::packet_version: return "packet version";
        case errc::packet_integrity: return "packet integrity";
        case errc::transport: return "transport";
        case errc::parse: return "parse";
        case errc::io: return "io";
        case errc::config: return "config";
        case errc::calibration: return "calibration";
        case errc::annotation: return "annotation";
        case errc::degenerate_training: return "degenerate training";
        case errc::shape_mismatch: return "shape mismatch";
        case errc::insufficient_data: return "insufficient data";
        case errc::undefined_measure: return "undefined measure";
        case errc::evaluation: return "evaluation";
    }
    return "unknown";
}

bool sample_in_range(const ImuSample& sample) noexcept {
    for (float a : sample.accel) {
        if (!std::isfinite(a) || std::fabs(a) > kAccelFullScaleG) return false;
    }
    for (float g : sample.gyro) {
        if (!std::isfinite(g) || std::fabs(g) > kGyroFullScaleDps) return false;
    }
    return true;
}

const char* gait_event_kind_name(GaitEventKind kind) noexcept {
    switch (kind) {
        case GaitEventKind::StepDetected: return "step";
        case GaitEventKind::BreakpointCrossed: return "breakpoint";
        case GaitEventKind::FallDetected: return "fall";
    }
    return "unknown";
}

std::optional<GaitEventKind> gait_event_kind_from_name(const std::string& name) noexcept {
    if (name == "step") return GaitEventKind::StepDetected;
    if (name == "breakpoint") return GaitEventKind::BreakpointCrossed;
    if (name == "fall") return GaitEventKind::FallDetected;
    return std::nullopt;
}

std::optional<std::string> SessionMeta::annotation(const std::string& key) const {
    for (const auto& [k, v] : annotations) {
        if (k == key) return v;
    }
    return std::nullopt;
}

void SessionMeta::set_annotation(const std::string& key, std::string value) {
    for (auto& [k, v] : annotations) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    annotations.emplace_back(key, std::move(value));
}

double wrap_angle(double angle_deg) {
    if (!std::isfinite(angle_deg)) {
        throw Error(errc::invalid_argument, "wrap_angle: non-finite angle");
    }
    double r = std::fmod(angle_deg, 360.0);
    if (r <= -180.0) {
        r += 360.0;
    } else if (r > 180.0) {
        r -= 360.0;
    }
    return r;
}

}  // namespace equilivest
