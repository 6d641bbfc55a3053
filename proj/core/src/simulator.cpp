#include "equilivest/simulator.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace equilivest::sim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

[[noreturn]] void bad_field(const std::string& field, const std::string& requirement) {
    throw Error(errc::config, field + " " + requirement);
}

std::string to_text(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

double parse_double_or(const std::string& text, const char* what) {
    double value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(errc::annotation, std::string("bad ") + what + " annotation '" + text + "'");
    }
    return value;
}

// Raised-cosine burst envelope, peak 1 at peak_t_ms, support width width_ms.
double burst_envelope(double t_ms, double peak_t_ms, double width_ms) {
    const double offset = t_ms - peak_t_ms;
    if (std::fabs(offset) > width_ms / 2.0) return 0.0;
    return 0.5 * (1.0 + std::cos(2.0 * kPi * offset / width_ms));
}

void add_noise(ImuSample& sample, Rng& rng, double accel_std, double gyro_std) {
    for (int i = 0; i < 3; ++i) {
        sample.accel[i] += static_cast<float>(accel_std * rng.next_gaussian());
    }
    for (int i = 0; i < 3; ++i) {
        sample.gyro[i] += static_cast<float>(gyro_std * rng.next_gaussian());
    }
}

void gen_gait_into(const GaitScenario& sc, Rng& rng, double t_offset_ms,
                   std::uint32_t seq_offset, std::vector<ImuSample>& samples,
                   GroundTruth& truth) {
    const double period_ms = 1000.0 / sc.cadence_sps;
    const double width_ms = 0.5 * period_ms;
    const auto step_count =
        static_cast<std::size_t>(std::floor(sc.cadence_sps * sc.duration_ms / 1000.0));
    for (std::size_t k = 0; k < step_count; ++k) {
        truth.step_t_ms.push_back(t_offset_ms + (static_cast<double>(k) + 0.5) * period_ms);
    }

    const auto n = static_cast<std::size_t>(std::floor(sc.duration_ms * sc.rate_hz / 1000.0));
    samples.reserve(samples.size() + n);
    for (std::size_t i = 0; i < n; ++i) {
        const double local_t = std::round(static_cast<double>(i) * 1000.0 / sc.rate_hz);
        const auto step = static_cast<std::size_t>(std::floor(local_t / period_ms));
        double env = 0.0;
        double sign = 1.0;
        if (step < step_count) {
            env = burst_envelope(local_t, (static_cast<double>(step) + 0.5) * period_ms, width_ms);
            sign = step % 2 == 0 ? 1.0 : -1.0;
        }
        ImuSample s;
        s.t_ms = static_cast<std::uint64_t>(t_offset_ms + local_t);
        s.seq = seq_offset + static_cast<std::uint32_t>(i);
        s.accel[0] = 0.0f;
        s.accel[1] = static_cast<float>(1.0 - 0.01 * env);
        s.accel[2] = static_cast<float>(0.02 * env * sign);
        s.gyro[0] = static_cast<float>(sc.stride_rate_amplitude_dps * env * sign);
        s.gyro[1] = 0.0f;
        s.gyro[2] = static_cast<float>(-0.6 * sc.stride_rate_amplitude_dps * env * sign);
        add_noise(s, rng, sc.accel_noise_std_g, sc.gyro_noise_std_dps);
        samples.push_back(s);
    }
}

void gen_lean_fall_into(const LeanFallScenario& sc, Rng& rng, double t_offset_ms,
                        std::uint32_t seq_offset, std::vector<ImuSample>& samples,
                        GroundTruth& truth) {
    const double t_star_ms = sc.theta_fall_deg / sc.lean_rate_dps * 1000.0;
    const bool falls = t_star_ms <= sc.duration_ms;
    if (falls) {
        truth.instability_t_ms = t_offset_ms + t_star_ms;
        truth.fall_onset_ms = t_offset_ms + t_star_ms;
    }

    const auto n = static_cast<std::size_t>(std::floor(sc.duration_ms * sc.rate_hz / 1000.0));
    samples.reserve(samples.size() + n);
    for (std::size_t i = 0; i < n; ++i) {
        const double local_t = std::round(static_cast<double>(i) * 1000.0 / sc.rate_hz);
        double pitch_deg;
        double pitch_rate_dps;
        if (local_t <= t_star_ms || !falls) {
            pitch_deg = sc.lean_rate_dps * local_t / 1000.0;
            pitch_rate_dps = sc.lean_rate_dps;
        } else if (local_t <= t_star_ms + sc.collapse_duration_ms) {
            // Smooth runaway from the instability angle to the ground.
            const double tau = (local_t - t_star_ms) / sc.collapse_duration_ms;
            const double span = 90.0 - sc.theta_fall_deg;
            pitch_deg = sc.theta_fall_deg + span * 0.5 * (1.0 - std::cos(kPi * tau));
            pitch_rate_dps = span * 0.5 * kPi * std::sin(kPi * tau) / sc.collapse_duration_ms * 1000.0;
        } else {
            pitch_deg = 90.0;
            pitch_rate_dps = 0.0;
        }
        ImuSample s;
        s.t_ms = static_cast<std::uint64_t>(t_offset_ms + local_t);
        s.seq = seq_offset + static_cast<std::uint32_t>(i);
        const double pitch_rad = pitch_deg * kDegToRad;
        s.accel[0] = 0.0f;
        s.accel[1] = static_cast<float>(std::cos(pitch_rad));
        s.accel[2] = static_cast<float>(std::sin(pitch_rad));
        s.gyro[0] = static_cast<float>(pitch_rate_dps);
        s.gyro[1] = 0.0f;
        s.gyro[2] = 0.0f;
        add_noise(s, rng, sc.accel_noise_std_g, sc.gyro_noise_std_dps);
        samples.push_back(s);
    }
}

}  // namespace

double Rng::next_gaussian() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double angle = 2.0 * kPi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
}

void validate(const GaitScenario& sc) {
    if (!(sc.cadence_sps > 0.0)) bad_field("gait.cadence_sps", "must be > 0");
    if (!(sc.stride_rate_amplitude_dps > 0.0)) bad_field("gait.stride_rate_amplitude_dps", "must be > 0");
    if (!(sc.duration_ms > 0.0)) bad_field("gait.duration_ms", "must be > 0");
    if (sc.accel_noise_std_g < 0.0) bad_field("gait.accel_noise_std_g", "must be >= 0");
    if (sc.gyro_noise_std_dps < 0.0) bad_field("gait.gyro_noise_std_dps", "must be >= 0");
    if (!(sc.rate_hz > 0.0)) bad_field("gait.rate_hz", "must be > 0");
}

void validate(const LeanFallScenario& sc) {
    if (!(sc.lean_rate_dps > 0.0)) bad_field("lean_fall.lean_rate_dps", "must be > 0");
    if (!(sc.theta_fall_deg > 0.0)) bad_field("lean_fall.theta_fall_deg", "must be > 0");
    if (!(sc.collapse_duration_ms > 0.0)) bad_field("lean_fall.collapse_duration_ms", "must be > 0");
    if (!(sc.duration_ms > 0.0)) bad_field("lean_fall.duration_ms", "must be > 0");
    if (sc.accel_noise_std_g < 0.0) bad_field("lean_fall.accel_noise_std_g", "must be >= 0");
    if (sc.gyro_noise_std_dps < 0.0) bad_field("lean_fall.gyro_noise_std_dps", "must be >= 0");
    if (!(sc.rate_hz > 0.0)) bad_field("lean_fall.rate_hz", "must be > 0");
}

Generated gen_gait(const GaitScenario& scenario, std::uint64_t seed) {
    validate(scenario);
    Generated out;
    Rng rng(seed);
    gen_gait_into(scenario, rng, 0.0, 0, out.samples, out.truth);
    return out;
}

Generated gen_lean_fall(const LeanFallScenario& scenario, std::uint64_t seed) {
    validate(scenario);
    Generated out;
    Rng rng(seed);
    gen_lean_fall_into(scenario, rng, 0.0, 0, out.samples, out.truth);
    return out;
}

Generated gen_walk_then_fall(const GaitScenario& gait, const LeanFallScenario& fall,
                             std::uint64_t seed) {
    validate(gait);
    validate(fall);
    if (gait.rate_hz != fall.rate_hz) {
        bad_field("lean_fall.rate_hz", "must match gait.rate_hz for a continuous stream");
    }
    Generated out;
    Rng rng(seed);
    gen_gait_into(gait, rng, 0.0, 0, out.samples, out.truth);
    gen_lean_fall_into(fall, rng, gait.duration_ms,
                       static_cast<std::uint32_t>(out.samples.size()), out.samples, out.truth);
    return out;
}

void annotate(SessionMeta& meta, const GroundTruth& truth) {
    if (truth.fall_onset_ms) meta.set_annotation("fall_onset_ms", to_text(*truth.fall_onset_ms));
    if (truth.instability_t_ms) {
        meta.set_annotation("instability_t_ms", to_text(*truth.instability_t_ms));
    }
    if (!truth.step_t_ms.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < truth.step_t_ms.size(); ++i) {
            if (i > 0) joined += ';';
            joined += to_text(truth.step_t_ms[i]);
        }
        meta.set_annotation("step_times_ms", joined);
    }
}

GroundTruth truth_from_annotations(const SessionMeta& meta) {
    GroundTruth truth;
    if (auto v = meta.annotation("fall_onset_ms")) {
        truth.fall_onset_ms = parse_double_or(*v, "fall_onset_ms");
    }
    if (auto v = meta.annotation("instability_t_ms")) {
        truth.instability_t_ms = parse_double_or(*v, "instability_t_ms");
    }
    if (auto v = meta.annotation("step_times_ms")) {
        std::size_t start = 0;
        const std::string& text = *v;
        while (start <= text.size()) {
            std::size_t stop = text.find(';', start);
            if (stop == std::string::npos) stop = text.size();
            if (stop > start) {
                truth.step_t_ms.push_back(
                    parse_double_or(text.substr(start, stop - start), "step_times_ms"));
            }
            start = stop + 1;
        }
    }
    return truth;
}

}  // namespace equilivest::sim
