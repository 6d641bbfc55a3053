#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "equilivest/types.hpp"

namespace equilivest::sim {

// Deterministic noise source shared by every scenario generator, pinned to a
// fixed algorithm so identical (scenario, seed) pairs reproduce identical
// streams on any platform:
//   - xorshift64* core: x ^= x >> 12; x ^= x << 25; x ^= x >> 27;
//     output = x * 0x2545F4914F6CDD1D. A zero seed is remapped to
//     0x9E3779B97F4A7C15.
//   - next_unit() = (output >> 11) * 2^-53, uniform in [0, 1).
//   - next_gaussian() = Box-Muller on two units: r = sqrt(-2 ln(1 - u1)),
//     returns r*cos(2*pi*u2) now and caches r*sin(2*pi*u2) for the next call.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept
        : state_(seed == 0 ? 0x9E3779B97F4A7C15ull : seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }

    double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_gaussian() noexcept;

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Straight-line walk: periodic raised-cosine angular-rate bursts on gx/gz at
// the configured cadence, gravity-dominated accel with a small step-locked
// perturbation.
struct GaitScenario {
    double cadence_sps = 1.4;
    double stride_rate_amplitude_dps = 15.0;  // burst peak on gx
    double duration_ms = 5000.0;
    double accel_noise_std_g = 0.0;
    double gyro_noise_std_dps = 0.0;
    double rate_hz = 100.0;
};

// Forward lean at a constant pitch rate until the instability angle, then a
// fast runaway rotation to the ground over collapse_duration_ms.
struct LeanFallScenario {
    double lean_rate_dps = 5.0;
    double theta_fall_deg = 20.0;  // ground-truth instability angle
    double collapse_duration_ms = 400.0;
    double duration_ms = 6000.0;
    double accel_noise_std_g = 0.0;
    double gyro_noise_std_dps = 0.0;
    double rate_hz = 100.0;
};

struct GroundTruth {
    std::vector<double> step_t_ms;            // burst peak times
    std::optional<double> fall_onset_ms;      // runaway rotation start
    std::optional<double> instability_t_ms;   // instability angle crossing
};

struct Generated {
    std::vector<ImuSample> samples;
    GroundTruth truth;
};

// Throw errc::config naming the offending field.
void validate(const GaitScenario& scenario);
void validate(const LeanFallScenario& scenario);

Generated gen_gait(const GaitScenario& scenario, std::uint64_t seed);
Generated gen_lean_fall(const LeanFallScenario& scenario, std::uint64_t seed);

// Walk followed by the lean-and-fall with continuous timestamps and sequence
// numbers. Both phases must run at the same sampling rate.
Generated gen_walk_then_fall(const GaitScenario& gait, const LeanFallScenario& fall,
                             std::uint64_t seed);

// Ground truth round-trips through session annotations so recordings carry
// their own labels.
void annotate(SessionMeta& meta, const GroundTruth& truth);
GroundTruth truth_from_annotations(const SessionMeta& meta);

}  // namespace equilivest::sim
