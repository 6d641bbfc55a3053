#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "equilivest/fusion.hpp"

using namespace equilivest;
using namespace equilivest::fusion;

namespace {

ImuSample sample_at(std::uint64_t t_ms, std::array<float, 3> accel, std::array<float, 3> gyro,
                    std::uint32_t seq = 0) {
    ImuSample s;
    s.t_ms = t_ms;
    s.accel = accel;
    s.gyro = gyro;
    s.seq = seq;
    return s;
}

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

TEST_CASE("accel_angles recovers analytic tilt geometry") {
    auto flat = accel_angles(sample_at(0, {0, 1, 0}, {0, 0, 0}));
    CHECK(flat.roll_deg == 0.0);
    CHECK(flat.pitch_deg == 0.0);

    auto lean30 = accel_angles(
        sample_at(0, {0, static_cast<float>(std::cos(30 * kDeg)), static_cast<float>(std::sin(30 * kDeg))}, {0, 0, 0}));
    CHECK(std::fabs(lean30.pitch_deg - 30.0) < 1e-4);
    CHECK(std::fabs(lean30.roll_deg) < 1e-4);

    auto roll45 = accel_angles(
        sample_at(0, {static_cast<float>(-std::sin(45 * kDeg)), static_cast<float>(std::cos(45 * kDeg)), 0}, {0, 0, 0}));
    CHECK(std::fabs(roll45.roll_deg - 45.0) < 1e-4);
    CHECK(std::fabs(roll45.pitch_deg) < 1e-4);
}

TEST_CASE("accel_angles rejects the zero vector") {
    CHECK_THROWS_AS(accel_angles(sample_at(0, {0, 0, 0}, {0, 0, 0})), Error);
    try {
        accel_angles(sample_at(0, {0, 0, 0}, {0, 0, 0}));
    } catch (const Error& e) {
        CHECK(e.code() == errc::degenerate_input);
    }
}

TEST_CASE("complementary_update fixed point at quiet stance") {
    OrientationState state{0, 0, 0, 0};
    FilterConfig cfg;
    auto next = complementary_update(state, sample_at(10, {0, 1, 0}, {0, 0, 0}), 0.01, cfg);
    CHECK(std::fabs(next.roll_deg) < 1e-9);
    CHECK(std::fabs(next.pitch_deg) < 1e-9);
    CHECK(std::fabs(next.yaw_deg) < 1e-9);
    CHECK(next.t_ms == 10);
}

TEST_CASE("complementary_update blends gyro integral with accelerometer tilt") {
    OrientationState state{0, 10.0, 0, 0};
    FilterConfig cfg;  // alpha 0.98
    const auto tilt10 =
        sample_at(10, {0, static_cast<float>(std::cos(10 * kDeg)), static_cast<float>(std::sin(10 * kDeg))},
                  {100.0f, 0, 0});
    auto next = complementary_update(state, tilt10, 0.01, cfg);
    // 0.98 * (10 + 1) + 0.02 * 10
    CHECK(std::fabs(next.pitch_deg - 10.98) < 1e-5);
}

TEST_CASE("alpha extremes collapse to the pure estimators") {
    FilterConfig accel_only{0.0, 100.0};
    FilterConfig gyro_only{1.0, 100.0};
    OrientationState state{3.0, -7.0, 11.0, 0};
    const auto s = sample_at(10, {0.1f, 0.9f, 0.2f}, {35.0f, -12.0f, 19.0f});

    auto a = complementary_update(state, s, 0.01, accel_only);
    const auto tilt = accel_angles(s);
    CHECK(a.pitch_deg == tilt.pitch_deg);
    CHECK(a.roll_deg == tilt.roll_deg);

    auto g = complementary_update(state, s, 0.01, gyro_only);
    CHECK(g.pitch_deg == wrap_angle(state.pitch_deg + 35.0 * 0.01));
    CHECK(g.roll_deg == wrap_angle(state.roll_deg + 19.0 * 0.01));
    CHECK(g.yaw_deg == wrap_angle(state.yaw_deg + -12.0 * 0.01));
}

TEST_CASE("complementary_update validates dt and degrades to gyro-only on zero accel") {
    OrientationState state{0, 5.0, 0, 0};
    FilterConfig cfg;
    CHECK_THROWS_AS(complementary_update(state, sample_at(10, {0, 1, 0}, {0, 0, 0}), 0.0, cfg), Error);
    CHECK_THROWS_AS(complementary_update(state, sample_at(10, {0, 1, 0}, {0, 0, 0}), -0.01, cfg), Error);

    auto next = complementary_update(state, sample_at(10, {0, 0, 0}, {10.0f, 0, 0}), 0.01, cfg);
    CHECK(next.pitch_deg == doctest::Approx(5.0 + 0.1));
}

TEST_CASE("convergence error is exactly alpha^n of the initial error") {
    // Gravity-aligned accel gives pitch_acc = 0 exactly, so each update
    // multiplies the pitch error by alpha with no other rounding paths.
    FilterConfig cfg;
    OrientationState state{0, 10.0, 0, 0};
    double expected = 10.0;
    for (int n = 1; n <= 200; ++n) {
        state = complementary_update(state, sample_at(static_cast<std::uint64_t>(10 * n), {0, 1, 0}, {0, 0, 0}),
                                     0.01, cfg);
        expected *= cfg.alpha;
        CHECK(state.pitch_deg == expected);
    }
}

TEST_CASE("run_filter on an empty or static stream") {
    FilterConfig cfg;
    CHECK(run_filter({}, cfg).empty());

    std::vector<ImuSample> stream;
    for (int i = 0; i < 1000; ++i) {
        stream.push_back(sample_at(static_cast<std::uint64_t>(10 * i), {0, 1, 0}, {0, 0, 0},
                                   static_cast<std::uint32_t>(i)));
    }
    auto states = run_filter(stream, cfg);
    REQUIRE(states.size() == stream.size());
    for (const auto& st : states) {
        CHECK(std::fabs(st.roll_deg) < 1e-9);
        CHECK(std::fabs(st.pitch_deg) < 1e-9);
        CHECK(std::fabs(st.yaw_deg) < 1e-9);
    }
}

TEST_CASE("run_filter under constant rotation with frozen accel follows the geometric recursion") {
    FilterConfig cfg;
    std::vector<ImuSample> stream;
    for (int i = 0; i <= 100; ++i) {
        stream.push_back(sample_at(static_cast<std::uint64_t>(10 * i), {0, 1, 0}, {90.0f, 0, 0}));
    }
    auto states = run_filter(stream, cfg);

    // Hand recursion: p0 = 0 (init from accel), p' = a*(p + 0.9) + (1-a)*0.
    double expected = 0.0;
    for (int i = 1; i <= 100; ++i) {
        expected = cfg.alpha * (expected + 90.0 * 0.01);
    }
    CHECK(states.back().pitch_deg == doctest::Approx(expected).epsilon(1e-12));
    CHECK(states.back().pitch_deg > 0.0);
    CHECK(states.back().pitch_deg < 90.0);
}

TEST_CASE("run_filter is deterministic and keeps angles wrapped") {
    FilterConfig cfg;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> acc(-2.0f, 2.0f);
    std::uniform_real_distribution<float> gyr(-500.0f, 500.0f);
    std::vector<ImuSample> stream;
    for (int i = 0; i < 2000; ++i) {
        stream.push_back(sample_at(static_cast<std::uint64_t>(10 * i),
                                   {acc(rng), acc(rng), acc(rng)}, {gyr(rng), gyr(rng), gyr(rng)}));
    }
    auto a = run_filter(stream, cfg);
    auto b = run_filter(stream, cfg);
    CHECK(a == b);
    for (const auto& st : a) {
        CHECK(st.roll_deg > -180.0);
        CHECK(st.roll_deg <= 180.0);
        CHECK(st.pitch_deg > -180.0);
        CHECK(st.pitch_deg <= 180.0);
        CHECK(st.yaw_deg > -180.0);
        CHECK(st.yaw_deg <= 180.0);
    }
}

TEST_CASE("run_filter reports the index of a backwards timestamp") {
    FilterConfig cfg;
    std::vector<ImuSample> stream = {
        sample_at(0, {0, 1, 0}, {0, 0, 0}),
        sample_at(10, {0, 1, 0}, {0, 0, 0}),
        sample_at(5, {0, 1, 0}, {0, 0, 0}),
    };
    try {
        run_filter(stream, cfg);
        FAIL("expected stream order error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::stream_order);
        CHECK(std::string(e.what()).find("index 2") != std::string::npos);
    }
}

TEST_CASE("run_filter re-initializes from gravity after a telemetry gap") {
    FilterConfig cfg;
    const float c30 = static_cast<float>(std::cos(30 * kDeg));
    const float s30 = static_cast<float>(std::sin(30 * kDeg));
    std::vector<ImuSample> stream = {
        sample_at(0, {0, 1, 0}, {0, 0, 0}),
        sample_at(10, {0, 1, 0}, {0, 0, 0}),
        // > 20 nominal periods later, now leaning 30 degrees
        sample_at(500, {0, c30, s30}, {0, 0, 0}),
    };
    auto states = run_filter(stream, cfg);
    CHECK(std::fabs(states.back().pitch_deg - 30.0) < 1e-4);
}

TEST_CASE("run_filter clamps dt against jitter") {
    FilterConfig cfg{1.0, 100.0};  // pure gyro integration to expose dt directly
    std::vector<ImuSample> stream = {
        sample_at(0, {0, 1, 0}, {0, 0, 0}),
        sample_at(1, {0, 1, 0}, {100.0f, 0, 0}),    // raw dt 1 ms, clamped up to 5 ms
        sample_at(100, {0, 1, 0}, {100.0f, 0, 0}),  // raw dt 99 ms, clamped down to 20 ms
    };
    auto states = run_filter(stream, cfg);
    CHECK(states[1].pitch_deg == doctest::Approx(100.0 * 0.005));
    CHECK(states[2].pitch_deg == doctest::Approx(100.0 * 0.005 + 100.0 * 0.02));
}
