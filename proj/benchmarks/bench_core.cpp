#include <benchmark/benchmark.h>

#include <vector>

#include "equilivest/detection.hpp"
#include "equilivest/fusion.hpp"
#include "equilivest/riskmodel.hpp"
#include "equilivest/simulator.hpp"
#include "equilivest/telemetry.hpp"

using namespace equilivest;

namespace {

std::vector<ImuSample> gait_stream(std::size_t n) {
    sim::GaitScenario sc;
    sc.duration_ms = static_cast<double>(n) * 10.0;
    sc.gyro_noise_std_dps = 0.5;
    sc.accel_noise_std_g = 0.005;
    return sim::gen_gait(sc, 11).samples;
}

}  // namespace

static void FilterThroughput(benchmark::State& state) {
    const auto stream = gait_stream(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto out = fusion::run_filter(stream, {});
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(FilterThroughput)->Range(1000, 100000);

static void PacketEncodeDecode(benchmark::State& state) {
    const auto stream = gait_stream(256);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto bytes = telemetry::encode_packet(stream[i % stream.size()]);
        auto decoded = telemetry::decode_packet(bytes);
        benchmark::DoNotOptimize(decoded);
        ++i;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(PacketEncodeDecode);

static void StepDetection(benchmark::State& state) {
    const auto stream = gait_stream(static_cast<std::size_t>(state.range(0)));
    std::vector<detection::RateSample> gyro;
    for (const auto& s : stream) gyro.push_back({s.t_ms, s.gyro[0], s.gyro[2]});
    for (auto _ : state) {
        auto events = detection::detect_steps(gyro, {});
        benchmark::DoNotOptimize(events);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(StepDetection)->Range(1000, 100000);

static void WindowFeatureExtraction(benchmark::State& state) {
    const auto stream = gait_stream(100);
    std::vector<double> pitch(stream.size(), 1.0);
    for (auto _ : state) {
        auto features = risk::window_features(stream, pitch, 1000.0, 100.0);
        benchmark::DoNotOptimize(features);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(WindowFeatureExtraction);

BENCHMARK_MAIN();
