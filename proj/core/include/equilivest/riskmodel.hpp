#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "equilivest/fusion.hpp"
#include "equilivest/types.hpp"

namespace equilivest::risk {

// Channel order: ax ay az gx gy gz pitch. Per channel: mean, variance, RMS,
// min, max, dominant frequency (Hz); plus the window pitch slope (deg/s)
// as the final entry.
inline constexpr std::size_t kChannelCount = 7;
inline constexpr std::size_t kFeaturesPerChannel = 6;
inline constexpr std::size_t kFeatureCount = kChannelCount * kFeaturesPerChannel + 1;

struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    bool operator==(const FeatureVector&) const = default;
};

// Indices into one channel's feature block.
enum ChannelFeature : std::size_t { Mean = 0, Variance, Rms, Min, Max, DominantFreq };

inline constexpr std::size_t feature_index(std::size_t channel, ChannelFeature f) {
    return channel * kFeaturesPerChannel + static_cast<std::size_t>(f);
}
inline constexpr std::size_t kPitchSlopeIndex = kFeatureCount - 1;

// Features over one window of samples plus the aligned pitch trace.
// Dominant frequency is the nonzero DFT bin with maximal magnitude (0 by
// convention for a flat spectrum); slope is a least-squares fit against
// relative time. Throws errc::insufficient_data when the window holds fewer
// than 80% of the samples expected at rate_hz, and errc::shape_mismatch when
// the pitch trace length differs from the sample count.
FeatureVector window_features(std::span<const ImuSample> samples, std::span<const double> pitch_deg,
                              double window_ms, double rate_hz);

struct LabeledWindow {
    FeatureVector features;
    int label = 0;            // 0 = safe, 1 = pre-fall
    double lead_time_ms = 0;  // window end to fall onset; 0 for safe windows
};

struct WindowConfig {
    double window_ms = 1000.0;
    double stride_ms = 250.0;
    double horizon_ms = 1000.0;  // windows ending this close before onset are positive
};

// Slides windows over the recording, running the orientation filter for the
// pitch channel. The fall onset is read from the "fall_onset_ms" annotation
// when present; without one every window is safe. Windows overlapping the
// post-fall period are discarded. Throws errc::annotation when the onset
// falls outside the recorded span.
std::vector<LabeledWindow> label_windows(const SessionRecording& recording,
                                         const WindowConfig& window_cfg = {},
                                         const fusion::FilterConfig& filter_cfg = {});

inline constexpr const char* kFallOnsetAnnotation = "fall_onset_ms";

struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 300;
    double l2 = 1e-3;
};

// L2-regularized logistic regression over standardized features. Training is
// deterministic: zero initial weights, fixed pass order, full-batch steps.
struct RiskModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> feature_means;
    std::vector<double> feature_scales;
    TrainConfig hyper;
};

// Throws errc::degenerate_training unless both classes are present.
// epoch_loss, when given, receives the regularized loss after every epoch.
RiskModel train(std::span<const LabeledWindow> data, const TrainConfig& cfg = {},
                std::vector<double>* epoch_loss = nullptr);

// Sigmoid of the normalized dot product plus bias, in [0, 1].
// Throws errc::shape_mismatch when the model width differs from the input.
double predict(const RiskModel& model, const FeatureVector& features);

struct ThresholdMetrics {
    double threshold = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double mean_lead_time_ms = 0.0;  // averaged over true positives
};

// Throws errc::evaluation on an empty test set.
std::vector<ThresholdMetrics> evaluate(const RiskModel& model,
                                       std::span<const LabeledWindow> test_set,
                                       std::span<const double> thresholds);

// Text persistence: one metadata line (feature count, hyperparameters), then
// means, scales, weights and bias, all full round-trip precision.
void save_model(const RiskModel& model, const std::filesystem::path& path);
RiskModel load_model(const std::filesystem::path& path);

}  // namespace equilivest::risk
