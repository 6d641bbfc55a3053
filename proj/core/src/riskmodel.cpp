#include "equilivest/riskmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace equilivest::risk {

namespace {

double sigmoid(double s) noexcept {
    if (s >= 0.0) {
        return 1.0 / (1.0 + std::exp(-s));
    }
    const double e = std::exp(s);
    return e / (1.0 + e);
}

// log(1 + exp(s)) without overflow.
double softplus(double s) noexcept { return std::max(s, 0.0) + std::log1p(std::exp(-std::fabs(s))); }

struct ChannelStats {
    double mean, variance, rms, min, max, dominant_freq;
};

ChannelStats channel_stats(std::span<const double> x, double rate_hz) {
    const std::size_t n = x.size();
    ChannelStats s{};
    double sum = 0.0, sum_sq = 0.0;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (double v : x) {
        sum += v;
        sum_sq += v * v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(n);
    s.variance = std::max(0.0, sum_sq / static_cast<double>(n) - s.mean * s.mean);
    s.rms = std::sqrt(sum_sq / static_cast<double>(n));

    // Dominant frequency: strongest nonzero DFT bin of the mean-removed
    // signal; 0 when the spectrum is flat at numerical noise level.
    double best_mag_sq = 0.0;
    std::size_t best_bin = 0;
    double max_abs = 0.0;
    for (double v : x) max_abs = std::max(max_abs, std::fabs(v - s.mean));
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const double wr = std::cos(angle);
        const double wi = std::sin(angle);
        double cr = 1.0, ci = 0.0;  // running e^{-2*pi*i*j*k/n}
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = x[j] - s.mean;
            re += v * cr;
            im += v * ci;
            const double nr = cr * wr - ci * wi;
            ci = cr * wi + ci * wr;
            cr = nr;
        }
        const double mag_sq = re * re + im * im;
        if (mag_sq > best_mag_sq) {
            best_mag_sq = mag_sq;
            best_bin = k;
        }
    }
    const double noise_floor = 1e-9 * static_cast<double>(n) * (1.0 + max_abs);
    if (best_bin == 0 || std::sqrt(best_mag_sq) <= noise_floor) {
        s.dominant_freq = 0.0;
    } else {
        s.dominant_freq = static_cast<double>(best_bin) * rate_hz / static_cast<double>(n);
    }
    return s;
}

double least_squares_slope(std::span<const ImuSample> samples, std::span<const double> y) {
    const std::size_t n = samples.size();
    if (n < 2) return 0.0;
    const double t0 = static_cast<double>(samples.front().t_ms);
    double t_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_mean += (static_cast<double>(samples[i].t_ms) - t0) / 1000.0;
        y_mean += y[i];
    }
    t_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = (static_cast<double>(samples[i].t_ms) - t0) / 1000.0 - t_mean;
        num += dt * (y[i] - y_mean);
        den += dt * dt;
    }
    return den > 0.0 ? num / den : 0.0;
}

template <typename T>
std::string to_text(T value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& what) {
    double value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(errc::parse, "model file: bad " + what + " '" + text + "'");
    }
    return value;
}

std::vector<double> parse_vector(std::istream& in, std::size_t n, const std::string& what) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string token;
        if (!(in >> token)) throw Error(errc::parse, "model file: truncated " + what);
        out.push_back(parse_double(token, what));
    }
    return out;
}

}  // namespace

FeatureVector window_features(std::span<const ImuSample> samples, std::span<const double> pitch_deg,
                              double window_ms, double rate_hz) {
    if (samples.size() != pitch_deg.size()) {
        throw Error(errc::shape_mismatch, "window_features: pitch trace length mismatch");
    }
    const double expected = window_ms * rate_hz / 1000.0;
    if (static_cast<double>(samples.size()) < 0.8 * expected || samples.empty()) {
        throw Error(errc::insufficient_data,
                    "window_features: " + std::to_string(samples.size()) + " samples, expected ~" +
                        std::to_string(expected));
    }

    const std::size_t n = samples.size();
    std::vector<double> channel(n);
    FeatureVector fv;
    for (std::size_t ch = 0; ch < kChannelCount; ++ch) {
        for (std::size_t i = 0; i < n; ++i) {
            if (ch < 3) {
                channel[i] = samples[i].accel[ch];
            } else if (ch < 6) {
                channel[i] = samples[i].gyro[ch - 3];
            } else {
                channel[i] = pitch_deg[i];
            }
        }
        const ChannelStats s = channel_stats(channel, rate_hz);
        fv.values[feature_index(ch, Mean)] = s.mean;
        fv.values[feature_index(ch, Variance)] = s.variance;
        fv.values[feature_index(ch, Rms)] = s.rms;
        fv.values[feature_index(ch, Min)] = s.min;
        fv.values[feature_index(ch, Max)] = s.max;
        fv.values[feature_index(ch, DominantFreq)] = s.dominant_freq;
    }
    fv.values[kPitchSlopeIndex] = least_squares_slope(samples, pitch_deg);
    return fv;
}

std::vector<LabeledWindow> label_windows(const SessionRecording& recording,
                                         const WindowConfig& window_cfg,
                                         const fusion::FilterConfig& filter_cfg) {
    std::vector<LabeledWindow> out;
    if (recording.samples.empty()) return out;

    std::optional<double> onset;
    if (auto text = recording.meta.annotation(kFallOnsetAnnotation)) {
        onset = parse_double(*text, "fall_onset_ms annotation");
    }
    const double t_first = static_cast<double>(recording.samples.front().t_ms);
    const double t_last = static_cast<double>(recording.samples.back().t_ms);
    if (onset && (*onset < t_first || *onset > t_last)) {
        throw Error(errc::annotation, "fall onset outside the recorded span");
    }

    const auto states = fusion::run_filter(recording.samples, filter_cfg);
    std::vector<double> pitch(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) pitch[i] = states[i].pitch_deg;

    const double period_ms = 1000.0 / filter_cfg.nominal_rate_hz;
    std::size_t begin = 0;
    for (std::size_t k = 0;; ++k) {
        const double start = t_first + static_cast<double>(k) * window_cfg.stride_ms;
        const double end = start + window_cfg.window_ms;
        if (end > t_last + period_ms) break;

        while (begin < recording.samples.size() &&
               static_cast<double>(recording.samples[begin].t_ms) < start) {
            ++begin;
        }
        std::size_t stop = begin;
        while (stop < recording.samples.size() &&
               static_cast<double>(recording.samples[stop].t_ms) < end) {
            ++stop;
        }
        if (stop <= begin) continue;

        if (onset && end > *onset) continue;  // overlaps the post-fall period

        LabeledWindow window;
        try {
            window.features = window_features(
                std::span(recording.samples).subspan(begin, stop - begin),
                std::span(pitch).subspan(begin, stop - begin), window_cfg.window_ms,
                filter_cfg.nominal_rate_hz);
        } catch (const Error& e) {
            if (e.code() == errc::insufficient_data) continue;  // sparse window
            throw;
        }
        if (onset && end > *onset - window_cfg.horizon_ms) {
            window.label = 1;
            window.lead_time_ms = *onset - end;
        }
        out.push_back(std::move(window));
    }
    return out;
}

RiskModel train(std::span<const LabeledWindow> data, const TrainConfig& cfg,
                std::vector<double>* epoch_loss) {
    std::size_t positives = 0;
    for (const LabeledWindow& w : data) positives += w.label == 1 ? 1 : 0;
    if (data.empty() || positives == 0 || positives == data.size()) {
        throw Error(errc::degenerate_training, "train: need both classes present");
    }
    const std::size_t n = data.size();
    const std::size_t d = kFeatureCount;

    RiskModel model;
    model.hyper = cfg;
    model.feature_means.assign(d, 0.0);
    model.feature_scales.assign(d, 1.0);
    for (const LabeledWindow& w : data) {
        for (std::size_t j = 0; j < d; ++j) model.feature_means[j] += w.features.values[j];
    }
    for (std::size_t j = 0; j < d; ++j) model.feature_means[j] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (const LabeledWindow& w : data) {
        for (std::size_t j = 0; j < d; ++j) {
            const double delta = w.features.values[j] - model.feature_means[j];
            var[j] += delta * delta;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double scale = std::sqrt(var[j] / static_cast<double>(n));
        model.feature_scales[j] = scale > 0.0 ? scale : 1.0;  // constant feature
    }

    // Standardize once up front.
    std::vector<double> z(n * d);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = data[i].label;
        for (std::size_t j = 0; j < d; ++j) {
            z[i * d + j] =
                (data[i].features.values[j] - model.feature_means[j]) / model.feature_scales[j];
        }
    }

    model.weights.assign(d, 0.0);
    model.bias = 0.0;
    if (epoch_loss) epoch_loss->clear();

    std::vector<double> grad(d);
    std::vector<double> score(n);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = model.bias;
            const double* zi = &z[i * d];
            for (std::size_t j = 0; j < d; ++j) s += model.weights[j] * zi[j];
            score[i] = s;
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double residual = sigmoid(score[i]) - y[i];
            const double* zi = &z[i * d];
            for (std::size_t j = 0; j < d; ++j) grad[j] += residual * zi[j];
            grad_bias += residual;
        }
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = grad[j] / static_cast<double>(n) + cfg.l2 * model.weights[j];
            model.weights[j] -= cfg.learning_rate * grad[j];
        }
        model.bias -= cfg.learning_rate * grad_bias / static_cast<double>(n);

        if (epoch_loss) {
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double s = model.bias;
                const double* zi = &z[i * d];
                for (std::size_t j = 0; j < d; ++j) s += model.weights[j] * zi[j];
                loss += softplus(s) - y[i] * s;
            }
            loss /= static_cast<double>(n);
            double reg = 0.0;
            for (double w : model.weights) reg += w * w;
            epoch_loss->push_back(loss + 0.5 * cfg.l2 * reg);
        }
    }
    return model;
}

double predict(const RiskModel& model, const FeatureVector& features) {
    if (model.weights.size() != kFeatureCount || model.feature_means.size() != kFeatureCount ||
        model.feature_scales.size() != kFeatureCount) {
        throw Error(errc::shape_mismatch, "predict: model width != " + std::to_string(kFeatureCount));
    }
    double s = model.bias;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const double zj = (features.values[j] - model.feature_means[j]) / model.feature_scales[j];
        s += model.weights[j] * zj;
    }
    return sigmoid(s);
}

std::vector<ThresholdMetrics> evaluate(const RiskModel& model,
                                       std::span<const LabeledWindow> test_set,
                                       std::span<const double> thresholds) {
    if (test_set.empty()) {
        throw Error(errc::evaluation, "evaluate: empty test set");
    }
    std::vector<double> risk(test_set.size());
    for (std::size_t i = 0; i < test_set.size(); ++i) risk[i] = predict(model, test_set[i].features);

    std::vector<ThresholdMetrics> out;
    out.reserve(thresholds.size());
    for (double tau : thresholds) {
        ThresholdMetrics m;
        m.threshold = tau;
        std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
        double lead_sum = 0.0;
        for (std::size_t i = 0; i < test_set.size(); ++i) {
            const bool alarm = risk[i] >= tau;
            if (test_set[i].label == 1) {
                if (alarm) {
                    ++tp;
                    lead_sum += test_set[i].lead_time_ms;
                } else {
                    ++fn;
                }
            } else {
                if (alarm) {
                    ++fp;
                } else {
                    ++tn;
                }
            }
        }
        m.sensitivity = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.specificity = tn + fp > 0 ? static_cast<double>(tn) / static_cast<double>(tn + fp) : 0.0;
        m.mean_lead_time_ms = tp > 0 ? lead_sum / static_cast<double>(tp) : 0.0;
        out.push_back(m);
    }
    return out;
}

void save_model(const RiskModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path.string());
    out << "riskmodel v1 features=" << model.weights.size()
        << " lr=" << to_text(model.hyper.learning_rate) << " epochs=" << model.hyper.epochs
        << " l2=" << to_text(model.hyper.l2) << "\n";
    out << "means:";
    for (double v : model.feature_means) out << ' ' << to_text(v);
    out << "\nscales:";
    for (double v : model.feature_scales) out << ' ' << to_text(v);
    out << "\nweights:";
    for (double v : model.weights) out << ' ' << to_text(v);
    out << "\nbias: " << to_text(model.bias) << "\n";
    if (!out) throw Error(errc::io, "write failed: " + path.string());
}

RiskModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open for reading: " + path.string());

    std::string word;
    in >> word;
    if (word != "riskmodel") throw Error(errc::parse, "model file: bad magic word '" + word + "'");
    in >> word;
    if (word != "v1") throw Error(errc::parse, "model file: unsupported version '" + word + "'");

    RiskModel model;
    std::size_t features = 0;
    for (int i = 0; i < 4; ++i) {
        if (!(in >> word)) throw Error(errc::parse, "model file: truncated metadata");
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw Error(errc::parse, "model file: bad metadata '" + word + "'");
        const std::string key = word.substr(0, eq);
        const std::string value = word.substr(eq + 1);
        if (key == "features") {
            features = static_cast<std::size_t>(parse_double(value, "feature count"));
        } else if (key == "lr") {
            model.hyper.learning_rate = parse_double(value, "lr");
        } else if (key == "epochs") {
            model.hyper.epochs = static_cast<int>(parse_double(value, "epochs"));
        } else if (key == "l2") {
            model.hyper.l2 = parse_double(value, "l2");
        } else {
            throw Error(errc::parse, "model file: unknown metadata key '" + key + "'");
        }
    }
    if (features == 0) throw Error(errc::parse, "model file: missing feature count");

    auto expect_label = [&](const std::string& label) {
        if (!(in >> word) || word != label) {
            throw Error(errc::parse, "model file: expected '" + label + "'");
        }
    };
    expect_label("means:");
    model.feature_means = parse_vector(in, features, "means");
    expect_label("scales:");
    model.feature_scales = parse_vector(in, features, "scales");
    expect_label("weights:");
    model.weights = parse_vector(in, features, "weights");
    expect_label("bias:");
    if (!(in >> word)) throw Error(errc::parse, "model file: truncated bias");
    model.bias = parse_double(word, "bias");

    for (double s : model.feature_scales) {
        if (!(s > 0.0)) throw Error(errc::parse, "model file: non-positive scale");
    }
    return model;
}

}  // namespace equilivest::risk
