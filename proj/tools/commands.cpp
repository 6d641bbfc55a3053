#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "equilivest/detection.hpp"
#include "equilivest/feedback.hpp"
#include "equilivest/fusion.hpp"
#include "equilivest/riskmodel.hpp"
#include "equilivest/simulator.hpp"
#include "equilivest/telemetry.hpp"
#include "equilivest/types.hpp"
#include "equilivest/udp.hpp"

namespace equilivest::cli {

namespace {

std::string to_text(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string to_text(float value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

// --- config plumbing ---------------------------------------------------

fusion::FilterConfig filter_config(const config::Table& cfg) {
    fusion::FilterConfig out;
    out.alpha = cfg.get_double("filter.alpha", out.alpha);
    out.nominal_rate_hz = cfg.get_double("filter.rate_hz", out.nominal_rate_hz);
    return out;
}

detection::BreakpointConfig breakpoint_config(const config::Table& cfg) {
    detection::BreakpointConfig out;
    out.theta_star_deg = cfg.get_double("breakpoint.theta_star", out.theta_star_deg);
    out.hysteresis_deg = cfg.get_double("breakpoint.hysteresis", out.hysteresis_deg);
    out.min_dwell_ms = cfg.get_double("breakpoint.min_dwell_ms", out.min_dwell_ms);
    return out;
}

detection::StepDetectorConfig step_config(const config::Table& cfg) {
    detection::StepDetectorConfig out;
    out.peak_threshold = cfg.get_double("steps.peak_threshold", out.peak_threshold);
    out.refractory_ms = cfg.get_double("steps.refractory_ms", out.refractory_ms);
    out.smoothing_window = cfg.get_int("steps.smoothing_window", out.smoothing_window);
    return out;
}

risk::WindowConfig window_config(const config::Table& cfg) {
    risk::WindowConfig out;
    out.window_ms = cfg.get_double("risk.window_ms", out.window_ms);
    out.stride_ms = cfg.get_double("risk.stride_ms", out.stride_ms);
    out.horizon_ms = cfg.get_double("risk.horizon_ms", out.horizon_ms);
    return out;
}

struct FeedbackSetup {
    bool vestibular_on = false;
    bool pacemaker_on = false;
    bool risk_on = false;
    feedback::VestibularFeedbackConfig vestibular;
    feedback::PacemakerConfig pacemaker;
    feedback::RiskFeedbackConfig risk_alert;
    double risk_threshold = 0.5;
    feedback::AssistPolicy assist;
    double assist_eval_window_ms = 2000.0;
    double control_period_ms = 100.0;
};

FeedbackSetup feedback_setup(const config::Table& cfg) {
    FeedbackSetup out;
    out.vestibular_on = cfg.get_bool("vestibular.enabled", false);
    out.vestibular.pitch_floor_deg = cfg.get_double("vestibular.pitch_floor", 2.0);
    out.vestibular.f_min_hz = cfg.get_double("vestibular.f_min", 1.0);
    out.vestibular.f_max_hz = cfg.get_double("vestibular.f_max", 9.0);
    const std::string mapping = cfg.get_string("vestibular.mapping", "linear");
    if (mapping == "linear") {
        out.vestibular.mapping = feedback::Mapping::Linear;
    } else if (mapping == "quadratic") {
        out.vestibular.mapping = feedback::Mapping::Quadratic;
    } else {
        throw Error(errc::config, "vestibular.mapping: unknown mapping '" + mapping + "'");
    }

    out.pacemaker_on = cfg.get_bool("pacemaker.enabled", false);
    out.pacemaker.target_cadence_sps = cfg.get_double("pacemaker.target_cadence", 1.4);
    out.pacemaker.pulse_duration_ms = cfg.get_double("pacemaker.pulse_duration_ms", 120.0);
    out.pacemaker.intensity = cfg.get_double("pacemaker.intensity", 0.6);

    out.risk_on = cfg.get_bool("risk.enabled", false);
    out.risk_threshold = cfg.get_double("risk.threshold", 0.5);
    out.risk_alert.f_max_hz = cfg.get_double("risk.alert_f_max", 9.0);
    out.risk_alert.duration_ms = cfg.get_double("risk.alert_duration_ms", 800.0);

    out.assist.decay = cfg.get_double("assist.decay", 0.8);
    out.assist.gain_min = cfg.get_double("assist.gain_min", 0.1);
    out.assist_eval_window_ms = cfg.get_double("assist.eval_window_ms", 2000.0);
    out.control_period_ms = cfg.get_double("run.control_period_ms", 100.0);
    return out;
}

// --- analysis pipeline ---------------------------------------------------
//
// One incremental pipeline serves both the offline subcommands and the live
// UDP loop, so an offline pass over the same sample sequence reproduces the
// live event log exactly.

struct PipelineResult {
    std::vector<ImuSample> samples;
    std::vector<std::optional<OrientationState>> device_orientation;
    std::vector<OrientationState> orientation;
    std::vector<GaitEvent> events;
    std::vector<TimedMotorCommand> commands;
    double cadence_sps = 0.0;
};

class Pipeline {
public:
    Pipeline(const config::Table& cfg, std::optional<risk::RiskModel> model, bool feedback_enabled)
        : filter_cfg_(filter_config(cfg)),
          window_cfg_(window_config(cfg)),
          setup_(feedback_setup(cfg)),
          filter_(filter_cfg_),
          breakpoint_(breakpoint_config(cfg)),
          steps_(step_config(cfg)),
          model_(std::move(model)),
          feedback_enabled_(feedback_enabled),
          theta_star_deg_(breakpoint_config(cfg).theta_star_deg) {
        if (!model_) setup_.risk_on = false;
        if (!feedback_enabled_) {
            setup_.risk_on = setup_.vestibular_on = setup_.pacemaker_on = false;
        }
        pacemaker_period_ms_ = 1000.0 / setup_.pacemaker.target_cadence_sps;
    }

    void process(const ImuSample& sample,
                 const std::optional<OrientationState>& device_orientation = {}) {
        if (first_) {
            first_ = false;
            start_t_ms_ = static_cast<double>(sample.t_ms);
            next_risk_eval_ms_ = start_t_ms_ + window_cfg_.window_ms;
            next_control_ms_ = start_t_ms_;
            next_assist_eval_ms_ = start_t_ms_ + setup_.assist_eval_window_ms;
            next_pulse_ms_ = start_t_ms_;
        }
        result_.samples.push_back(sample);
        result_.device_orientation.push_back(device_orientation);

        const OrientationState state = filter_.update(sample);
        result_.orientation.push_back(state);

        if (auto event = breakpoint_.update(sample.t_ms, state.pitch_deg)) {
            result_.events.push_back(*event);
        }
        for (const GaitEvent& event : steps_.update(sample.t_ms, sample.gyro[0], sample.gyro[2])) {
            result_.events.push_back(event);
        }

        const double t = static_cast<double>(sample.t_ms);
        maybe_eval_risk(sample, state, t);
        maybe_run_control(state, t);
        maybe_eval_assist(t);
    }

    PipelineResult finish() {
        for (const GaitEvent& event : steps_.finish()) {
            result_.events.push_back(event);
        }
        std::sort(result_.events.begin(), result_.events.end(),
                  [](const GaitEvent& a, const GaitEvent& b) {
                      if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
                      return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                  });
        const double duration_ms =
            result_.samples.empty()
                ? 0.0
                : static_cast<double>(result_.samples.back().t_ms - result_.samples.front().t_ms);
        result_.cadence_sps =
            duration_ms > 0.0
                ? detection::estimate_cadence(result_.events, duration_ms,
                                              static_cast<double>(result_.samples.back().t_ms))
                : 0.0;
        return std::move(result_);
    }

private:
    void maybe_eval_risk(const ImuSample& sample, const OrientationState& state, double t) {
        window_samples_.push_back(sample);
        window_pitch_.push_back(state.pitch_deg);
        while (!window_samples_.empty() &&
               static_cast<double>(window_samples_.front().t_ms) <= t - window_cfg_.window_ms) {
            window_samples_.pop_front();
            window_pitch_.pop_front();
        }
        if (!setup_.risk_on || t < next_risk_eval_ms_) return;
        next_risk_eval_ms_ += window_cfg_.stride_ms;

        std::vector<ImuSample> samples(window_samples_.begin(), window_samples_.end());
        std::vector<double> pitch(window_pitch_.begin(), window_pitch_.end());
        double risk_value;
        try {
            const auto features = risk::window_features(samples, pitch, window_cfg_.window_ms,
                                                        filter_cfg_.nominal_rate_hz);
            risk_value = risk::predict(*model_, features);
        } catch (const Error& e) {
            if (e.code() == errc::insufficient_data) return;
            throw;
        }
        if (risk_value >= setup_.risk_threshold && t >= risk_rearm_ms_) {
            const MotorCommand alert = feedback::risk_feedback(risk_value, setup_.risk_threshold,
                                                               setup_.risk_alert, assist_.gain);
            emit(t, alert);
            risk_rearm_ms_ = t + setup_.risk_alert.duration_ms;
        }
    }

    void maybe_run_control(const OrientationState& state, double t) {
        const bool risk_active = t < risk_rearm_ms_;

        // Pacemaker pulses follow their exact schedule; higher-priority
        // strategies suppress a pulse without delaying the schedule.
        if (setup_.pacemaker_on) {
            while (next_pulse_ms_ <= t) {
                const bool vestibular_active =
                    setup_.vestibular_on &&
                    feedback::vestibular_frequency(state.pitch_deg,
                                                   breakpoint_theta_star(), setup_.vestibular) > 0.0;
                if (!risk_active && !vestibular_active) {
                    MotorCommand pulse;
                    pulse.frequency_hz = 1000.0 / setup_.pacemaker.pulse_duration_ms;
                    pulse.intensity = setup_.pacemaker.intensity * assist_.gain;
                    pulse.duration_ms = setup_.pacemaker.pulse_duration_ms;
                    emit(next_pulse_ms_, pulse);
                }
                next_pulse_ms_ += pacemaker_period_ms_;
            }
        }

        if (t < next_control_ms_) return;
        next_control_ms_ += setup_.control_period_ms;

        if (!setup_.vestibular_on || risk_active) return;
        const double f =
            feedback::vestibular_frequency(state.pitch_deg, breakpoint_theta_star(), setup_.vestibular);
        if (f > 0.0) {
            if (f != last_vestibular_f_) {
                MotorCommand cmd;
                cmd.frequency_hz = f;
                cmd.intensity = assist_.gain;
                cmd.duration_ms = setup_.control_period_ms;
                emit(t, cmd);
                last_vestibular_f_ = f;
            }
        } else if (last_vestibular_f_ > 0.0) {
            emit(t, MotorCommand{});  // transition to off
            last_vestibular_f_ = 0.0;
        }
    }

    void maybe_eval_assist(double t) {
        if (t < next_assist_eval_ms_) return;
        const double window_start = next_assist_eval_ms_ - setup_.assist_eval_window_ms;
        next_assist_eval_ms_ += setup_.assist_eval_window_ms;

        bool any_breakpoint = false;
        for (auto it = result_.events.rbegin(); it != result_.events.rend(); ++it) {
            if (static_cast<double>(it->t_ms) < window_start) break;
            if (it->kind == GaitEventKind::BreakpointCrossed) any_breakpoint = true;
        }
        const double cadence =
            detection::estimate_cadence(result_.events, setup_.assist_eval_window_ms, t);
        const bool success = feedback::window_success(any_breakpoint, cadence,
                                                      setup_.pacemaker.target_cadence_sps);
        assist_ = feedback::assist_update(assist_, success, setup_.assist);
    }

    double breakpoint_theta_star() const { return theta_star_deg_; }

    void emit(double t_ms, const MotorCommand& command) {
        result_.commands.push_back(TimedMotorCommand{t_ms, command});
    }

    fusion::FilterConfig filter_cfg_;
    risk::WindowConfig window_cfg_;
    FeedbackSetup setup_;
    fusion::ComplementaryFilter filter_;
    detection::BreakpointDetector breakpoint_;
    detection::StepDetector steps_;
    std::optional<risk::RiskModel> model_;
    bool feedback_enabled_;

    PipelineResult result_;
    std::deque<ImuSample> window_samples_;
    std::deque<double> window_pitch_;
    feedback::AssistFadeState assist_;

    bool first_ = true;
    double start_t_ms_ = 0.0;
    double next_risk_eval_ms_ = 0.0;
    double next_control_ms_ = 0.0;
    double next_assist_eval_ms_ = 0.0;
    double next_pulse_ms_ = 0.0;
    double pacemaker_period_ms_ = 0.0;
    double risk_rearm_ms_ = -1.0;
    double last_vestibular_f_ = 0.0;
    double theta_star_deg_ = 15.0;
};

void write_report(std::ostream& out, const PipelineResult& result) {
    std::size_t step_count = 0;
    std::size_t breakpoint_count = 0;
    for (const GaitEvent& e : result.events) {
        if (e.kind == GaitEventKind::StepDetected) ++step_count;
        if (e.kind == GaitEventKind::BreakpointCrossed) ++breakpoint_count;
    }
    const double duration_ms =
        result.samples.empty()
            ? 0.0
            : static_cast<double>(result.samples.back().t_ms - result.samples.front().t_ms);

    out << "samples: " << result.samples.size() << "\n";
    out << "duration_ms: " << to_text(duration_ms) << "\n";
    out << "steps: " << step_count << "\n";
    out << "cadence_sps: " << to_text(result.cadence_sps) << "\n";
    out << "breakpoints: " << breakpoint_count << "\n";
    for (const GaitEvent& e : result.events) {
        out << "event: " << gait_event_kind_name(e.kind) << ',' << e.t_ms << ','
            << to_text(e.value) << "\n";
    }
    out << "columns: t_ms,roll,pitch,yaw,gx,gz\n";
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const OrientationState& o = result.orientation[i];
        out << "data: " << result.samples[i].t_ms << ',' << to_text(o.roll_deg) << ','
            << to_text(o.pitch_deg) << ',' << to_text(o.yaw_deg) << ','
            << to_text(result.samples[i].gyro[0]) << ',' << to_text(result.samples[i].gyro[2])
            << "\n";
    }
}

void write_command_log(std::ostream& out, const std::vector<TimedMotorCommand>& commands) {
    for (const TimedMotorCommand& c : commands) {
        out << to_text(c.t_ms) << ',' << to_text(c.command.frequency_hz) << ','
            << to_text(c.command.intensity) << ',' << to_text(c.command.duration_ms) << "\n";
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    return out;
}

PipelineResult run_offline_pipeline(const SessionRecording& recording, const config::Table& cfg,
                                    std::optional<risk::RiskModel> model, bool feedback_enabled) {
    Pipeline pipeline(cfg, std::move(model), feedback_enabled);
    for (std::size_t i = 0; i < recording.samples.size(); ++i) {
        pipeline.process(recording.samples[i], recording.device_orientation.empty()
                                                   ? std::nullopt
                                                   : recording.device_orientation[i]);
    }
    return pipeline.finish();
}

// --- scenario files ------------------------------------------------------

sim::GaitScenario gait_scenario(const config::Table& t) {
    sim::GaitScenario sc;
    sc.cadence_sps = t.get_double("gait.cadence", sc.cadence_sps);
    sc.stride_rate_amplitude_dps = t.get_double("gait.amplitude", sc.stride_rate_amplitude_dps);
    sc.duration_ms = t.get_double("gait.duration_ms", sc.duration_ms);
    sc.accel_noise_std_g = t.get_double("gait.accel_noise_std", sc.accel_noise_std_g);
    sc.gyro_noise_std_dps = t.get_double("gait.gyro_noise_std", sc.gyro_noise_std_dps);
    sc.rate_hz = t.get_double("gait.rate_hz", sc.rate_hz);
    return sc;
}

sim::LeanFallScenario lean_fall_scenario(const config::Table& t) {
    sim::LeanFallScenario sc;
    sc.lean_rate_dps = t.get_double("lean_fall.lean_rate", sc.lean_rate_dps);
    sc.theta_fall_deg = t.get_double("lean_fall.theta_fall", sc.theta_fall_deg);
    sc.collapse_duration_ms = t.get_double("lean_fall.collapse_ms", sc.collapse_duration_ms);
    sc.duration_ms = t.get_double("lean_fall.duration_ms", sc.duration_ms);
    sc.accel_noise_std_g = t.get_double("lean_fall.accel_noise_std", sc.accel_noise_std_g);
    sc.gyro_noise_std_dps = t.get_double("lean_fall.gyro_noise_std", sc.gyro_noise_std_dps);
    sc.rate_hz = t.get_double("lean_fall.rate_hz", sc.rate_hz);
    return sc;
}

}  // namespace

int run_listen(const ListenOptions& opt, const config::Table& cfg) {
    (void)cfg;
    if (opt.output.empty()) throw Error(errc::config, "listen: --output is required");

    telemetry::UdpSource source(opt.port, opt.timeout_ms);
    SessionRecording recording;
    recording.meta.scenario = "listen";
    telemetry::StreamStats stats = telemetry::receive_stream(
        source, [&](const ImuSample& sample, const std::optional<OrientationState>& orientation) {
            recording.samples.push_back(sample);
            recording.device_orientation.push_back(orientation);
        });
    telemetry::save_session(recording, opt.output);

    std::cout << "received: " << stats.packets_received << "\n"
              << "dropped: " << stats.packets_dropped << "\n"
              << "reordered: " << stats.packets_reordered << "\n"
              << "rejected: " << stats.packets_rejected << "\n"
              << "recording: " << opt.output << "\n";
    return 0;
}

int run_analyze(const AnalyzeOptions& opt, const config::Table& cfg) {
    if (opt.input.empty()) throw Error(errc::config, "analyze: --input is required");
    const SessionRecording recording = telemetry::load_session(opt.input);
    PipelineResult result = run_offline_pipeline(recording, cfg, std::nullopt, false);
    if (opt.output.empty()) {
        write_report(std::cout, result);
    } else {
        auto out = open_output(opt.output);
        write_report(out, result);
    }
    return 0;
}

int run_simulate(const SimulateOptions& opt, const config::Table& cfg) {
    (void)cfg;
    if (opt.scenario_path.empty()) throw Error(errc::config, "simulate: --input scenario file is required");
    if (opt.output.empty() && opt.udp_target.empty()) {
        throw Error(errc::config, "simulate: need --output and/or --udp");
    }
    const config::Table scenario = config::Table::parse_file(opt.scenario_path);
    const std::string kind = scenario.get_string("kind", "");

    sim::Generated generated;
    if (kind == "gait") {
        generated = sim::gen_gait(gait_scenario(scenario), opt.seed);
    } else if (kind == "lean_fall") {
        generated = sim::gen_lean_fall(lean_fall_scenario(scenario), opt.seed);
    } else if (kind == "walk_then_fall") {
        generated =
            sim::gen_walk_then_fall(gait_scenario(scenario), lean_fall_scenario(scenario), opt.seed);
    } else {
        throw Error(errc::config, "kind: unknown scenario kind '" + kind + "'");
    }

    if (!opt.output.empty()) {
        SessionRecording recording;
        recording.meta.session_id = kind + "-" + std::to_string(opt.seed);
        recording.meta.scenario = kind;
        sim::annotate(recording.meta, generated.truth);
        recording.samples = generated.samples;
        telemetry::save_session(recording, opt.output);
    }

    if (!opt.udp_target.empty()) {
        const auto colon = opt.udp_target.rfind(':');
        if (colon == std::string::npos) {
            throw Error(errc::config, "simulate: --udp expects host:port");
        }
        const std::string host = opt.udp_target.substr(0, colon);
        const int port = std::stoi(opt.udp_target.substr(colon + 1));
        telemetry::UdpSender sender(host, static_cast<std::uint16_t>(port));
        std::uint64_t prev_t = 0;
        bool first = true;
        for (const ImuSample& sample : generated.samples) {
            if (!first && !opt.fast) {
                std::this_thread::sleep_for(std::chrono::milliseconds(sample.t_ms - prev_t));
            }
            first = false;
            prev_t = sample.t_ms;
            const auto packet = telemetry::encode_packet(sample);
            sender.send(packet);
        }
    }

    std::cout << "scenario: " << kind << "\nsamples: " << generated.samples.size()
              << "\nsteps: " << generated.truth.step_t_ms.size() << "\n";
    if (generated.truth.fall_onset_ms) {
        std::cout << "fall_onset_ms: " << to_text(*generated.truth.fall_onset_ms) << "\n";
    }
    return 0;
}

int run_train(const TrainOptions& opt, const config::Table& cfg) {
    if (opt.inputs.empty()) throw Error(errc::config, "train: at least one --input is required");
    if (opt.model_output.empty()) throw Error(errc::config, "train: --output model path is required");

    const fusion::FilterConfig fcfg = filter_config(cfg);
    const risk::WindowConfig wcfg = window_config(cfg);

    std::vector<risk::LabeledWindow> windows;
    for (const std::string& path : opt.inputs) {
        const SessionRecording recording = telemetry::load_session(path);
        auto labeled = risk::label_windows(recording, wcfg, fcfg);
        windows.insert(windows.end(), labeled.begin(), labeled.end());
    }

    risk::TrainConfig tcfg;
    tcfg.learning_rate = opt.learning_rate > 0.0
                             ? opt.learning_rate
                             : cfg.get_double("risk.learning_rate", tcfg.learning_rate);
    tcfg.epochs = opt.epochs >= 0 ? opt.epochs : cfg.get_int("risk.epochs", tcfg.epochs);
    tcfg.l2 = opt.l2 >= 0.0 ? opt.l2 : cfg.get_double("risk.l2", tcfg.l2);

    std::vector<double> loss;
    const risk::RiskModel model = risk::train(windows, tcfg, &loss);
    risk::save_model(model, opt.model_output);

    std::size_t positives = 0;
    std::size_t correct = 0;
    for (const risk::LabeledWindow& w : windows) {
        positives += w.label == 1 ? 1 : 0;
        const int predicted = risk::predict(model, w.features) >= 0.5 ? 1 : 0;
        correct += predicted == w.label ? 1 : 0;
    }
    std::cout << "windows: " << windows.size() << "\npositives: " << positives << "\nfinal_loss: "
              << (loss.empty() ? "n/a" : to_text(loss.back())) << "\ntrain_accuracy: "
              << to_text(static_cast<double>(correct) / static_cast<double>(windows.size()))
              << "\nmodel: " << opt.model_output << "\n";
    return 0;
}

int run_run(const RunOptions& opt, const config::Table& cfg) {
    const bool live = opt.port >= 0;
    if (!live && opt.input.empty()) {
        throw Error(errc::config, "run: need --input or --port");
    }

    std::optional<risk::RiskModel> model;
    if (!opt.model_path.empty()) model = risk::load_model(opt.model_path);

    Pipeline pipeline(cfg, std::move(model), true);

    telemetry::StreamStats stats;
    if (live) {
        // Receiver thread feeds the processing loop through a bounded queue;
        // when the link outpaces processing the oldest samples are dropped.
        using Item = std::pair<ImuSample, std::optional<OrientationState>>;
        telemetry::BoundedQueue<Item> queue(1024);
        telemetry::UdpSource source(static_cast<std::uint16_t>(opt.port), opt.timeout_ms);
        std::thread receiver([&] {
            stats = telemetry::receive_stream(
                source,
                [&](const ImuSample& sample, const std::optional<OrientationState>& orientation) {
                    queue.push(Item{sample, orientation});
                });
            queue.close();
        });
        while (auto item = queue.pop(std::chrono::milliseconds(200))) {
            pipeline.process(item->first, item->second);
        }
        receiver.join();
    } else {
        const SessionRecording recording = telemetry::load_session(opt.input);
        for (std::size_t i = 0; i < recording.samples.size(); ++i) {
            pipeline.process(recording.samples[i], recording.device_orientation.empty()
                                                       ? std::nullopt
                                                       : recording.device_orientation[i]);
        }
    }

    PipelineResult result = pipeline.finish();

    if (!opt.commands_output.empty()) {
        auto out = open_output(opt.commands_output);
        write_command_log(out, result.commands);
    }
    if (!opt.report_output.empty()) {
        auto out = open_output(opt.report_output);
        write_report(out, result);
    }
    if (!opt.record_path.empty()) {
        SessionRecording recording;
        recording.meta.scenario = live ? "run-live" : "run-offline";
        recording.samples = result.samples;
        recording.device_orientation = result.device_orientation;
        recording.events = result.events;
        recording.commands = result.commands;
        telemetry::save_session(recording, opt.record_path);
    }

    std::size_t step_count = 0;
    std::size_t breakpoint_count = 0;
    for (const GaitEvent& e : result.events) {
        if (e.kind == GaitEventKind::StepDetected) ++step_count;
        if (e.kind == GaitEventKind::BreakpointCrossed) ++breakpoint_count;
    }
    std::cout << "samples: " << result.samples.size() << "\nsteps: " << step_count
              << "\nbreakpoints: " << breakpoint_count << "\ncommands: " << result.commands.size()
              << "\n";
    if (live) {
        std::cout << "received: " << stats.packets_received << "\nrejected: " << stats.packets_rejected
                  << "\n";
    }
    return 0;
}

}  // namespace equilivest::cli
