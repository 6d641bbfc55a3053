// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 2 and 7 drive the CLI binary end to end.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "equilivest/detection.hpp"
#include "equilivest/feedback.hpp"
#include "equilivest/fusion.hpp"
#include "equilivest/riskmodel.hpp"
#include "equilivest/simulator.hpp"
#include "equilivest/telemetry.hpp"

namespace fs = std::filesystem;
using namespace equilivest;

namespace {

struct Check {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("eqv_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args, const fs::path& output_capture) {
    const std::string cmd =
        std::string(EQUILIVEST_CLI_PATH) + " " + args + " > " + output_capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::vector<std::string> lines_with_prefix(const std::string& text, const std::string& prefix) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) out.push_back(line);
    }
    return out;
}

// --- criterion 1: filter correctness ------------------------------------

void criterion_filter(Check& check) {
    fusion::FilterConfig cfg;

    ImuSample still;
    still.accel = {0, 1, 0};
    OrientationState state{0, 0, 0, 0};
    for (int i = 1; i <= 200; ++i) {
        still.t_ms = static_cast<std::uint64_t>(10 * i);
        state = fusion::complementary_update(state, still, 0.01, cfg);
    }
    check.require(std::fabs(state.pitch_deg) < 1e-9 && std::fabs(state.roll_deg) < 1e-9 &&
                      std::fabs(state.yaw_deg) < 1e-9,
                  "static fixed point drifted beyond 1e-9 deg");

    // Geometric convergence: the pitch error must equal alpha^n times the
    // initial error, bit for bit against the repeated-multiply recursion.
    OrientationState tilted{0, 10.0, 0, 0};
    double expected = 10.0;
    bool geometric_exact = true;
    for (int n = 1; n <= 200; ++n) {
        still.t_ms = static_cast<std::uint64_t>(10 * n);
        tilted = fusion::complementary_update(tilted, still, 0.01, cfg);
        expected *= cfg.alpha;
        if (tilted.pitch_deg != expected) geometric_exact = false;
    }
    check.require(geometric_exact, "convergence error is not exactly alpha^n");

    ImuSample moving;
    moving.t_ms = 10;
    moving.accel = {0.2f, 0.9f, -0.3f};
    moving.gyro = {120.0f, -45.0f, 60.0f};
    OrientationState base{5.0, -2.0, 30.0, 0};

    const auto accel_only = fusion::complementary_update(base, moving, 0.01, {0.0, 100.0});
    const auto tilt = fusion::accel_angles(moving);
    check.require(accel_only.pitch_deg == tilt.pitch_deg && accel_only.roll_deg == tilt.roll_deg,
                  "alpha = 0 does not reproduce accel_angles exactly");

    const auto gyro_only = fusion::complementary_update(base, moving, 0.01, {1.0, 100.0});
    check.require(gyro_only.pitch_deg == wrap_angle(base.pitch_deg + 120.0 * 0.01) &&
                      gyro_only.roll_deg == wrap_angle(base.roll_deg + 60.0 * 0.01) &&
                      gyro_only.yaw_deg == wrap_angle(base.yaw_deg + -45.0 * 0.01),
                  "alpha = 1 does not reproduce pure gyro integration exactly");
}

// --- criterion 2: 10MWT stride reproduction ------------------------------

void criterion_strides(Check& check) {
    sim::GaitScenario sc;
    sc.cadence_sps = 1.4;
    sc.duration_ms = 5000;
    const auto gen = sim::gen_gait(sc, 2);
    check.require(gen.truth.step_t_ms.size() == 7, "simulator did not produce 7 strides");

    std::vector<detection::RateSample> gyro;
    for (const auto& s : gen.samples) gyro.push_back({s.t_ms, s.gyro[0], s.gyro[2]});
    const auto events = detection::detect_steps(gyro, detection::StepDetectorConfig{});
    check.require(events.size() == 7,
                  "detect_steps found " + std::to_string(events.size()) + " steps, expected 7");
    for (std::size_t i = 0; i < events.size() && i < gen.truth.step_t_ms.size(); ++i) {
        const double err = std::fabs(static_cast<double>(events[i].t_ms) - gen.truth.step_t_ms[i]);
        check.require(err <= 20.0, "step " + std::to_string(i) + " off truth by " +
                                       std::to_string(err) + " ms (> 2 samples)");
    }

    // Same scenario through the CLI: the report must say 7 steps and its
    // plot columns must show 7 bursts on the gx/gz channels.
    const fs::path scenario = work_dir() / "c2.scenario";
    write_file(scenario,
               "kind = gait\n[gait]\ncadence = 1.4\namplitude = 15\nduration_ms = 5000\n");
    const fs::path rec = work_dir() / "c2.csv";
    const fs::path log = work_dir() / "c2_sim.log";
    check.require(run_cli("simulate --input " + scenario.string() + " --output " + rec.string() +
                              " --seed 2",
                          log) == 0,
                  "cmd_simulate failed");
    const fs::path report = work_dir() / "c2_report.txt";
    check.require(run_cli("analyze --input " + rec.string() + " --output " + report.string(),
                          work_dir() / "c2_analyze.log") == 0,
                  "cmd_analyze failed");
    const std::string report_text = slurp(report);
    check.require(!lines_with_prefix(report_text, "steps: 7").empty(),
                  "cmd_analyze report does not say steps: 7");

    // Count bursts: contiguous spans of gx/gz magnitude above half the peak.
    std::vector<double> magnitude;
    for (const auto& line : lines_with_prefix(report_text, "data: ")) {
        std::istringstream in(line.substr(6));
        std::string field;
        std::vector<double> fields;
        while (std::getline(in, field, ',')) fields.push_back(std::stod(field));
        if (fields.size() == 6) magnitude.push_back(std::hypot(fields[4], fields[5]));
    }
    double peak = 0.0;
    for (double m : magnitude) peak = std::max(peak, m);
    int bursts = 0;
    bool inside = false;
    for (double m : magnitude) {
        if (!inside && m > peak / 2.0) {
            inside = true;
            ++bursts;
        } else if (inside && m < peak / 4.0) {
            inside = false;
        }
    }
    check.require(bursts == 7,
                  "plot columns show " + std::to_string(bursts) + " bursts, expected 7");
}

// --- criterion 3: lean-fall breakpoint ------------------------------------

void criterion_breakpoint(Check& check) {
    std::vector<detection::LabeledFallRun> runs;
    std::vector<double> collapse_ends;
    for (int i = 0; i < 10; ++i) {
        sim::LeanFallScenario sc;
        sc.theta_fall_deg = 18.0 + 0.5 * i;
        sc.lean_rate_dps = 5.0;
        sc.duration_ms = 7000;
        sc.collapse_duration_ms = 400;
        sc.accel_noise_std_g = 0.003;
        sc.gyro_noise_std_dps = 0.2;
        const auto gen = sim::gen_lean_fall(sc, 300 + static_cast<std::uint64_t>(i));
        const auto states = fusion::run_filter(gen.samples, {});

        detection::LabeledFallRun run;
        for (const auto& st : states) run.pitch.push_back({st.t_ms, st.pitch_deg});
        run.fall_onset_ms = *gen.truth.fall_onset_ms;
        collapse_ends.push_back(*gen.truth.fall_onset_ms + sc.collapse_duration_ms);
        runs.push_back(std::move(run));
    }

    // Monotone non-decreasing pitch (noise ripple <= 0.5 deg) until collapse.
    for (std::size_t r = 0; r < runs.size(); ++r) {
        double high_water = -1e9;
        for (const auto& p : runs[r].pitch) {
            if (static_cast<double>(p.t_ms) > collapse_ends[r]) break;
            check.require(p.pitch_deg >= high_water - 0.5,
                          "run " + std::to_string(r) + ": pitch dipped more than 0.5 deg");
            high_water = std::max(high_water, p.pitch_deg);
        }
    }

    const auto cfg = detection::calibrate_breakpoint(runs);
    int fired_before_onset = 0;
    for (const auto& run : runs) {
        const auto events = detection::detect_breakpoint(run.pitch, cfg);
        if (!events.empty() && static_cast<double>(events.front().t_ms) < run.fall_onset_ms) {
            ++fired_before_onset;
        }
    }
    check.require(fired_before_onset >= 9,
                  "calibrated detector fired before onset in only " +
                      std::to_string(fired_before_onset) + " of 10 runs");
}

// --- criterion 4: telemetry ------------------------------------------------

void criterion_telemetry(Check& check) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<float> acc(-16.0f, 16.0f);
    std::uniform_real_distribution<float> gyr(-2000.0f, 2000.0f);
    auto random_sample = [&] {
        ImuSample s;
        s.seq = static_cast<std::uint32_t>(rng());
        s.t_ms = rng() % 10000000;
        for (int i = 0; i < 3; ++i) s.accel[i] = acc(rng);
        for (int i = 0; i < 3; ++i) s.gyro[i] = gyr(rng);
        return s;
    };

    bool identity = true;
    for (int i = 0; i < 10000; ++i) {
        const ImuSample s = random_sample();
        const auto decoded = telemetry::decode_packet(telemetry::encode_packet(s));
        if (!(decoded.sample == s) || decoded.orientation.has_value()) identity = false;
    }
    check.require(identity, "encode/decode identity failed over 10,000 samples");

    bool all_rejected = true;
    for (int i = 0; i < 1000; ++i) {
        const auto packet = telemetry::encode_packet(random_sample());
        for (std::size_t bit = 0; bit < packet.size() * 8; ++bit) {
            auto corrupted = packet;
            corrupted[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            try {
                telemetry::decode_packet(corrupted);
                all_rejected = false;
            } catch (const Error&) {
            }
        }
    }
    check.require(all_rejected, "a single-bit corruption was accepted");

    std::vector<ImuSample> samples;
    for (int i = 0; i < 1000; ++i) {
        ImuSample s = random_sample();
        s.seq = static_cast<std::uint32_t>(i);
        s.t_ms = static_cast<std::uint64_t>(10 * i);
        samples.push_back(s);
    }
    const fs::path rec = work_dir() / "c4.csv";
    telemetry::record_session(samples, rec);
    check.require(telemetry::replay_session(rec, 0.0) == samples,
                  "record/replay did not reproduce the sample stream");
    const std::string first = slurp(rec);
    telemetry::save_session(telemetry::load_session(rec), rec);
    check.require(slurp(rec) == first, "save(load(file)) changed the bytes");
}

// --- criterion 5: vestibular feedback ---------------------------------------

void criterion_vestibular(Check& check) {
    feedback::VestibularFeedbackConfig cfg;
    const double theta_star = 18.0;
    double prev = -1.0;
    bool monotone = true;
    for (int i = 0; i <= 10000; ++i) {
        const double pitch = -2.0 + 24.0 * static_cast<double>(i) / 10000.0;
        const double f = feedback::vestibular_frequency(pitch, theta_star, cfg);
        if (f < prev) monotone = false;
        prev = f;
    }
    check.require(monotone, "vestibular_frequency not monotone over the sweep");
    check.require(feedback::vestibular_frequency(cfg.pitch_floor_deg, theta_star, cfg) == 0.0,
                  "frequency at the floor is not exactly 0");
    check.require(feedback::vestibular_frequency(theta_star, theta_star, cfg) == cfg.f_max_hz,
                  "frequency at theta_star is not exactly f_max");
}

// --- criterion 6: risk predictor --------------------------------------------

void criterion_risk(Check& check) {
    auto make_run = [](int i) {
        sim::GaitScenario gait;
        gait.cadence_sps = 1.3 + 0.01 * (i % 10);
        gait.duration_ms = 8000 + 200.0 * (i % 5);
        gait.gyro_noise_std_dps = 0.3;
        gait.accel_noise_std_g = 0.003;
        sim::LeanFallScenario fall;
        fall.lean_rate_dps = 5.0;
        fall.theta_fall_deg = 19.0 + 0.1 * i;
        fall.duration_ms = 5500;
        fall.gyro_noise_std_dps = 0.3;
        fall.accel_noise_std_g = 0.003;
        return sim::gen_walk_then_fall(gait, fall, 600 + static_cast<std::uint64_t>(i));
    };

    std::vector<risk::LabeledWindow> train_set;
    std::vector<risk::LabeledWindow> test_set;
    for (int i = 0; i < 20; ++i) {
        const auto gen = make_run(i);
        SessionRecording rec;
        rec.samples = gen.samples;
        sim::annotate(rec.meta, gen.truth);
        const auto windows = risk::label_windows(rec);
        auto& target = i < 15 ? train_set : test_set;
        target.insert(target.end(), windows.begin(), windows.end());
    }
    const risk::RiskModel model = risk::train(train_set, risk::TrainConfig{0.1, 300, 1e-3});

    std::vector<double> thresholds;
    for (double tau = 0.05; tau < 0.96; tau += 0.05) thresholds.push_back(tau);
    const auto metrics = risk::evaluate(model, test_set, thresholds);
    bool operating_point = false;
    double best_sens = 0.0, best_spec = 0.0;
    for (const auto& m : metrics) {
        best_sens = std::max(best_sens, m.sensitivity);
        best_spec = std::max(best_spec, m.specificity);
        if (m.sensitivity >= 0.8 && m.specificity >= 0.8 && m.mean_lead_time_ms > 0.0) {
            operating_point = true;
        }
    }
    check.require(operating_point,
                  "no threshold reaches sensitivity >= 0.8 and specificity >= 0.8 with positive "
                  "lead time (best sens " +
                      std::to_string(best_sens) + ", best spec " + std::to_string(best_spec) + ")");

    // Exhaustive single-feature threshold oracle on a separable 2-feature set.
    std::mt19937_64 rng(6);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<risk::LabeledWindow> synth;
    for (int i = 0; i < 200; ++i) {
        risk::LabeledWindow w;
        w.label = i % 2;
        w.features.values[0] = noise(rng) + (w.label == 1 ? 5.0 : 0.0);
        w.features.values[1] = noise(rng);
        synth.push_back(w);
    }
    double oracle = 0.0;
    for (std::size_t j : {std::size_t{0}, std::size_t{1}}) {
        for (const auto& pivot : synth) {
            const double tau = pivot.features.values[j];
            std::size_t above = 0, below = 0;
            for (const auto& w : synth) {
                const bool alarm = w.features.values[j] >= tau;
                above += (alarm ? 1 : 0) == w.label ? 1 : 0;
                below += (alarm ? 0 : 1) == w.label ? 1 : 0;
            }
            oracle = std::max({oracle, static_cast<double>(above) / synth.size(),
                               static_cast<double>(below) / synth.size()});
        }
    }
    const risk::RiskModel synth_model = risk::train(synth, risk::TrainConfig{0.1, 300, 1e-4});
    std::size_t correct = 0;
    for (const auto& w : synth) {
        correct += (risk::predict(synth_model, w.features) >= 0.5 ? 1 : 0) == w.label ? 1 : 0;
    }
    const double accuracy = static_cast<double>(correct) / synth.size();
    check.require(accuracy >= oracle - 0.05,
                  "classifier accuracy " + std::to_string(accuracy) +
                      " trails the threshold oracle " + std::to_string(oracle) +
                      " by more than 5 points");
}

// --- criterion 7: closed loop ------------------------------------------------

void criterion_closed_loop(Check& check) {
    const fs::path scenario = work_dir() / "c7.scenario";
    write_file(scenario,
               "kind = walk_then_fall\n"
               "[gait]\ncadence = 1.4\namplitude = 15\nduration_ms = 5000\n"
               "[lean_fall]\nlean_rate = 5\ntheta_fall = 20\ncollapse_ms = 400\nduration_ms = "
               "5500\n");

    const std::uint16_t port =
        static_cast<std::uint16_t>(42000 + (::getpid() * 13) % 18000);
    const fs::path live_rec = work_dir() / "c7_live.csv";
    const fs::path live_report = work_dir() / "c7_live_report.txt";

    int run_rc = -1;
    std::thread runner([&] {
        run_rc = run_cli("run --port " + std::to_string(port) + " --timeout-ms 1500 --record " +
                             live_rec.string() + " --report " + live_report.string(),
                         work_dir() / "c7_run.log");
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(500));
    const int sim_rc = run_cli("simulate --input " + scenario.string() + " --udp 127.0.0.1:" +
                                   std::to_string(port) + " --seed 7 --fast",
                               work_dir() / "c7_sim.log");
    runner.join();

    check.require(sim_rc == 0, "cmd_simulate over UDP failed");
    check.require(run_rc == 0, "live cmd_run failed");

    const fs::path offline_report = work_dir() / "c7_offline_report.txt";
    check.require(run_cli("analyze --input " + live_rec.string() + " --output " +
                              offline_report.string(),
                          work_dir() / "c7_analyze.log") == 0,
                  "cmd_analyze on the recorded file failed");

    const auto live_events = lines_with_prefix(slurp(live_report), "event:");
    const auto offline_events = lines_with_prefix(slurp(offline_report), "event:");
    check.require(lines_with_prefix(slurp(live_report), "samples: 0").empty(),
                  "live run received no samples");
    check.require(!live_events.empty(), "live run produced no events");
    check.require(live_events == offline_events,
                  "offline analyze and live run event logs differ");
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<void(Check&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "filter correctness (fixed point, geometric convergence, alpha extremes)", 1.0,
         criterion_filter},
        {2, "10MWT reproduction: exactly 7 strides at desk scale", 5.0, criterion_strides},
        {3, "lean-fall reproduction: monotone pitch and early breakpoint in >= 9/10 runs", 10.0,
         criterion_breakpoint},
        {4, "telemetry: round trip, bit-corruption rejection, record/replay idempotence", 10.0,
         criterion_telemetry},
        {5, "vestibular feedback: monotone sweep with exact endpoints", 1.0,
         criterion_vestibular},
        {6, "risk predictor: sens/spec >= 0.8 with positive lead time, oracle-tracking", 60.0,
         criterion_risk},
        {7, "closed loop: live UDP run equals offline analyze", 30.0, criterion_closed_loop},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed >= criterion.budget_s) {
            check.failures.push_back("runtime " + std::to_string(elapsed) + " s exceeds budget " +
                                     std::to_string(criterion.budget_s) + " s");
        }
        if (check.failures.empty()) {
            std::cout << "PASS criterion " << criterion.id << ": " << criterion.name << " ("
                      << elapsed << " s)\n";
        } else {
            ++failed;
            std::cout << "FAIL criterion " << criterion.id << ": " << criterion.name << "\n";
            for (const auto& failure : check.failures) {
                std::cout << "      - " << failure << "\n";
            }
        }
    }
    if (failed > 0) {
        std::cout << failed << " of " << criteria.size() << " criteria failed\n";
        return 1;
    }
    std::cout << "all " << criteria.size() << " criteria passed\n";
    return 0;
}
