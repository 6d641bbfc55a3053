#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "equilivest/errors.hpp"

namespace {

equilivest::config::Table load_config(const std::string& path) {
    if (path.empty()) return {};
    return equilivest::config::Table::parse_file(path);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace equilivest;

    CLI::App app{"Vibrotactile balance vest toolchain: telemetry, analysis, "
                 "simulation, risk training and closed-loop feedback"};
    app.require_subcommand(1);

    std::string config_path;
    int exit_code = 0;

    // listen
    cli::ListenOptions listen_opt;
    auto* listen = app.add_subcommand("listen", "Receive UDP telemetry and record it");
    listen->add_option("--port", listen_opt.port, "UDP port to bind")->capture_default_str();
    listen->add_option("--output", listen_opt.output, "Recording file to write")->required();
    listen->add_option("--timeout-ms", listen_opt.timeout_ms, "Idle timeout ending the session")
        ->capture_default_str();
    listen->add_option("--config", config_path, "Configuration file");
    listen->callback([&] { exit_code = cli::run_listen(listen_opt, load_config(config_path)); });

    // analyze
    cli::AnalyzeOptions analyze_opt;
    auto* analyze = app.add_subcommand("analyze", "Run filter and detectors over a recording");
    analyze->add_option("--input", analyze_opt.input, "Recording file")->required();
    analyze->add_option("--output", analyze_opt.output, "Report file (default stdout)");
    analyze->add_option("--config", config_path, "Configuration file");
    analyze->callback([&] { exit_code = cli::run_analyze(analyze_opt, load_config(config_path)); });

    // simulate
    cli::SimulateOptions sim_opt;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario");
    simulate->add_option("--input", sim_opt.scenario_path, "Scenario file")->required();
    simulate->add_option("--output", sim_opt.output, "Recording file to write");
    simulate->add_option("--udp", sim_opt.udp_target, "Stream packets to host:port");
    simulate->add_option("--seed", sim_opt.seed, "Generator seed")->capture_default_str();
    simulate->add_flag("--fast", sim_opt.fast, "Stream without real-time pacing");
    simulate->add_option("--config", config_path, "Configuration file");
    simulate->callback([&] { exit_code = cli::run_simulate(sim_opt, load_config(config_path)); });

    // train
    cli::TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "Train the fall-risk model from recordings");
    train->add_option("--input", train_opt.inputs, "Recording file (repeatable)")->required();
    train->add_option("--output", train_opt.model_output, "Model file to write")->required();
    train->add_option("--epochs", train_opt.epochs, "Training epochs");
    train->add_option("--learning-rate", train_opt.learning_rate, "Gradient step size");
    train->add_option("--l2", train_opt.l2, "L2 regularization strength");
    train->add_option("--config", config_path, "Configuration file");
    train->callback([&] { exit_code = cli::run_train(train_opt, load_config(config_path)); });

    // run
    cli::RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Closed loop: filter, detectors, risk and feedback");
    run->add_option("--input", run_opt.input, "Recording file to process offline");
    run->add_option("--port", run_opt.port, "UDP port for live processing");
    run->add_option("--timeout-ms", run_opt.timeout_ms, "Idle timeout for live mode")
        ->capture_default_str();
    run->add_option("--model", run_opt.model_path, "Trained risk model file");
    run->add_option("--output", run_opt.commands_output, "Motor command log");
    run->add_option("--report", run_opt.report_output, "Analysis report file");
    run->add_option("--record", run_opt.record_path, "Write processed samples as a recording");
    run->add_option("--config", config_path, "Configuration file");
    run->callback([&] { exit_code = cli::run_run(run_opt, load_config(config_path)); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
