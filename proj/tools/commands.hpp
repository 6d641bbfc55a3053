#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "equilivest/config.hpp"

namespace equilivest::cli {

struct ListenOptions {
    std::uint16_t port = 5005;
    std::string output;
    int timeout_ms = 2000;  // idle timeout ends the session
};

struct AnalyzeOptions {
    std::string input;
    std::string output;  // empty = stdout
};

struct SimulateOptions {
    std::string scenario_path;  // --input
    std::string output;         // recording file
    std::string udp_target;     // host:port
    std::uint64_t seed = 1;
    bool fast = false;  // no pacing when streaming
};

struct TrainOptions {
    std::vector<std::string> inputs;
    std::string model_output;
    // <= 0 / < 0 means "take the config/default value"
    int epochs = -1;
    double learning_rate = -1.0;
    double l2 = -1.0;
};

struct RunOptions {
    std::string input;  // recording file; empty in live mode
    int port = -1;      // >= 0 enables live UDP mode
    int timeout_ms = 2000;
    std::string model_path;
    std::string commands_output;  // motor command log
    std::string report_output;
    std::string record_path;  // write processed samples back out
};

int run_listen(const ListenOptions& opt, const config::Table& cfg);
int run_analyze(const AnalyzeOptions& opt, const config::Table& cfg);
int run_simulate(const SimulateOptions& opt, const config::Table& cfg);
int run_train(const TrainOptions& opt, const config::Table& cfg);
int run_run(const RunOptions& opt, const config::Table& cfg);

}  // namespace equilivest::cli
