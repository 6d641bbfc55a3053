#pragma once

#include <stdexcept>
#include <string>

namespace equilivest {

// Error classes carry a stable numeric code; the CLI maps each code to its
// process exit status, so every failure class is distinguishable from scripts.
enum class errc : int {
    invalid_argument = 10,
    degenerate_input = 11,
    stream_order = 12,

    packet_length = 20,
    packet_magic = 21,
    packet_version = 22,
    packet_integrity = 23,
    transport = 24,

    parse = 30,
    io = 31,
    config = 32,

    calibration = 40,
    annotation = 41,
    degenerate_training = 42,
    shape_mismatch = 43,
    insufficient_data = 44,
    undefined_measure = 45,
    evaluation = 46,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    errc code_;
};

}  // namespace equilivest
