#include "equilivest/telemetry.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>

namespace equilivest::telemetry {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
        }
        table[i] = c;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

void put_u32(std::uint8_t* p, std::uint32_t v) noexcept {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

void put_u64(std::uint8_t* p, std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_f32(std::uint8_t* p, float v) noexcept { put_u32(p, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(const std::uint8_t* p) noexcept {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint64_t get_u64(const std::uint8_t* p) noexcept {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | p[i];
    return v;
}

float get_f32(const std::uint8_t* p) noexcept { return std::bit_cast<float>(get_u32(p)); }

template <typename T>
std::string to_text(T value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(errc::parse, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        parse_fail(line, "bad numeric field '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

constexpr std::string_view kHeader = "seq,t_ms,ax,ay,az,gx,gy,gz,roll,pitch,yaw";

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t byte : data) {
        crc = kCrcTable[(crc ^ byte) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

std::array<std::uint8_t, kPacketSize> encode_packet(
    const ImuSample& sample, const std::optional<OrientationState>& orientation) {
    for (float a : sample.accel) {
        if (!std::isfinite(a)) throw Error(errc::invalid_argument, "encode: non-finite accel");
    }
    for (float g : sample.gyro) {
        if (!std::isfinite(g)) throw Error(errc::invalid_argument, "encode: non-finite gyro");
    }

    std::array<std::uint8_t, kPacketSize> out{};
    std::memcpy(out.data(), kPacketMagic.data(), 4);
    out[4] = kProtocolVersion;
    put_u32(out.data() + 5, sample.seq);
    put_u64(out.data() + 9, sample.t_ms);
    for (int i = 0; i < 3; ++i) put_f32(out.data() + 17 + 4 * i, sample.accel[i]);
    for (int i = 0; i < 3; ++i) put_f32(out.data() + 29 + 4 * i, sample.gyro[i]);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    put_f32(out.data() + 41, orientation ? static_cast<float>(orientation->roll_deg) : nan);
    put_f32(out.data() + 45, orientation ? static_cast<float>(orientation->pitch_deg) : nan);
    put_f32(out.data() + 49, orientation ? static_cast<float>(orientation->yaw_deg) : nan);
    put_u64(out.data() + 53, 0);  // reserved
    put_u32(out.data() + 61, crc32(std::span(out.data(), 61)));
    return out;
}

DecodedPacket decode_packet(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kPacketSize) {
        throw Error(errc::packet_length, "expected " + std::to_string(kPacketSize) +
                                             " bytes, got " + std::to_string(bytes.size()));
    }
    if (std::memcmp(bytes.data(), kPacketMagic.data(), 4) != 0) {
        throw Error(errc::packet_magic, "bad magic");
    }
    const std::uint32_t stored_crc = get_u32(bytes.data() + 61);
    const std::uint32_t computed_crc = crc32(bytes.first(61));
    if (stored_crc != computed_crc) {
        throw Error(errc::packet_integrity, "crc mismatch");
    }
    if (bytes[4] != kProtocolVersion) {
        throw Error(errc::packet_version,
                    "unsupported version " + std::to_string(bytes[4]));
    }

    DecodedPacket packet;
    packet.sample.seq = get_u32(bytes.data() + 5);
    packet.sample.t_ms = get_u64(bytes.data() + 9);
    for (int i = 0; i < 3; ++i) packet.sample.accel[i] = get_f32(bytes.data() + 17 + 4 * i);
    for (int i = 0; i < 3; ++i) packet.sample.gyro[i] = get_f32(bytes.data() + 29 + 4 * i);
    const float roll = get_f32(bytes.data() + 41);
    const float pitch = get_f32(bytes.data() + 45);
    const float yaw = get_f32(bytes.data() + 49);
    if (!(std::isnan(roll) && std::isnan(pitch) && std::isnan(yaw))) {
        packet.orientation = OrientationState{roll, pitch, yaw, packet.sample.t_ms};
    }
    return packet;
}

StreamStats receive_stream(DatagramSource& source, const PacketSink& sink) {
    StreamStats stats;
    bool have_seq = false;
    std::uint32_t max_seq = 0;
    while (auto datagram = source.next()) {
        DecodedPacket packet;
        try {
            packet = decode_packet(*datagram);
        } catch (const Error&) {
            ++stats.packets_rejected;
            continue;
        }
        ++stats.packets_received;
        if (!have_seq) {
            have_seq = true;
            max_seq = packet.sample.seq;
        } else if (packet.sample.seq > max_seq) {
            stats.packets_dropped += packet.sample.seq - max_seq - 1;
            max_seq = packet.sample.seq;
        } else {
            ++stats.packets_reordered;
        }
        if (sink) sink(packet.sample, packet.orientation);
    }
    return stats;
}

void save_session(const SessionRecording& recording, const std::filesystem::path& path) {
    if (!recording.device_orientation.empty() &&
        recording.device_orientation.size() != recording.samples.size()) {
        throw Error(errc::invalid_argument,
                    "save_session: device_orientation length must match samples");
    }
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path.string());

    const auto& meta = recording.meta;
    if (!meta.session_id.empty()) out << "# session: " << meta.session_id << "\n";
    if (!meta.start_time.empty()) out << "# start: " << meta.start_time << "\n";
    if (!meta.scenario.empty()) out << "# scenario: " << meta.scenario << "\n";
    for (const auto& [key, value] : meta.annotations) {
        out << "# annotation: " << key << "=" << value << "\n";
    }

    out << kHeader << "\n";
    for (std::size_t i = 0; i < recording.samples.size(); ++i) {
        const ImuSample& s = recording.samples[i];
        out << s.seq << ',' << s.t_ms;
        for (float a : s.accel) out << ',' << to_text(a);
        for (float g : s.gyro) out << ',' << to_text(g);
        if (!recording.device_orientation.empty() && recording.device_orientation[i]) {
            const OrientationState& o = *recording.device_orientation[i];
            out << ',' << to_text(o.roll_deg) << ',' << to_text(o.pitch_deg) << ','
                << to_text(o.yaw_deg);
        }
        out << "\n";
    }
    for (const GaitEvent& e : recording.events) {
        out << "# event: " << gait_event_kind_name(e.kind) << ',' << e.t_ms << ','
            << to_text(e.value) << "\n";
    }
    for (const TimedMotorCommand& c : recording.commands) {
        out << "# command: " << to_text(c.t_ms) << ',' << to_text(c.command.frequency_hz) << ','
            << to_text(c.command.intensity) << ',' << to_text(c.command.duration_ms) << "\n";
    }
    if (!out) throw Error(errc::io, "write failed: " + path.string());
}

SessionRecording load_session(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open for reading: " + path.string());

    SessionRecording recording;
    bool saw_header = false;
    bool any_orientation = false;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (line.front() == '#') {
            std::string_view body(line);
            body.remove_prefix(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            auto tagged = [&](std::string_view tag) -> std::optional<std::string_view> {
                if (body.substr(0, tag.size()) != tag) return std::nullopt;
                auto rest = body.substr(tag.size());
                while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
                return rest;
            };
            if (auto v = tagged("session:")) {
                recording.meta.session_id = std::string(*v);
            } else if (auto v = tagged("start:")) {
                recording.meta.start_time = std::string(*v);
            } else if (auto v = tagged("scenario:")) {
                recording.meta.scenario = std::string(*v);
            } else if (auto v = tagged("annotation:")) {
                std::size_t eq = v->find('=');
                if (eq == std::string_view::npos) parse_fail(line_no, "annotation without '='");
                recording.meta.annotations.emplace_back(std::string(v->substr(0, eq)),
                                                        std::string(v->substr(eq + 1)));
            } else if (auto v = tagged("event:")) {
                auto fields = split(*v, ',');
                if (fields.size() != 3) parse_fail(line_no, "event needs kind,t_ms,value");
                auto kind = gait_event_kind_from_name(std::string(fields[0]));
                if (!kind) parse_fail(line_no, "unknown event kind '" + std::string(fields[0]) + "'");
                recording.events.push_back(GaitEvent{*kind,
                                                     parse_number<std::uint64_t>(fields[1], line_no),
                                                     parse_number<double>(fields[2], line_no)});
            } else if (auto v = tagged("command:")) {
                auto fields = split(*v, ',');
                if (fields.size() != 4) {
                    parse_fail(line_no, "command needs t_ms,frequency_hz,intensity,duration_ms");
                }
                TimedMotorCommand cmd;
                cmd.t_ms = parse_number<double>(fields[0], line_no);
                cmd.command.frequency_hz = parse_number<double>(fields[1], line_no);
                cmd.command.intensity = parse_number<double>(fields[2], line_no);
                cmd.command.duration_ms = parse_number<double>(fields[3], line_no);
                recording.commands.push_back(cmd);
            }
            // Other '#' lines are plain comments.
            continue;
        }

        if (!saw_header) {
            if (std::string_view(line).substr(0, 4) != "seq,") {
                parse_fail(line_no, "expected header line '" + std::string(kHeader) + "'");
            }
            saw_header = true;
            continue;
        }

        auto fields = split(line, ',');
        if (fields.size() != 8 && fields.size() != 11) {
            parse_fail(line_no, "expected 8 or 11 fields, got " + std::to_string(fields.size()));
        }
        ImuSample sample;
        sample.seq = parse_number<std::uint32_t>(fields[0], line_no);
        sample.t_ms = parse_number<std::uint64_t>(fields[1], line_no);
        for (int i = 0; i < 3; ++i) sample.accel[i] = parse_number<float>(fields[2 + i], line_no);
        for (int i = 0; i < 3; ++i) sample.gyro[i] = parse_number<float>(fields[5 + i], line_no);
        if (!recording.samples.empty() && sample.t_ms < recording.samples.back().t_ms) {
            throw Error(errc::stream_order,
                        "line " + std::to_string(line_no) + ": timestamp moved backwards");
        }
        recording.samples.push_back(sample);
        if (fields.size() == 11) {
            OrientationState o;
            o.roll_deg = parse_number<double>(fields[8], line_no);
            o.pitch_deg = parse_number<double>(fields[9], line_no);
            o.yaw_deg = parse_number<double>(fields[10], line_no);
            o.t_ms = sample.t_ms;
            recording.device_orientation.resize(recording.samples.size() - 1);
            recording.device_orientation.push_back(o);
            any_orientation = true;
        } else if (any_orientation) {
            recording.device_orientation.push_back(std::nullopt);
        }
    }
    if (any_orientation) {
        recording.device_orientation.resize(recording.samples.size());
    }
    return recording;
}

SessionRecording record_session(std::span<const ImuSample> samples,
                                const std::filesystem::path& path) {
    SessionRecording recording;
    recording.samples.assign(samples.begin(), samples.end());
    save_session(recording, path);
    return recording;
}

void replay_session(const std::filesystem::path& path, double rate_multiplier,
                    const std::function<void(const ImuSample&)>& sink) {
    if (rate_multiplier < 0.0) {
        throw Error(errc::invalid_argument, "replay: rate multiplier must be >= 0");
    }
    SessionRecording recording = load_session(path);
    std::uint64_t prev_t = 0;
    bool first = true;
    for (const ImuSample& sample : recording.samples) {
        if (!first && rate_multiplier > 0.0) {
            const double gap_ms = static_cast<double>(sample.t_ms - prev_t) / rate_multiplier;
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(gap_ms));
        }
        first = false;
        prev_t = sample.t_ms;
        if (sink) sink(sample);
    }
}

std::vector<ImuSample> replay_session(const std::filesystem::path& path, double rate_multiplier) {
    std::vector<ImuSample> out;
    replay_session(path, rate_multiplier, [&](const ImuSample& s) { out.push_back(s); });
    return out;
}

}  // namespace equilivest::telemetry
