#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "equilivest/types.hpp"

namespace equilivest::telemetry {

// Wire layout, all multi-byte fields little-endian:
//   offset  0  magic       "EQLV"
//   offset  4  version     u8 = 1
//   offset  5  seq         u32
//   offset  9  t_ms        u64
//   offset 17  ax ay az    f32 x3  [g]
//   offset 29  gx gy gz    f32 x3  [deg/s]
//   offset 41  roll pitch yaw  f32 x3  [deg], all-NaN when no device estimate
//   offset 53  reserved    u64 = 0
//   offset 61  crc         u32, CRC-32 of bytes [0, 61)
inline constexpr std::size_t kPacketSize = 65;
inline constexpr std::array<std::uint8_t, 4> kPacketMagic = {'E', 'Q', 'L', 'V'};
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 5005;

// CRC-32 (reflected, polynomial 0xEDB88320, init/final 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept;

struct DecodedPacket {
    ImuSample sample;
    std::optional<OrientationState> orientation;
};

// Throws errc::invalid_argument if any sample field is non-finite.
std::array<std::uint8_t, kPacketSize> encode_packet(
    const ImuSample& sample, const std::optional<OrientationState>& orientation = {});

// Inverse of encode_packet. Throws errc::packet_length, packet_magic,
// packet_integrity or packet_version naming the failing check.
DecodedPacket decode_packet(std::span<const std::uint8_t> bytes);

struct StreamStats {
    std::uint64_t packets_received = 0;   // valid packets forwarded to the sink
    std::uint64_t packets_dropped = 0;    // sequence gaps (seq jumped forward by > 1)
    std::uint64_t packets_reordered = 0;  // seq at or below the max already seen
    std::uint64_t packets_rejected = 0;   // bad length/magic/crc/version
};

// Blocking datagram supplier; nullopt means the source is exhausted.
class DatagramSource {
public:
    virtual ~DatagramSource() = default;
    virtual std::optional<std::vector<std::uint8_t>> next() = 0;
};

using PacketSink =
    std::function<void(const ImuSample&, const std::optional<OrientationState>&)>;

// Forwards valid packets to the sink in arrival order until the source is
// exhausted. Malformed datagrams are counted, never fatal.
StreamStats receive_stream(DatagramSource& source, const PacketSink& sink);

// Ordered hand-off between the receiver and the processing task. When full,
// push drops the oldest element and counts it: freshness beats completeness.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    void push(T value) {
        {
            std::lock_guard lock(mutex_);
            if (items_.size() == capacity_) {
                items_.pop_front();
                ++dropped_;
            }
            items_.push_back(std::move(value));
        }
        cv_.notify_one();
    }

    // Blocks up to timeout; nullopt on timeout or when closed and drained.
    std::optional<T> pop(std::chrono::milliseconds timeout) {
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, timeout, [this] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T value = std::move(items_.front());
        items_.pop_front();
        return value;
    }

    void close() {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    std::uint64_t dropped() const {
        std::lock_guard lock(mutex_);
        return dropped_;
    }

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<T> items_;
    std::size_t capacity_;
    std::uint64_t dropped_ = 0;
    bool closed_ = false;
};

// --- session recording ------------------------------------------------
//
// UTF-8 text, one comma-separated line per sample:
//   seq,t_ms,ax,ay,az,gx,gy,gz[,roll,pitch,yaw]
// with a single header line. Metadata, ground-truth annotations, events and
// commands ride on '#'-prefixed lines so the whole SessionRecording
// round-trips. Floats are printed with shortest round-trip precision.

void save_session(const SessionRecording& recording, const std::filesystem::path& path);

// Throws errc::parse with the line number for malformed lines and
// errc::stream_order for non-monotone sample timestamps.
SessionRecording load_session(const std::filesystem::path& path);

// Builds a recording from a sample stream and writes it to path.
SessionRecording record_session(std::span<const ImuSample> samples,
                                const std::filesystem::path& path);

// Replays a recorded sample stream through the sink in order.
// rate_multiplier > 0 paces delivery against the recorded timestamps
// (2.0 = twice real time); 0 replays as fast as possible.
void replay_session(const std::filesystem::path& path, double rate_multiplier,
                    const std::function<void(const ImuSample&)>& sink);
std::vector<ImuSample> replay_session(const std::filesystem::path& path,
                                      double rate_multiplier = 0.0);

}  // namespace equilivest::telemetry
