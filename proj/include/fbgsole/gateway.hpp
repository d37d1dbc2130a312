#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fbgsole {

// Wire grammar, one frame per datagram:
//   FBGX;v1;<seq>;<t_ms>;<n>;<id>:<mode>:<value>;...;CRC32=<8 hex digits>\n
// Values carry exactly three decimals, NaN prints as "NaN", the CRC-32
// (IEEE) covers every byte before the literal "CRC32=", and the hex digits
// are lowercase. Mode C readings are always NaN; S and T are always finite.

enum class ReadingMode : char { Strain = 'S', Temperature = 'T', Compensation = 'C' };

struct SensorReading {
    int sensor_id = 0;
    ReadingMode mode = ReadingMode::Strain;
    double value = 0.0;
};

struct TelemetryFrame {
    std::uint32_t seq = 0;
    std::uint64_t t_ms = 0;
    std::vector<SensorReading> readings;
};

bool operator==(const SensorReading& a, const SensorReading& b);
bool operator==(const TelemetryFrame& a, const TelemetryFrame& b);

/// Quantizes to the wire resolution (0.001); encode/decode round-trips are
/// exact for values produced by this.
double quantize_reading(double value);

/// Serializes a frame; throws std::invalid_argument when the frame breaks
/// an invariant (duplicate ids, NaN in S/T mode, non-NaN in C mode).
std::string encode_frame(const TelemetryFrame& frame);

enum class ParseCode {
    Ok,
    BadMagic,
    BadCrc,
    BadFieldCount,
    BadMode,
    NonFiniteInSorTMode,
};

const char* parse_code_name(ParseCode code);

struct ParseError {
    ParseCode code = ParseCode::Ok;
    std::size_t byte_offset = 0;
    std::string detail;
};

struct DecodeResult {
    std::optional<TelemetryFrame> frame;
    ParseError error;

    bool ok() const { return frame.has_value(); }
};

/// Parses one datagram. The CRC is verified before any field validation.
DecodeResult decode_frame(std::string_view datagram);

struct GapReport {
    std::vector<std::uint32_t> missing;  // strictly increasing
    std::uint64_t duplicates = 0;
    std::uint64_t out_of_order = 0;
};

/// Restores sequence order within a bounded window. push() returns the
/// frames that became deliverable; finish() drains the rest. Gaps,
/// duplicates and reordering are tallied, never fatal.
class FrameReorderer {
public:
    explicit FrameReorderer(std::size_t window = 8) : window_(window) {}

    std::vector<TelemetryFrame> push(TelemetryFrame frame);
    std::vector<TelemetryFrame> finish();
    const GapReport& report() const { return report_; }

private:
    std::vector<TelemetryFrame> pop_ready(bool flush);

    std::size_t window_;
    std::vector<TelemetryFrame> pending_;  // kept sorted by seq
    GapReport report_;
    bool delivered_any_ = false;
    std::uint32_t next_seq_ = 0;
    std::uint32_t max_seq_seen_ = 0;
    bool seen_any_ = false;
};

struct IngestResult {
    std::vector<TelemetryFrame> frames;
    GapReport gaps;
    std::uint64_t parse_errors = 0;
};

/// Decode + reorder a batch of datagrams (the transport-free core of the
/// ingestor).
IngestResult ingest_datagrams(std::span<const std::string> datagrams,
                              std::size_t window = 8);

// --- UDP transport -------------------------------------------------------

inline constexpr const char* kDefaultHost = "127.0.0.1";
inline constexpr int kDefaultPort = 9750;
inline constexpr double kMinRateHz = 1.0;
inline constexpr double kMaxRateHz = 100.0;

class UdpSender {
public:
    UdpSender(const std::string& host, int port);
    ~UdpSender();
    UdpSender(const UdpSender&) = delete;
    UdpSender& operator=(const UdpSender&) = delete;

    void send(std::string_view datagram);

private:
    int fd_ = -1;
};

class UdpReceiver {
public:
    UdpReceiver(const std::string& host, int port);
    ~UdpReceiver();
    UdpReceiver(const UdpReceiver&) = delete;
    UdpReceiver& operator=(const UdpReceiver&) = delete;

    /// One datagram, or nullopt on timeout.
    std::optional<std::string> recv(int timeout_ms);

    int port() const { return port_; }

private:
    int fd_ = -1;
    int port_ = 0;
};

struct EmitOptions {
    std::string host = kDefaultHost;
    int port = kDefaultPort;
    double rate_hz = 40.0;
    int pace_us = 200;  // inter-datagram spacing; timestamps stay nominal
};

/// Sends one datagram per frame with seq 0..n-1 and nominal timestamps
/// t_ms = round(seq*1000/rate). Frames come from the source callback
/// (nullopt ends the stream). Throws std::invalid_argument for rates
/// outside [1, 100].
std::uint32_t emit_stream(const std::function<std::optional<TelemetryFrame>(std::uint32_t)>& source,
                          const EmitOptions& options);

/// Nominal timestamp for a sequence number at a given rate.
std::uint64_t nominal_t_ms(std::uint32_t seq, double rate_hz);

struct IngestOptions {
    std::string host = kDefaultHost;
    int port = kDefaultPort;
    std::size_t window = 8;
    int idle_timeout_ms = 2000;
    std::uint64_t max_frames = 0;  // 0 = until idle
};

/// Receives datagrams until idle (or max_frames), decoding and reordering.
IngestResult ingest_stream(const IngestOptions& options);

}  // namespace fbgsole
