#include "fbgsole/gateway.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <system_error>
#include <thread>

#include "fbgsole/util.hpp"

namespace fbgsole {

namespace {

constexpr std::string_view kMagic = "FBGX;v1;";
constexpr std::string_view kCrcLabel = "CRC32=";

std::uint32_t crc32_of(std::string_view data) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uInt>(data.size())));
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
    if (!all_digits(s) || s.size() > 20) return false;
    out = 0;
    for (char c : s) {
        if (out > (UINT64_MAX - (c - '0')) / 10) return false;
        out = out * 10 + (c - '0');
    }
    return true;
}

DecodeResult fail(ParseCode code, std::size_t offset, std::string detail) {
    DecodeResult r;
    r.error = {code, offset, std::move(detail)};
    return r;
}

sockaddr_in make_addr(const std::string& host, int port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw std::invalid_argument("invalid IPv4 address: " + host);
    }
    return addr;
}

}  // namespace

bool operator==(const SensorReading& a, const SensorReading& b) {
    const bool values_equal =
        (std::isnan(a.value) && std::isnan(b.value)) || a.value == b.value;
    return a.sensor_id == b.sensor_id && a.mode == b.mode && values_equal;
}

bool operator==(const TelemetryFrame& a, const TelemetryFrame& b) {
    return a.seq == b.seq && a.t_ms == b.t_ms && a.readings == b.readings;
}

double quantize_reading(double value) {
    if (std::isnan(value)) return value;
    double q = std::round(value * 1000.0) / 1000.0;
    if (q == 0.0) q = 0.0;  // normalize -0
    return q;
}

std::string encode_frame(const TelemetryFrame& frame) {
    std::string line = strf("FBGX;v1;%u;%llu;%zu;", frame.seq,
                            static_cast<unsigned long long>(frame.t_ms),
                            frame.readings.size());
    std::vector<int> ids;
    for (const auto& r : frame.readings) {
        if (std::find(ids.begin(), ids.end(), r.sensor_id) != ids.end()) {
            throw std::invalid_argument(
                strf("duplicate sensor id %d in frame", r.sensor_id));
        }
        ids.push_back(r.sensor_id);
        const bool is_nan = std::isnan(r.value);
        if (r.mode == ReadingMode::Compensation && !is_nan) {
            throw std::invalid_argument("compensation-mode reading must be NaN");
        }
        if (r.mode != ReadingMode::Compensation && !std::isfinite(r.value)) {
            throw std::invalid_argument("S/T-mode reading must be finite");
        }
        line += strf("%d:%c:", r.sensor_id, static_cast<char>(r.mode));
        line += is_nan ? "NaN" : strf("%.3f", r.value);
        line += ';';
    }
    line += strf("CRC32=%08x\n", crc32_of(std::string_view(line)));
    return line;
}

const char* parse_code_name(ParseCode code) {
    switch (code) {
        case ParseCode::Ok: return "Ok";
        case ParseCode::BadMagic: return "BadMagic";
        case ParseCode::BadCrc: return "BadCRC";
        case ParseCode::BadFieldCount: return "BadFieldCount";
        case ParseCode::BadMode: return "BadMode";
        case ParseCode::NonFiniteInSorTMode: return "NonFiniteInSorTMode";
    }
    return "?";
}

DecodeResult decode_frame(std::string_view datagram) {
    // framing: magic prefix and newline terminator
    if (datagram.size() < kMagic.size() || datagram.substr(0, kMagic.size()) != kMagic) {
        return fail(ParseCode::BadMagic, 0, "expected FBGX;v1; prefix");
    }
    if (datagram.back() != '\n') {
        return fail(ParseCode::BadMagic, datagram.size() - 1, "missing newline terminator");
    }
    const std::string_view line = datagram.substr(0, datagram.size() - 1);
    if (line.find('\n') != std::string_view::npos) {
        return fail(ParseCode::BadMagic, line.find('\n'), "embedded newline");
    }

    // CRC before any field validation
    const std::size_t crc_pos = line.rfind(kCrcLabel);
    if (crc_pos == std::string_view::npos || crc_pos == 0 || line[crc_pos - 1] != ';') {
        return fail(ParseCode::BadCrc, line.size(), "CRC32 token missing");
    }
    const std::string_view hex = line.substr(crc_pos + kCrcLabel.size());
    if (hex.size() != 8 || !std::all_of(hex.begin(), hex.end(), [](char c) {
            return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        })) {
        return fail(ParseCode::BadCrc, crc_pos + kCrcLabel.size(),
                    "CRC32 must be 8 lowercase hex digits");
    }
    std::uint32_t stated = 0;
    for (char c : hex) {
        stated = stated * 16 + (c <= '9' ? c - '0' : c - 'a' + 10);
    }
    const std::uint32_t computed = crc32_of(line.substr(0, crc_pos));
    if (stated != computed) {
        return fail(ParseCode::BadCrc, crc_pos + kCrcLabel.size(),
                    strf("CRC mismatch: stated %08x, computed %08x", stated, computed));
    }

    // split the payload between the magic and the CRC token into fields
    struct Field {
        std::string_view text;
        std::size_t offset;
    };
    std::vector<Field> fields;
    std::size_t start = kMagic.size();
    for (std::size_t i = start; i + 1 < crc_pos; ++i) {
        if (line[i] == ';') {
            fields.push_back({line.substr(start, i - start), start});
            start = i + 1;
        }
    }
    if (start < crc_pos - 1) {
        fields.push_back({line.substr(start, crc_pos - 1 - start), start});
    }

    if (fields.size() < 3) {
        return fail(ParseCode::BadFieldCount, kMagic.size(),
                    "expected seq, t_ms and reading count");
    }

    TelemetryFrame frame;
    std::uint64_t seq64 = 0, t_ms = 0, count = 0;
    if (!parse_u64(fields[0].text, seq64) || seq64 > UINT32_MAX) {
        return fail(ParseCode::BadFieldCount, fields[0].offset, "malformed seq");
    }
    if (!parse_u64(fields[1].text, t_ms)) {
        return fail(ParseCode::BadFieldCount, fields[1].offset, "malformed t_ms");
    }
    if (!parse_u64(fields[2].text, count)) {
        return fail(ParseCode::BadFieldCount, fields[2].offset, "malformed reading count");
    }
    frame.seq = static_cast<std::uint32_t>(seq64);
    frame.t_ms = t_ms;

    if (fields.size() - 3 != count) {
        return fail(ParseCode::BadFieldCount, fields[2].offset,
                    strf("frame declares %llu readings, carries %zu",
                         static_cast<unsigned long long>(count), fields.size() - 3));
    }

    for (std::size_t i = 3; i < fields.size(); ++i) {
        const std::string_view tok = fields[i].text;
        const std::size_t off = fields[i].offset;
        const std::size_t c1 = tok.find(':');
        const std::size_t c2 = c1 == std::string_view::npos
                                   ? std::string_view::npos
                                   : tok.find(':', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
            tok.find(':', c2 + 1) != std::string_view::npos) {
            return fail(ParseCode::BadFieldCount, off, "reading is not id:mode:value");
        }
        std::uint64_t id = 0;
        if (!parse_u64(tok.substr(0, c1), id) || id > INT32_MAX) {
            return fail(ParseCode::BadFieldCount, off, "malformed sensor id");
        }
        const std::string_view mode_str = tok.substr(c1 + 1, c2 - c1 - 1);
        if (mode_str.size() != 1 ||
            (mode_str[0] != 'S' && mode_str[0] != 'T' && mode_str[0] != 'C')) {
            return fail(ParseCode::BadMode, off + c1 + 1, "mode must be S, T or C");
        }
        const ReadingMode mode = static_cast<ReadingMode>(mode_str[0]);
        const std::string_view value_str = tok.substr(c2 + 1);
        const std::size_t value_off = off + c2 + 1;

        double value = 0.0;
        if (value_str == "NaN") {
            value = std::numeric_limits<double>::quiet_NaN();
        } else {
            const std::string buf(value_str);
            char* end = nullptr;
            value = std::strtod(buf.c_str(), &end);
            if (end != buf.c_str() + buf.size() || buf.empty()) {
                return fail(ParseCode::BadFieldCount, value_off, "malformed value");
            }
        }
        if (mode == ReadingMode::Compensation && !std::isnan(value)) {
            return fail(ParseCode::BadMode, value_off,
                        "compensation-mode reading must be NaN");
        }
        if (mode != ReadingMode::Compensation && !std::isfinite(value)) {
            return fail(ParseCode::NonFiniteInSorTMode, value_off,
                        strf("non-finite value in %c mode", static_cast<char>(mode)));
        }
        for (const auto& r : frame.readings) {
            if (r.sensor_id == static_cast<int>(id)) {
                return fail(ParseCode::BadFieldCount, off, "duplicate sensor id");
            }
        }
        frame.readings.push_back({static_cast<int>(id), mode, value});
    }

    DecodeResult result;
    result.frame = std::move(frame);
    return result;
}

std::vector<TelemetryFrame> FrameReorderer::push(TelemetryFrame frame) {
    const std::uint32_t seq = frame.seq;

    if (delivered_any_ && seq < next_seq_) {
        // behind the delivery point: a replay of a delivered frame or a
        // frame that already went into the missing list (too late to order)
        if (std::binary_search(report_.missing.begin(), report_.missing.end(), seq)) {
            report_.out_of_order += 1;
        } else {
            report_.duplicates += 1;
        }
        return {};
    }
    for (const auto& p : pending_) {
        if (p.seq == seq) {
            report_.duplicates += 1;
            return {};
        }
    }
    if (seen_any_ && seq < max_seq_seen_) {
        report_.out_of_order += 1;
    }
    max_seq_seen_ = seen_any_ ? std::max(max_seq_seen_, seq) : seq;
    seen_any_ = true;

    pending_.insert(std::upper_bound(pending_.begin(), pending_.end(), seq,
                                     [](std::uint32_t s, const TelemetryFrame& f) {
                                         return s < f.seq;
                                     }),
                    std::move(frame));
    return pop_ready(false);
}

std::vector<TelemetryFrame> FrameReorderer::finish() {
    return pop_ready(true);
}

std::vector<TelemetryFrame> FrameReorderer::pop_ready(bool flush) {
    std::vector<TelemetryFrame> out;
    while (!pending_.empty()) {
        if (!delivered_any_) {
            if (!flush && pending_.size() <= window_) break;
            next_seq_ = pending_.front().seq;  // baseline = first ordered seq
            delivered_any_ = true;
        }
        const std::uint32_t front_seq = pending_.front().seq;
        if (front_seq == next_seq_) {
            out.push_back(std::move(pending_.front()));
            pending_.erase(pending_.begin());
            next_seq_ += 1;
        } else if (flush || pending_.size() > window_) {
            for (std::uint32_t s = next_seq_; s < front_seq; ++s) {
                report_.missing.push_back(s);
            }
            out.push_back(std::move(pending_.front()));
            pending_.erase(pending_.begin());
            next_seq_ = front_seq + 1;
        } else {
            break;
        }
    }
    return out;
}

IngestResult ingest_datagrams(std::span<const std::string> datagrams, std::size_t window) {
    IngestResult result;
    FrameReorderer reorderer(window);
    for (const auto& d : datagrams) {
        DecodeResult decoded = decode_frame(d);
        if (!decoded.ok()) {
            result.parse_errors += 1;
            continue;
        }
        for (auto& f : reorderer.push(std::move(*decoded.frame))) {
            result.frames.push_back(std::move(f));
        }
    }
    for (auto& f : reorderer.finish()) {
        result.frames.push_back(std::move(f));
    }
    result.gaps = reorderer.report();
    return result;
}

UdpSender::UdpSender(const std::string& host, int port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "socket");
    const sockaddr_in addr = make_addr(host, port);
    if (::connect(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        throw std::system_error(err, std::generic_category(), "connect");
    }
}

UdpSender::~UdpSender() {
    if (fd_ >= 0) ::close(fd_);
}

void UdpSender::send(std::string_view datagram) {
    // fire and forget: loss is legal and surfaces only in the gap report
    (void)::send(fd_, datagram.data(), datagram.size(), 0);
}

UdpReceiver::UdpReceiver(const std::string& host, int port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "socket");
    const int rcvbuf = 4 * 1024 * 1024;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof(rcvbuf));
    sockaddr_in addr = make_addr(host, port);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        throw std::system_error(err, std::generic_category(), "bind");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

UdpReceiver::~UdpReceiver() {
    if (fd_ >= 0) ::close(fd_);
}

std::optional<std::string> UdpReceiver::recv(int timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready <= 0) return std::nullopt;
    char buf[65536];
    const ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
    if (n < 0) return std::nullopt;
    return std::string(buf, static_cast<std::size_t>(n));
}

std::uint64_t nominal_t_ms(std::uint32_t seq, double rate_hz) {
    return static_cast<std::uint64_t>(std::llround(seq * 1000.0 / rate_hz));
}

std::uint32_t emit_stream(
    const std::function<std::optional<TelemetryFrame>(std::uint32_t)>& source,
    const EmitOptions& options) {
    if (options.rate_hz < kMinRateHz || options.rate_hz > kMaxRateHz) {
        throw std::invalid_argument(
            strf("rate %.1f Hz outside the interrogator's 1-100 Hz range", options.rate_hz));
    }
    UdpSender sender(options.host, options.port);
    std::uint32_t seq = 0;
    while (true) {
        std::optional<TelemetryFrame> frame = source(seq);
        if (!frame) break;
        frame->seq = seq;
        frame->t_ms = nominal_t_ms(seq, options.rate_hz);
        sender.send(encode_frame(*frame));
        ++seq;
        if (options.pace_us > 0) {
            std::this_thread::sleep_for(std::chrono::microseconds(options.pace_us));
        }
    }
    return seq;
}

IngestResult ingest_stream(const IngestOptions& options) {
    UdpReceiver receiver(options.host, options.port);
    IngestResult result;
    FrameReorderer reorderer(options.window);
    while (options.max_frames == 0 || result.frames.size() < options.max_frames) {
        std::optional<std::string> datagram = receiver.recv(options.idle_timeout_ms);
        if (!datagram) break;  // idle: stream considered finished
        DecodeResult decoded = decode_frame(*datagram);
        if (!decoded.ok()) {
            result.parse_errors += 1;
            continue;
        }
        for (auto& f : reorderer.push(std::move(*decoded.frame))) {
            result.frames.push_back(std::move(f));
        }
    }
    for (auto& f : reorderer.finish()) {
        result.frames.push_back(std::move(f));
    }
    result.gaps = reorderer.report();
    return result;
}

}  // namespace fbgsole
