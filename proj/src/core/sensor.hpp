#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "core/fusion.hpp"
#include "core/network.hpp"

namespace score::sensor {

// One decoded report line:
//   <callsign>>SCORE:!<DDMM.mmN|S>/<DDDMM.mmE|W>#IRR=<decimal>,T=<decimal>
struct SensorPacket {
  std::string callsign;  // 3-9 uppercase alphanumerics, optional -SSID suffix
  double lat = 0.0;
  double lon = 0.0;
  double irr = 0.0;     // normalized irradiance [0, 1]
  double t_meas = 0.0;  // hours since the start of the year
};

enum class PacketErrorKind {
  MalformedHeader,
  BadCoordinate,
  OutOfRange,
  MissingField,
};
inline constexpr std::size_t kPacketErrorKindCount = 4;

// Wire/report token for a kind ("malformed-header", ...).
std::string_view packet_error_token(PacketErrorKind kind);

struct PacketError {
  PacketErrorKind kind = PacketErrorKind::MalformedHeader;
  std::size_t offset = 0;  // byte offset into the line
  std::string message;
};

using PacketResult = std::variant<SensorPacket, PacketError>;

bool valid_callsign(std::string_view callsign);

PacketResult parse_sensor_packet(std::string_view line);

// Inverse of parse_sensor_packet; coordinates are rounded to the grammar's
// 1/100 arc-minute resolution. Throws Error(InvalidArgument) on fields the
// grammar cannot carry.
std::string format_sensor_packet(const SensorPacket& packet);

struct IngestReport {
  std::uint64_t accepted = 0;
  std::uint64_t superseded = 0;
  std::uint64_t rejected = 0;
  std::uint64_t rejected_by_kind[kPacketErrorKindCount] = {0, 0, 0, 0};

  void add(const IngestReport& other);
};

struct IngestLineResult {
  enum class Status { Accepted, Superseded, Rejected };
  Status status = Status::Rejected;
  std::optional<PacketError> error;  // set when rejected
  net::NodeId node_id = 0;           // set when stored
};

// Parse one line, map its position to the nearest network node and store
// the observation. Never throws on malformed input.
IngestLineResult ingest_line(std::string_view line, const net::RoadNetwork& network,
                             fusion::FusionStore& store);

// Line-by-line ingest of a whole stream; malformed lines are counted and
// skipped. Blank lines are ignored.
IngestReport ingest_stream(std::istream& in, const net::RoadNetwork& network,
                           fusion::FusionStore& store);

}  // namespace score::sensor
