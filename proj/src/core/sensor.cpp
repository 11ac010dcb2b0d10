#include "core/sensor.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>

#include "core/error.hpp"
#include "core/util.hpp"

namespace score::sensor {

namespace {

constexpr std::string_view kHeaderTag = ">SCORE:!";
constexpr std::string_view kIrrTag = "#IRR=";
constexpr std::string_view kTimeTag = ",T=";

bool is_call_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

PacketError fail(PacketErrorKind kind, std::size_t offset, std::string message) {
  return PacketError{kind, offset, std::move(message)};
}

// digits ['.' digits]; no sign, no exponent. Returns value and end position.
std::optional<std::pair<double, std::size_t>> scan_decimal(std::string_view line,
                                                           std::size_t pos) {
  std::size_t p = pos;
  while (p < line.size() && is_digit(line[p])) ++p;
  if (p == pos) return std::nullopt;
  if (p < line.size() && line[p] == '.') {
    ++p;
    const std::size_t frac = p;
    while (p < line.size() && is_digit(line[p])) ++p;
    if (p == frac) return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + p, value);
  if (ec == std::errc::result_out_of_range)
    value = std::numeric_limits<double>::infinity();
  else if (ec != std::errc() || ptr != line.data() + p)
    return std::nullopt;
  return std::make_pair(value, p);
}

struct CoordSpec {
  int degree_digits;  // 2 for latitude, 3 for longitude
  char positive_hemisphere;
  char negative_hemisphere;
  double max_degrees;
};

std::variant<std::pair<double, std::size_t>, PacketError> scan_coordinate(
    std::string_view line, std::size_t pos, const CoordSpec& spec) {
  const std::size_t start = pos;
  const std::size_t digits = std::size_t(spec.degree_digits) + 2;
  for (std::size_t i = 0; i < digits; ++i, ++pos) {
    if (pos >= line.size() || !is_digit(line[pos]))
      return fail(PacketErrorKind::BadCoordinate, pos, "expected coordinate digit");
  }
  if (pos >= line.size() || line[pos] != '.')
    return fail(PacketErrorKind::BadCoordinate, pos, "expected '.' in coordinate");
  ++pos;
  for (std::size_t i = 0; i < 2; ++i, ++pos) {
    if (pos >= line.size() || !is_digit(line[pos]))
      return fail(PacketErrorKind::BadCoordinate, pos, "expected coordinate fraction digit");
  }
  if (pos >= line.size())
    return fail(PacketErrorKind::BadCoordinate, pos, "missing hemisphere letter");
  const char hemi = line[pos];
  if (hemi != spec.positive_hemisphere && hemi != spec.negative_hemisphere)
    return fail(PacketErrorKind::BadCoordinate, pos, "bad hemisphere letter");

  int deg = 0;
  for (int i = 0; i < spec.degree_digits; ++i)
    deg = deg * 10 + (line[start + std::size_t(i)] - '0');
  const std::size_t min_off = start + std::size_t(spec.degree_digits);
  const int min_int = (line[min_off] - '0') * 10 + (line[min_off + 1] - '0');
  const int min_cent = (line[min_off + 3] - '0') * 10 + (line[min_off + 4] - '0');
  const double minutes = min_int + min_cent / 100.0;
  if (minutes >= 60.0)
    return fail(PacketErrorKind::BadCoordinate, min_off, "minutes must be below 60");
  double value = deg + minutes / 60.0;
  if (value > spec.max_degrees)
    return fail(PacketErrorKind::BadCoordinate, start, "coordinate out of range");
  if (hemi == spec.negative_hemisphere) value = -value;
  return std::make_pair(value, pos + 1);
}

}  // namespace

std::string_view packet_error_token(PacketErrorKind kind) {
  switch (kind) {
    case PacketErrorKind::MalformedHeader: return "malformed-header";
    case PacketErrorKind::BadCoordinate: return "bad-coordinate";
    case PacketErrorKind::OutOfRange: return "out-of-range";
    case PacketErrorKind::MissingField: return "missing-field";
  }
  return "unknown";
}

bool valid_callsign(std::string_view callsign) {
  if (callsign.size() < 3 || callsign.size() > 9) return false;
  const std::size_t dash = callsign.find('-');
  if (dash == std::string_view::npos) {
    for (char c : callsign)
      if (!is_call_char(c)) return false;
    return true;
  }
  if (dash == 0) return false;
  const std::string_view base = callsign.substr(0, dash);
  const std::string_view ssid = callsign.substr(dash + 1);
  if (ssid.empty() || ssid.size() > 2) return false;
  for (char c : base)
    if (!is_call_char(c)) return false;
  for (char c : ssid)
    if (!is_call_char(c)) return false;
  return true;
}

PacketResult parse_sensor_packet(std::string_view line) {
  using K = PacketErrorKind;
  std::size_t pos = 0;
  while (pos < line.size() && is_call_char(line[pos])) ++pos;
  if (pos == 0) return fail(K::MalformedHeader, 0, "expected callsign");
  if (pos < line.size() && line[pos] == '-') {
    ++pos;
    const std::size_t ssid = pos;
    while (pos < line.size() && is_call_char(line[pos])) ++pos;
    if (pos == ssid || pos - ssid > 2)
      return fail(K::MalformedHeader, ssid, "bad SSID suffix");
  }
  if (pos < 3 || pos > 9)
    return fail(K::MalformedHeader, 0, "callsign must be 3-9 characters");
  SensorPacket packet;
  packet.callsign = std::string(line.substr(0, pos));

  if (line.substr(pos, kHeaderTag.size()) != kHeaderTag)
    return fail(K::MalformedHeader, pos, "expected '>SCORE:!'");
  pos += kHeaderTag.size();

  auto lat = scan_coordinate(line, pos, CoordSpec{2, 'N', 'S', 90.0});
  if (auto* err = std::get_if<PacketError>(&lat)) return *err;
  packet.lat = std::get<0>(lat).first;
  pos = std::get<0>(lat).second;

  if (pos >= line.size() || line[pos] != '/')
    return fail(K::BadCoordinate, pos, "expected '/' between coordinates");
  ++pos;

  auto lon = scan_coordinate(line, pos, CoordSpec{3, 'E', 'W', 180.0});
  if (auto* err = std::get_if<PacketError>(&lon)) return *err;
  packet.lon = std::get<0>(lon).first;
  pos = std::get<0>(lon).second;

  if (line.substr(pos, kIrrTag.size()) != kIrrTag)
    return fail(K::MissingField, pos, "expected '#IRR='");
  pos += kIrrTag.size();
  const std::size_t irr_off = pos;
  auto irr = scan_decimal(line, pos);
  if (!irr) return fail(K::MissingField, pos, "expected decimal IRR value");
  if (!(irr->first <= 1.0))
    return fail(K::OutOfRange, irr_off, "IRR above 1");
  packet.irr = irr->first;
  pos = irr->second;

  if (line.substr(pos, kTimeTag.size()) != kTimeTag)
    return fail(K::MissingField, pos, "expected ',T='");
  pos += kTimeTag.size();
  auto t = scan_decimal(line, pos);
  if (!t) return fail(K::MissingField, pos, "expected decimal T value");
  if (!std::isfinite(t->first))
    return fail(K::OutOfRange, pos, "T value too large");
  packet.t_meas = t->first;
  pos = t->second;

  if (pos != line.size())
    return fail(K::MissingField, pos, "unexpected trailing characters");
  return packet;
}

namespace {

std::string format_coordinate(double value, int degree_digits, char positive_hemisphere,
                              char negative_hemisphere) {
  const char hemi = value < 0.0 ? negative_hemisphere : positive_hemisphere;
  const double a = std::fabs(value);
  int deg = static_cast<int>(a);
  long cents = std::llround((a - deg) * 6000.0);  // hundredths of an arc-minute
  if (cents >= 6000) {
    cents -= 6000;
    ++deg;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%0*d%02d.%02d%c", degree_digits, deg,
                int(cents / 100), int(cents % 100), hemi);
  return buf;
}

}  // namespace

std::string format_sensor_packet(const SensorPacket& packet) {
  if (!valid_callsign(packet.callsign))
    throw Error(ErrorKind::InvalidArgument, "callsign does not match the packet grammar");
  if (packet.lat < -90.0 || packet.lat > 90.0)
    throw Error(ErrorKind::InvalidArgument, "latitude out of range");
  if (packet.lon < -180.0 || packet.lon > 180.0)
    throw Error(ErrorKind::InvalidArgument, "longitude out of range");
  if (!(packet.irr >= 0.0 && packet.irr <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "irradiance outside [0, 1]");
  if (!(packet.t_meas >= 0.0) || !std::isfinite(packet.t_meas))
    throw Error(ErrorKind::InvalidArgument, "measurement time must be non-negative");
  std::string out = packet.callsign;
  out += kHeaderTag;
  out += format_coordinate(packet.lat, 2, 'N', 'S');
  out += '/';
  out += format_coordinate(packet.lon, 3, 'E', 'W');
  out += kIrrTag;
  out += util::format_decimal(packet.irr);
  out += kTimeTag;
  out += util::format_decimal(packet.t_meas);
  return out;
}

void IngestReport::add(const IngestReport& other) {
  accepted += other.accepted;
  superseded += other.superseded;
  rejected += other.rejected;
  for (std::size_t i = 0; i < kPacketErrorKindCount; ++i)
    rejected_by_kind[i] += other.rejected_by_kind[i];
}

IngestLineResult ingest_line(std::string_view line, const net::RoadNetwork& network,
                             fusion::FusionStore& store) {
  IngestLineResult result;
  PacketResult parsed = parse_sensor_packet(util::strip_cr(line));
  if (auto* err = std::get_if<PacketError>(&parsed)) {
    result.status = IngestLineResult::Status::Rejected;
    result.error = *err;
    return result;
  }
  const SensorPacket& packet = std::get<SensorPacket>(parsed);
  fusion::IrradianceObservation obs;
  obs.node_id = net::nearest_node(network, packet.lat, packet.lon);
  obs.r_on = packet.irr;
  obs.t_meas = packet.t_meas;
  obs.source = packet.callsign;
  result.node_id = obs.node_id;
  result.status = store.ingest(obs) == fusion::IngestOutcome::Accepted
                      ? IngestLineResult::Status::Accepted
                      : IngestLineResult::Status::Superseded;
  return result;
}

IngestReport ingest_stream(std::istream& in, const net::RoadNetwork& network,
                           fusion::FusionStore& store) {
  IngestReport report;
  std::string line;
  while (std::getline(in, line)) {
    if (util::trim(line).empty()) continue;
    const IngestLineResult result = ingest_line(line, network, store);
    switch (result.status) {
      case IngestLineResult::Status::Accepted: ++report.accepted; break;
      case IngestLineResult::Status::Superseded: ++report.superseded; break;
      case IngestLineResult::Status::Rejected:
        ++report.rejected;
        ++report.rejected_by_kind[std::size_t(result.error->kind)];
        break;
    }
  }
  return report;
}

}  // namespace score::sensor
