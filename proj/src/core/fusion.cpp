#include "core/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>

#include "core/error.hpp"
#include "core/util.hpp"

namespace score::fusion {

double temporal_weight(double t_curr, double t_meas, double decay_denominator) {
  if (!(decay_denominator > 0.0))
    throw Error(ErrorKind::InvalidArgument, "decay denominator must be positive");
  if (!(t_meas >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "measurement time must be non-negative");
  if (t_meas > t_curr)
    throw Error(ErrorKind::InvalidArgument, "measurement time lies in the future");
  const double dt = t_curr - t_meas;
  return std::exp(-(dt * dt) / decay_denominator);
}

double fuse(double r_on, double r_off, double t_curr, double t_meas,
            double decay_denominator) {
  if (!(r_on >= 0.0 && r_on <= 1.0))
    throw Error(ErrorKind::OutOfRange, "online irradiance outside [0, 1]");
  if (!(r_off >= 0.0 && r_off <= 1.0))
    throw Error(ErrorKind::OutOfRange, "offline irradiance outside [0, 1]");
  const double a = temporal_weight(t_curr, t_meas, decay_denominator);
  const double r = r_on * a + r_off * (1.0 - a);
  return std::clamp(r, std::min(r_on, r_off), std::max(r_on, r_off));
}

void OfflineTable::add(net::NodeId node_id, double hour, double r_off) {
  if (node_id == 0) throw Error(ErrorKind::InvalidArgument, "node id must be positive");
  if (!(hour >= 0.0 && hour < kHoursPerDay))
    throw Error(ErrorKind::OutOfRange, "hour of day outside [0, 24)");
  if (!(r_off >= 0.0 && r_off <= 1.0))
    throw Error(ErrorKind::OutOfRange, "offline irradiance outside [0, 1]");
  auto& bps = table_[node_id];
  auto it = std::lower_bound(bps.begin(), bps.end(), hour,
                             [](const Breakpoint& b, double h) { return b.hour < h; });
  if (it != bps.end() && it->hour == hour)
    throw Error(ErrorKind::Validation, "duplicate offline breakpoint for node " +
                                           std::to_string(node_id) + " at hour " +
                                           util::format_decimal(hour));
  bps.insert(it, Breakpoint{hour, r_off});
}

std::vector<net::NodeId> OfflineTable::node_ids() const {
  std::vector<net::NodeId> ids;
  ids.reserve(table_.size());
  for (const auto& [id, _] : table_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

const std::vector<Breakpoint>& OfflineTable::breakpoints(net::NodeId node_id) const {
  auto it = table_.find(node_id);
  if (it == table_.end())
    throw Error(ErrorKind::UnknownNode,
                "node " + std::to_string(node_id) + " has no offline irradiance data");
  return it->second;
}

double OfflineTable::value_at(net::NodeId node_id, double t_hours) const {
  const auto& bps = breakpoints(node_id);
  double h = std::fmod(t_hours, kHoursPerDay);
  if (h < 0.0) h += kHoursPerDay;
  if (bps.size() == 1) return bps.front().r_off;

  auto up = std::upper_bound(bps.begin(), bps.end(), h,
                             [](double v, const Breakpoint& b) { return v < b.hour; });
  if (up == bps.begin() || up == bps.end()) {
    // between the last breakpoint and the first one of the next day
    const Breakpoint& lo = bps.back();
    const Breakpoint& hi = bps.front();
    const double span = hi.hour + kHoursPerDay - lo.hour;
    const double pos = h >= lo.hour ? h - lo.hour : h + kHoursPerDay - lo.hour;
    return std::lerp(lo.r_off, hi.r_off, pos / span);
  }
  const Breakpoint& hi = *up;
  const Breakpoint& lo = *std::prev(up);
  if (h == lo.hour) return lo.r_off;  // exact at breakpoints
  return std::lerp(lo.r_off, hi.r_off, (h - lo.hour) / (hi.hour - lo.hour));
}

void parse_offline_record(OfflineTable& table, const std::vector<std::string_view>& fields,
                          const net::ParseContext& ctx) {
  if (fields.size() != 4)
    throw Error(ErrorKind::Parse,
                ctx.where() + ": offline record needs 'O <node_id> <hour_of_day> <r_off>'");
  auto id = util::parse_u32(fields[1]);
  auto hour = util::parse_double(fields[2]);
  auto r = util::parse_double(fields[3]);
  if (!id || *id == 0 || !hour || !r)
    throw Error(ErrorKind::Parse, ctx.where() + ": bad offline record field");
  try {
    table.add(*id, *hour, *r);
  } catch (const Error& e) {
    throw Error(e.kind(), ctx.where() + ": " + e.what());
  }
}

OfflineTable parse_offline_table(std::istream& in, const std::string& origin) {
  OfflineTable table;
  std::string line;
  net::ParseContext ctx{origin, 0};
  while (std::getline(in, line)) {
    ++ctx.line_no;
    std::string_view text = util::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = util::split_ws(text);
    if (fields[0] != "O")
      throw Error(ErrorKind::Parse, ctx.where() + ": expected 'O' record in offline table");
    parse_offline_record(table, fields, ctx);
  }
  return table;
}

OfflineTable load_offline_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open offline table: " + path.string());
  return parse_offline_table(in, path.filename().string());
}

IrradianceObservation parse_observation_record(const std::vector<std::string_view>& fields,
                                               const net::ParseContext& ctx) {
  if (fields.size() != 5)
    throw Error(ErrorKind::Parse,
                ctx.where() + ": observation record needs 'B <node_id> <r_on> <t_meas> <source>'");
  auto id = util::parse_u32(fields[1]);
  auto r = util::parse_double(fields[2]);
  auto t = util::parse_double(fields[3]);
  if (!id || *id == 0 || !r || !t)
    throw Error(ErrorKind::Parse, ctx.where() + ": bad observation record field");
  return IrradianceObservation{*id, *r, *t, std::string(fields[4])};
}

std::vector<IrradianceObservation> load_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open observation file: " + path.string());
  std::vector<IrradianceObservation> out;
  std::string line;
  net::ParseContext ctx{path.filename().string(), 0};
  while (std::getline(in, line)) {
    ++ctx.line_no;
    std::string_view text = util::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = util::split_ws(text);
    if (fields[0] != "B")
      throw Error(ErrorKind::Parse, ctx.where() + ": expected 'B' record in observation file");
    out.push_back(parse_observation_record(fields, ctx));
  }
  return out;
}

double FusionView::node_irradiance(net::NodeId node_id, double t_curr) const {
  const double r_off = offline_->value_at(node_id, t_curr);
  double r = r_off;
  auto it = latest_.find(node_id);
  if (it != latest_.end())
    r = fuse(it->second.r_on, r_off, t_curr, it->second.t_meas, decay_denominator_);
  return std::clamp(r * factor_, 0.0, 1.0);
}

double FusionView::edge_irradiance(const net::Edge& edge, double t_curr) const {
  return (node_irradiance(edge.from_id, t_curr) + node_irradiance(edge.to_id, t_curr)) / 2.0;
}

FusionStore::FusionStore(OfflineTable offline, double decay_denominator)
    : offline_(std::make_shared<OfflineTable>(std::move(offline))),
      decay_denominator_(decay_denominator) {
  if (!(decay_denominator > 0.0))
    throw Error(ErrorKind::InvalidArgument, "decay denominator must be positive");
}

void FusionStore::set_offline(OfflineTable offline) {
  auto fresh = std::make_shared<OfflineTable>(std::move(offline));
  std::unique_lock lock(mutex_);
  offline_ = std::move(fresh);
}

void FusionStore::set_decay_denominator(double denominator) {
  if (!(denominator > 0.0))
    throw Error(ErrorKind::InvalidArgument, "decay denominator must be positive");
  std::unique_lock lock(mutex_);
  decay_denominator_ = denominator;
}

double FusionStore::decay_denominator() const {
  std::shared_lock lock(mutex_);
  return decay_denominator_;
}

IngestOutcome FusionStore::ingest(const IrradianceObservation& obs) {
  if (obs.node_id == 0) throw Error(ErrorKind::OutOfRange, "node id must be positive");
  if (!(obs.r_on >= 0.0 && obs.r_on <= 1.0))
    throw Error(ErrorKind::OutOfRange, "observation irradiance outside [0, 1]");
  if (!(obs.t_meas >= 0.0) || !std::isfinite(obs.t_meas))
    throw Error(ErrorKind::OutOfRange, "observation time must be non-negative and finite");
  std::unique_lock lock(mutex_);
  auto [it, inserted] = latest_.try_emplace(obs.node_id, obs);
  if (inserted) return IngestOutcome::Accepted;
  if (obs.t_meas >= it->second.t_meas) {
    it->second = obs;
    return IngestOutcome::Accepted;
  }
  return IngestOutcome::Superseded;
}

CalibrationResult FusionStore::calibrate(double r_predicted, double r_measured) {
  if (!(r_predicted >= 0.0 && r_predicted <= 1.0))
    throw Error(ErrorKind::OutOfRange, "predicted irradiance outside [0, 1]");
  if (!(r_measured >= 0.0 && r_measured <= 1.0))
    throw Error(ErrorKind::OutOfRange, "measured irradiance outside [0, 1]");
  std::unique_lock lock(mutex_);
  if (r_predicted == 0.0) return CalibrationResult{false, factor_};
  factor_ = std::clamp(r_measured / r_predicted, kMinCalibrationFactor, kMaxCalibrationFactor);
  return CalibrationResult{true, factor_};
}

double FusionStore::calibration_factor() const {
  std::shared_lock lock(mutex_);
  return factor_;
}

FusionView FusionStore::view() const {
  std::shared_lock lock(mutex_);
  FusionView v;
  v.offline_ = offline_;
  v.latest_ = latest_;
  v.factor_ = factor_;
  v.decay_denominator_ = decay_denominator_;
  return v;
}

void write_observations(const FusionView& view, std::ostream& out) {
  std::vector<const IrradianceObservation*> obs;
  obs.reserve(view.observations().size());
  for (const auto& [_, o] : view.observations()) obs.push_back(&o);
  std::sort(obs.begin(), obs.end(),
            [](const auto* a, const auto* b) { return a->node_id < b->node_id; });
  for (const auto* o : obs) {
    out << "B " << o->node_id << ' ' << util::format_decimal(o->r_on) << ' '
        << util::format_decimal(o->t_meas) << ' '
        << (o->source.empty() ? "-" : o->source) << '\n';
  }
}

}  // namespace score::fusion
