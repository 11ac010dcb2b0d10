#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/network.hpp"

namespace score::fusion {

inline constexpr double kDefaultDecayDenominator = 100000.0;
inline constexpr double kHoursPerDay = 24.0;
inline constexpr double kMinCalibrationFactor = 0.5;
inline constexpr double kMaxCalibrationFactor = 2.0;

// Trust factor for a reading aged (t_curr - t_meas) hours, Gaussian decay
// exp(-dt^2 / decay_denominator): 1 at dt = 0, falling toward 0 as the
// reading ages. Times are hours since the start of the year.
double temporal_weight(double t_curr, double t_meas,
                       double decay_denominator = kDefaultDecayDenominator);

// r_on * a + r_off * (1 - a) with a = temporal_weight(t_curr, t_meas).
// Result is clamped to the envelope [min(r_on, r_off), max(r_on, r_off)]
// so rounding can never push it outside the inputs.
double fuse(double r_on, double r_off, double t_curr, double t_meas,
            double decay_denominator = kDefaultDecayDenominator);

struct IrradianceObservation {
  net::NodeId node_id = 0;
  double r_on = 0.0;    // normalized irradiance [0, 1]
  double t_meas = 0.0;  // hours since the start of the year
  std::string source;   // sensor callsign
};

struct Breakpoint {
  double hour = 0.0;   // hour of day [0, 24)
  double r_off = 0.0;  // predicted irradiance [0, 1]
};

// Predicted irradiance per node, keyed by hour of day. Piecewise-linear
// between breakpoints, wrapping across midnight.
class OfflineTable {
 public:
  void add(net::NodeId node_id, double hour, double r_off);
  bool has_node(net::NodeId node_id) const { return table_.count(node_id) != 0; }
  bool empty() const { return table_.empty(); }
  std::vector<net::NodeId> node_ids() const;  // sorted
  const std::vector<Breakpoint>& breakpoints(net::NodeId node_id) const;

  // Interpolated prediction at hour-of-day fmod(t_hours, 24).
  double value_at(net::NodeId node_id, double t_hours) const;

 private:
  std::unordered_map<net::NodeId, std::vector<Breakpoint>> table_;
};

OfflineTable load_offline_table(const std::filesystem::path& path);
OfflineTable parse_offline_table(std::istream& in, const std::string& origin);

// 'O <node_id> <hour_of_day> <r_off>'
void parse_offline_record(OfflineTable& table, const std::vector<std::string_view>& fields,
                          const net::ParseContext& ctx);
// 'B <node_id> <r_on> <t_meas> <source>'
IrradianceObservation parse_observation_record(const std::vector<std::string_view>& fields,
                                               const net::ParseContext& ctx);
std::vector<IrradianceObservation> load_observations(const std::filesystem::path& path);

enum class IngestOutcome { Accepted, Superseded };

struct CalibrationResult {
  bool applied = false;
  double factor = 1.0;
};

// Immutable snapshot of a FusionStore; all queries run against one of these
// so a route or parking evaluation never sees a half-applied ingest.
class FusionView {
 public:
  FusionView() : offline_(std::make_shared<OfflineTable>()) {}

  // Calibrated fused irradiance for a node, clamped to [0, 1]. Falls back
  // to the offline prediction when no observation is stored.
  double node_irradiance(net::NodeId node_id, double t_curr) const;

  // Arithmetic mean of the endpoint node values.
  double edge_irradiance(const net::Edge& edge, double t_curr) const;

  const OfflineTable& offline() const { return *offline_; }
  const std::unordered_map<net::NodeId, IrradianceObservation>& observations() const {
    return latest_;
  }
  double calibration_factor() const { return factor_; }
  double decay_denominator() const { return decay_denominator_; }

 private:
  friend class FusionStore;
  std::shared_ptr<const OfflineTable> offline_;
  std::unordered_map<net::NodeId, IrradianceObservation> latest_;
  double factor_ = 1.0;
  double decay_denominator_ = kDefaultDecayDenominator;
};

// Latest observation per node plus the offline table and a global
// calibration factor. Many concurrent readers, serialized writers; readers
// take snapshots, so a query sees either the pre- or post-state of any
// single ingest.
class FusionStore {
 public:
  FusionStore() : offline_(std::make_shared<OfflineTable>()) {}
  explicit FusionStore(OfflineTable offline,
                       double decay_denominator = kDefaultDecayDenominator);

  void set_offline(OfflineTable offline);
  void set_decay_denominator(double denominator);
  double decay_denominator() const;

  // Stores the observation iff it is at least as recent as the one already
  // held for its node (ties replace). Throws Error(OutOfRange) on invalid
  // r_on or t_meas.
  IngestOutcome ingest(const IrradianceObservation& obs);

  // factor <- clamp(measured / predicted, 0.5, 2.0); a zero prediction is
  // reported as a no-op instead of an error.
  CalibrationResult calibrate(double r_predicted, double r_measured);
  double calibration_factor() const;

  FusionView view() const;

 private:
  mutable std::shared_mutex mutex_;
  std::shared_ptr<const OfflineTable> offline_;
  std::unordered_map<net::NodeId, IrradianceObservation> latest_;
  double factor_ = 1.0;
  double decay_denominator_ = kDefaultDecayDenominator;
};

// Observation dump, 'B' records sorted by node id.
void write_observations(const FusionView& view, std::ostream& out);

}  // namespace score::fusion
