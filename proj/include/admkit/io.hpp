#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "admkit/abc.hpp"
#include "admkit/hier.hpp"
#include "admkit/reliability.hpp"
#include "admkit/simulate.hpp"
#include "admkit/types.hpp"

namespace admkit {

// %.17g with inf/-inf/nan spelled out; round-trips exactly.
std::string format_double(double v);

// Flat `key = value` configuration with '#' comments.  Every key must be read
// by the command that runs; ensure_consumed reports leftovers, which catches
// both typos and settings that the chosen command ignores.
class RunConfig {
 public:
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_string(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key);
  double get_double(const std::string& key);
  long get_long(const std::string& key);
  std::uint64_t get_uint64(const std::string& key);
  bool get_bool(const std::string& key);
  std::vector<double> get_double_list(const std::string& key);
  std::vector<std::string> get_string_list(const std::string& key);

  std::string get_string_or(const std::string& key, const std::string& fallback);
  double get_double_or(const std::string& key, double fallback);
  long get_long_or(const std::string& key, long fallback);
  bool get_bool_or(const std::string& key, bool fallback);

  // Keys beginning with `prefix`, in sorted order; does not mark them read.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  // Inserts or replaces a value (command-line overrides).
  void set(const std::string& key, const std::string& value);

  void ensure_consumed() const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_;

  Entry& require(const std::string& key);
};

// One row per board: `board_id,time_hours,censored`, censored rows carrying
// the censoring time.  A sidecar JSON next to the CSV (same base name,
// .json) records k, tau_c, censor_hours and n_boards.
void write_dataset(const std::string& csv_path, const std::vector<BoardOutcome>& boards,
                   const TestConfig& config);
CensoredSample read_dataset(const std::string& csv_path);

std::string sidecar_path(const std::string& csv_path);

// Chain file: one JSON object per line.  The first line holds run metadata
// (config echo, seed, bandwidth, standardization scales, realized acceptance
// rate); each following line is a retained draw.
void write_chain(const std::string& path, const ChainResult& result, const ChainConfig& config,
                 const std::vector<std::string>& dataset_paths, bool delta_calibrated,
                 bool calibration_warning);

struct LoadedChain {
  std::vector<std::pair<long, HyperParams>> draws;  // iteration index, parameters
};
LoadedChain read_chain(const std::string& path);

// `phi,p_f,beta,beta_lo,beta_hi,mode` for both curves on a shared grid.
void write_curve_csv(const std::string& path, const std::vector<ReliabilityPoint>& damage_curve,
                     const std::vector<ReliabilityPoint>& overload_curve);

// `beta_target,phi1,phi2,kd,kd_lo,kd_hi`; phi1 is the overload-only value.
void write_kd_csv(const std::string& path, const std::vector<KdResult>& rows);

// `t_hours,tau_psi` sampled at the profile breakpoints plus the horizon.
void write_load_path_csv(const std::string& path, const PiecewiseProfile& profile,
                         double horizon_hours);

// `draw,rep,time_hours` with inf for surviving replicates.
void write_failure_times_csv(const std::string& path, const TimeToFailureSamples& samples);

}  // namespace admkit
