#include "admkit/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace admkit {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, const std::string& what) {
  std::string v = trim(value);
  if (v == "inf" || v == "+inf") return kInf;
  if (v == "-inf") return -kInf;
  // strtod, not stod: stod reports subnormal results as out of range.
  if (!v.empty()) {
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    double d = std::strtod(begin, &end);
    bool overflow = errno == ERANGE && (d == HUGE_VAL || d == -HUGE_VAL);
    if (end == begin + v.size() && !overflow) return d;
  }
  throw ConfigError(what + ": cannot parse '" + value + "' as a number");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    std::string t = trim(item);
    if (!t.empty()) parts.push_back(t);
  }
  return parts;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

RunConfig RunConfig::parse_string(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.origin_ = origin;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = {value, line_no, false};
  }
  return cfg;
}

bool RunConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

RunConfig::Entry& RunConfig::require(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
  }
  it->second.consumed = true;
  return it->second;
}

std::string RunConfig::get_string(const std::string& key) { return require(key).value; }

double RunConfig::get_double(const std::string& key) {
  return parse_double(require(key).value, origin_ + ": key '" + key + "'");
}

long RunConfig::get_long(const std::string& key) {
  const std::string& v = require(key).value;
  try {
    std::size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

std::uint64_t RunConfig::get_uint64(const std::string& key) {
  const std::string& v = require(key).value;
  try {
    // stoull wraps negative input instead of rejecting it.
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    std::size_t pos = 0;
    unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "': cannot parse '" + v +
                      "' as an unsigned integer");
  }
}

bool RunConfig::get_bool(const std::string& key) {
  const std::string& v = require(key).value;
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(origin_ + ": key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> RunConfig::get_double_list(const std::string& key) {
  std::vector<double> out;
  for (const std::string& part : split_list(require(key).value)) {
    out.push_back(parse_double(part, origin_ + ": key '" + key + "'"));
  }
  if (out.empty()) throw ConfigError(origin_ + ": key '" + key + "': empty list");
  return out;
}

std::vector<std::string> RunConfig::get_string_list(const std::string& key) {
  std::vector<std::string> out = split_list(require(key).value);
  if (out.empty()) throw ConfigError(origin_ + ": key '" + key + "': empty list");
  return out;
}

std::string RunConfig::get_string_or(const std::string& key, const std::string& fallback) {
  return has(key) ? get_string(key) : fallback;
}
double RunConfig::get_double_or(const std::string& key, double fallback) {
  return has(key) ? get_double(key) : fallback;
}
long RunConfig::get_long_or(const std::string& key, long fallback) {
  return has(key) ? get_long(key) : fallback;
}
bool RunConfig::get_bool_or(const std::string& key, bool fallback) {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> RunConfig::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> keys;
  for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    keys.push_back(it->first);
  }
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = {value, 0, false};
}

void RunConfig::ensure_consumed() const {
  std::string leftovers;
  for (const auto& [key, entry] : entries_) {
    if (!entry.consumed) {
      if (!leftovers.empty()) leftovers += ", ";
      leftovers += "'" + key + "'";
    }
  }
  if (!leftovers.empty()) {
    throw ConfigError(origin_ + ": unknown or unused keys: " + leftovers);
  }
}

std::string sidecar_path(const std::string& csv_path) {
  std::size_t dot = csv_path.find_last_of('.');
  std::size_t slash = csv_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return csv_path + ".json";
  }
  return csv_path.substr(0, dot) + ".json";
}

void write_dataset(const std::string& csv_path, const std::vector<BoardOutcome>& boards,
                   const TestConfig& config) {
  config.validate();
  if (static_cast<long>(boards.size()) != config.n_boards) {
    throw DomainError("write_dataset: board count does not match config");
  }
  std::ofstream out = open_output(csv_path);
  out << "board_id,time_hours,censored\n";
  for (std::size_t i = 0; i < boards.size(); ++i) {
    bool censored = !(boards[i].time < config.censor_hours);
    double t = censored ? config.censor_hours : boards[i].time;
    out << i << "," << format_double(t) << "," << (censored ? 1 : 0) << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + csv_path + "'");

  json side;
  side["censor_hours"] = config.censor_hours;
  side["k"] = config.k;
  side["n_boards"] = config.n_boards;
  if (std::isinf(config.tau_c)) {
    side["tau_c"] = "inf";
  } else {
    side["tau_c"] = config.tau_c;
  }
  std::ofstream js = open_output(sidecar_path(csv_path));
  js << side.dump() << "\n";
  if (!js) throw ConfigError("failed while writing '" + sidecar_path(csv_path) + "'");
}

CensoredSample read_dataset(const std::string& csv_path) {
  CensoredSample sample;
  {
    std::ifstream js = open_input(sidecar_path(csv_path));
    json side;
    try {
      js >> side;
    } catch (const json::exception& err) {
      throw ConfigError(sidecar_path(csv_path) + ": " + err.what());
    }
    try {
      sample.config.censor_hours = side.at("censor_hours").get<double>();
      sample.config.k = side.at("k").get<double>();
      sample.config.n_boards = side.at("n_boards").get<long>();
      const json& tc = side.at("tau_c");
      sample.config.tau_c = tc.is_string() ? parse_double(tc.get<std::string>(), "tau_c")
                                           : tc.get<double>();
    } catch (const json::exception& err) {
      throw ConfigError(sidecar_path(csv_path) + ": " + err.what());
    }
  }
  try {
    sample.config.validate();
  } catch (const DomainError& err) {
    throw ConfigError(sidecar_path(csv_path) + ": " + err.what());
  }

  std::ifstream in = open_input(csv_path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "board_id,time_hours,censored") {
    throw ConfigError(csv_path + ": expected header 'board_id,time_hours,censored'");
  }
  long rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> parts = split_list(t);
    if (parts.size() != 3) {
      throw ConfigError(csv_path + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    double time = parse_double(parts[1], csv_path + ":" + std::to_string(line_no));
    const std::string& flag = parts[2];
    if (flag == "1") {
      ++sample.n_censored;
    } else if (flag == "0") {
      if (!(time > 0) || time > sample.config.censor_hours) {
        throw ConfigError(csv_path + ":" + std::to_string(line_no) +
                          ": uncensored time outside (0, censor_hours]");
      }
      sample.times.push_back(time);
    } else {
      throw ConfigError(csv_path + ":" + std::to_string(line_no) + ": censored flag must be 0 or 1");
    }
    ++rows;
  }
  if (rows != sample.config.n_boards) {
    throw ConfigError(csv_path + ": found " + std::to_string(rows) + " rows but sidecar says " +
                      std::to_string(sample.config.n_boards));
  }
  return sample;
}

namespace {

json theta_json(const HyperParams& theta) {
  json j;
  Vector10 v = theta.as_vector();
  const auto& names = HyperParams::field_names();
  for (int i = 0; i < 10; ++i) j[names[i]] = v[i];
  return j;
}

HyperParams theta_from_json(const json& j) {
  Vector10 v;
  const auto& names = HyperParams::field_names();
  for (int i = 0; i < 10; ++i) v[i] = j.at(names[i]).get<double>();
  return HyperParams::from_vector(v);
}

}  // namespace

void write_chain(const std::string& path, const ChainResult& result, const ChainConfig& config,
                 const std::vector<std::string>& dataset_paths, bool delta_calibrated,
                 bool calibration_warning) {
  std::ofstream out = open_output(path);
  json meta;
  meta["acceptance_rate"] = result.acceptance_rate;
  meta["burn_in"] = config.burn_in;
  meta["calibration_warning"] = calibration_warning;
  meta["datasets"] = dataset_paths;
  meta["delta"] = config.delta;
  meta["delta_calibrated"] = delta_calibrated;
  meta["n_draws"] = config.n_draws;
  meta["n_iterations"] = result.n_iterations;
  meta["n_rejected_degenerate"] = result.n_rejected_degenerate;
  meta["pilot_replicates"] = config.pilot_replicates;
  json diag = json::array();
  for (int i = 0; i < 10; ++i) diag.push_back(config.proposal.diag[i]);
  meta["proposal_diag"] = diag;
  json scales = json::array();
  for (const SummaryTransform& tr : result.ctx.transforms) {
    json row = json::array();
    for (int i = 0; i < kNumQuantiles; ++i) row.push_back(tr.scale[i]);
    scales.push_back(row);
  }
  meta["seed"] = config.seed;
  meta["standardize"] = config.standardize;
  meta["summary_scales"] = scales;
  meta["start"] = theta_json(config.start);
  meta["thin"] = config.thin;
  out << json{{"meta", meta}}.dump() << "\n";

  for (const ChainDraw& draw : result.draws) {
    json rec;
    rec["accept_rate"] = draw.cumulative_accept_rate;
    rec["iter"] = draw.iteration;
    rec["kernel_log"] = draw.kernel_log_sum;
    json p_hat = json::array();
    for (double p : draw.state.p_hat) p_hat.push_back(p);
    rec["p_hat"] = p_hat;
    rec["theta"] = theta_json(draw.state.theta);
    out << rec.dump() << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

LoadedChain read_chain(const std::string& path) {
  std::ifstream in = open_input(path);
  LoadedChain chain;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    json rec;
    try {
      rec = json::parse(t);
    } catch (const json::exception& err) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + err.what());
    }
    if (rec.contains("meta")) continue;
    try {
      chain.draws.push_back({rec.at("iter").get<long>(), theta_from_json(rec.at("theta"))});
    } catch (const json::exception& err) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + err.what());
    }
  }
  if (chain.draws.empty()) throw ConfigError(path + ": no draws found");
  return chain;
}

namespace {

void write_curve_rows(std::ofstream& out, const std::vector<ReliabilityPoint>& curve,
                      const char* mode) {
  for (const ReliabilityPoint& pt : curve) {
    out << format_double(pt.phi) << "," << format_double(pt.p_f) << ","
        << format_double(pt.beta) << "," << format_double(pt.beta_lo) << ","
        << format_double(pt.beta_hi) << "," << mode << "\n";
  }
}

}  // namespace

void write_curve_csv(const std::string& path, const std::vector<ReliabilityPoint>& damage_curve,
                     const std::vector<ReliabilityPoint>& overload_curve) {
  std::ofstream out = open_output(path);
  out << "phi,p_f,beta,beta_lo,beta_hi,mode\n";
  write_curve_rows(out, damage_curve, "damage");
  write_curve_rows(out, overload_curve, "overload");
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

void write_kd_csv(const std::string& path, const std::vector<KdResult>& rows) {
  std::ofstream out = open_output(path);
  out << "beta_target,phi1,phi2,kd,kd_lo,kd_hi\n";
  for (const KdResult& r : rows) {
    out << format_double(r.beta_target) << "," << format_double(r.phi_overload) << ","
        << format_double(r.phi_damage) << "," << format_double(r.k_d) << ","
        << format_double(r.k_d_lo) << "," << format_double(r.k_d_hi) << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

void write_load_path_csv(const std::string& path, const PiecewiseProfile& profile,
                         double horizon_hours) {
  if (!profile.valid()) throw DomainError("write_load_path_csv: malformed profile");
  std::ofstream out = open_output(path);
  out << "t_hours,tau_psi\n";
  for (std::size_t i = 0; i < profile.levels.size(); ++i) {
    out << format_double(profile.breakpoints[i]) << "," << format_double(profile.levels[i])
        << "\n";
  }
  out << format_double(horizon_hours) << "," << format_double(profile.levels.back()) << "\n";
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

void write_failure_times_csv(const std::string& path, const TimeToFailureSamples& samples) {
  std::ofstream out = open_output(path);
  out << "draw,rep,time_hours\n";
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    for (std::size_t j = 0; j < samples.times[i].size(); ++j) {
      out << i << "," << j << "," << format_double(samples.times[i][j]) << "\n";
    }
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

}  // namespace admkit
