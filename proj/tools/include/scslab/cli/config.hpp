#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scslab/common.hpp"

namespace scslab::cli {

enum class Command { Eigen, Sum, Variance, MeanSquare, SmoothScan, PeterssonCheck };

std::string to_string(Command c);
Command parse_command(const std::string& name);

/// A validation failure tied to one configuration field.
class ConfigError : public DomainError {
 public:
  ConfigError(std::string field, const std::string& message)
      : DomainError("field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  Command command = Command::Eigen;
  int k = 12;
  std::size_t n = 0;        // eigenvalue table length; 0 picks what the command needs
  std::size_t form = 0;     // eigenform index (sorted by lambda(2)) for single-form commands
  long h = 1;               // sum
  long h1 = 1, h2 = 1;      // variance
  std::vector<long> hs{1};  // meansquare, smoothscan
  std::optional<double> x;  // sum at a single X
  std::string xgrid;        // "a:b:s" or "a:b:xr"
  std::string window = "bump:1:2";
  std::string window2;      // second variance window; empty means the same as `window`
  double tol = 1e-12;       // certified tail tolerance
  double route_tol = 1e-3;  // declared variance route tolerance
  double sym2_tol = 1e-10;  // L(1, sym^2 f) quadrature tolerance
  bool eigen_route = true;
  long nmax = 20;           // petersson-check: 1 <= n1, n2 <= nmax
  std::string cache_dir;    // empty: $SCSLAB_CACHE_DIR, then ".scslab-cache"
  std::string csv, json, plot;
  unsigned threads = 1;
};

/// Grid from "a:b:s" (a, a+s, ..., <= b) or "a:b:xr" (a, a r, ..., <= b); a bare number is a
/// one-point grid. Throws ConfigError on malformed or empty grids.
std::vector<double> parse_xgrid(const std::string& spec);

/// Parses "1,2,3" into positive integers.
std::vector<long> parse_list(const std::string& spec, const std::string& field);

/// Checks every field used by the command; throws ConfigError naming the first bad field.
void validate(const RunConfig& cfg);

/// Effective cache directory for cfg (flag, then environment, then the default).
std::string cache_directory(const RunConfig& cfg);

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Reads a configuration object; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

}  // namespace scslab::cli
