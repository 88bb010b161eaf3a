#include "scslab/cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scslab/sums/window.hpp"

namespace scslab::cli {
namespace {

double parse_number(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) throw ConfigError(field, "bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

bool is_integer(double v) { return std::floor(v) == v; }

void check_window(const std::string& spec, const std::string& field) {
  try {
    sums::parse_window(spec);
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Eigen: return "eigen";
    case Command::Sum: return "sum";
    case Command::Variance: return "variance";
    case Command::MeanSquare: return "meansquare";
    case Command::SmoothScan: return "smoothscan";
    default: return "petersson-check";
  }
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Eigen, Command::Sum, Command::Variance, Command::MeanSquare, Command::SmoothScan,
                    Command::PeterssonCheck}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("command", "unknown command '" + name + "'");
}

std::vector<double> parse_xgrid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) {
    const double v = parse_number(parts[0], "xgrid");
    if (!(v > 0.0)) throw ConfigError("xgrid", "X must be positive");
    return {v};
  }
  if (parts.size() != 3) throw ConfigError("xgrid", "expected a:b:s or a:b:xr, got '" + spec + "'");
  const double a = parse_number(parts[0], "xgrid"), b = parse_number(parts[1], "xgrid");
  if (!(a > 0.0) || b < a) throw ConfigError("xgrid", "need 0 < a <= b in '" + spec + "'");
  std::vector<double> grid;
  const double slack = 1e-9 * b;
  if (!parts[2].empty() && parts[2][0] == 'x') {
    const double r = parse_number(parts[2].substr(1), "xgrid");
    if (!(r > 1.0)) throw ConfigError("xgrid", "geometric ratio must exceed 1");
    for (int i = 0;; ++i) {
      const double v = a * std::pow(r, i);
      if (v > b + slack) break;
      // snap rounding drift so decades land on integers
      grid.push_back(std::fabs(v - std::round(v)) <= 1e-9 * v ? std::round(v) : v);
      if (grid.size() > 1000000) throw ConfigError("xgrid", "grid too large");
    }
  } else {
    const double s = parse_number(parts[2], "xgrid");
    if (!(s > 0.0)) throw ConfigError("xgrid", "step must be positive");
    for (long i = 0;; ++i) {
      const double v = a + static_cast<double>(i) * s;
      if (v > b + slack) break;
      grid.push_back(v);
      if (grid.size() > 1000000) throw ConfigError("xgrid", "grid too large");
    }
  }
  return grid;
}

std::vector<long> parse_list(const std::string& spec, const std::string& field) {
  std::vector<long> out;
  for (const auto& item : split(spec, ',')) {
    const double v = parse_number(item, field);
    if (!is_integer(v) || v < 1.0) throw ConfigError(field, "entries must be positive integers");
    out.push_back(static_cast<long>(v));
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.k < 4 || cfg.k % 2 != 0) throw ConfigError("k", "weight must be even and >= 4");
  if (cfg.threads < 1) throw ConfigError("threads", "must be at least 1");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol", "must be positive");
  if (!(cfg.route_tol > 0.0)) throw ConfigError("route_tol", "must be positive");
  if (!(cfg.sym2_tol > 0.0) || cfg.sym2_tol >= 1.0) throw ConfigError("sym2_tol", "must lie in (0, 1)");
  if (!cfg.plot.empty() && cfg.csv.empty()) throw ConfigError("plot", "a plot script needs --csv to read from");
  switch (cfg.command) {
    case Command::Eigen:
      break;
    case Command::Sum:
      if (cfg.h < 1) throw ConfigError("h", "shift must be a positive integer");
      if (!cfg.x && cfg.xgrid.empty()) throw ConfigError("x", "give --x or --xgrid");
      if (cfg.x && !(*cfg.x > 0.0)) throw ConfigError("x", "X must be positive");
      if (!cfg.xgrid.empty()) parse_xgrid(cfg.xgrid);
      check_window(cfg.window, "window");
      break;
    case Command::Variance:
      if (cfg.h1 < 1) throw ConfigError("h1", "shift must be a positive integer");
      if (cfg.h2 < 1) throw ConfigError("h2", "shift must be a positive integer");
      if (cfg.xgrid.empty()) throw ConfigError("xgrid", "variance needs an X-grid");
      parse_xgrid(cfg.xgrid);
      check_window(cfg.window, "window");
      if (!cfg.window2.empty()) check_window(cfg.window2, "window2");
      break;
    case Command::MeanSquare:
      if (cfg.hs.empty()) throw ConfigError("h", "empty shift list");
      for (const long h : cfg.hs)
        if (h < 1) throw ConfigError("h", "shifts must be positive integers");
      if (cfg.xgrid.empty()) throw ConfigError("xgrid", "meansquare needs an X-grid");
      for (const double X : parse_xgrid(cfg.xgrid))
        if (!is_integer(X)) throw ConfigError("xgrid", "meansquare needs integer X values");
      break;
    case Command::SmoothScan:
      if (cfg.hs.empty()) throw ConfigError("h", "empty shift list");
      for (const long h : cfg.hs)
        if (h < 1) throw ConfigError("h", "shifts must be positive integers");
      if (cfg.xgrid.empty()) throw ConfigError("xgrid", "smoothscan needs an X-grid");
      parse_xgrid(cfg.xgrid);
      check_window(cfg.window, "window");
      break;
    case Command::PeterssonCheck:
      if (cfg.nmax < 1) throw ConfigError("nmax", "must be positive");
      if (cfg.nmax > 1000) throw ConfigError("nmax", "at most 1000");
      break;
  }
}

std::string cache_directory(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  if (const char* env = std::getenv("SCSLAB_CACHE_DIR"); env && *env) return env;
  return ".scslab-cache";
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = to_string(cfg.command);
  j["k"] = cfg.k;
  j["n"] = cfg.n;
  j["form"] = cfg.form;
  j["h"] = cfg.h;
  j["h1"] = cfg.h1;
  j["h2"] = cfg.h2;
  j["hs"] = cfg.hs;
  j["x"] = cfg.x ? nlohmann::ordered_json(*cfg.x) : nlohmann::ordered_json(nullptr);
  j["xgrid"] = cfg.xgrid;
  j["window"] = cfg.window;
  j["window2"] = cfg.window2;
  j["tol"] = cfg.tol;
  j["route_tol"] = cfg.route_tol;
  j["sym2_tol"] = cfg.sym2_tol;
  j["eigen_route"] = cfg.eigen_route;
  j["nmax"] = cfg.nmax;
  j["cache_dir"] = cfg.cache_dir;
  j["csv"] = cfg.csv;
  j["json"] = cfg.json;
  j["plot"] = cfg.plot;
  j["threads"] = cfg.threads;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "command") c.command = parse_command(v.get<std::string>());
      else if (key == "k") c.k = v.get<int>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "form") c.form = v.get<std::size_t>();
      else if (key == "h") {
        if (v.is_array()) {
          c.hs = v.get<std::vector<long>>();
        } else if (v.is_string()) {
          c.hs = parse_list(v.get<std::string>(), "h");
        } else {
          c.h = v.get<long>();
          c.hs = {c.h};
        }
      } else if (key == "hs") c.hs = v.is_string() ? parse_list(v.get<std::string>(), "hs") : v.get<std::vector<long>>();
      else if (key == "h1") c.h1 = v.get<long>();
      else if (key == "h2") c.h2 = v.get<long>();
      else if (key == "x") c.x = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "xgrid") c.xgrid = v.get<std::string>();
      else if (key == "window") c.window = v.get<std::string>();
      else if (key == "window2") c.window2 = v.get<std::string>();
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "route_tol") c.route_tol = v.get<double>();
      else if (key == "sym2_tol") c.sym2_tol = v.get<double>();
      else if (key == "eigen_route") c.eigen_route = v.get<bool>();
      else if (key == "nmax") c.nmax = v.get<long>();
      else if (key == "cache_dir") c.cache_dir = v.get<std::string>();
      else if (key == "csv") c.csv = v.get<std::string>();
      else if (key == "json") c.json = v.get<std::string>();
      else if (key == "plot") c.plot = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else throw ConfigError(key, "unknown configuration key");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
  }
  return c;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace scslab::cli
