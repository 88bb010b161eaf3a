#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scslab/cli/config.hpp"

namespace scslab::cli {

inline constexpr char kCsvSchema[] = "scslab-csv 1";

struct ReportEnvelope {
  RunConfig config;
  std::string version;
  /// Phases in execution order; eigen tables appear as "load" or "compute".
  std::vector<std::pair<std::string, double>> timings;
  double wall_seconds = 0.0;
  nlohmann::ordered_json payload;
  std::string csv;   // schema comment, header row, data rows
  std::string plot;  // gnuplot script reading the CSV

  double phase(const std::string& name) const;
  bool has_phase(const std::string& name) const;
  nlohmann::ordered_json to_json() const;
};

/// Validates, dispatches to the experiment and assembles the report. Writes nothing.
ReportEnvelope run(const RunConfig& cfg);

/// Writes the CSV, JSON and plot files named in the config. Every file goes to a temp
/// name first and all are renamed only after all were written, so a failure leaves no
/// partial output behind.
void write_outputs(const ReportEnvelope& env);

/// Writes text to path through a temp file and rename.
void atomic_write(const std::string& path, const std::string& text);

/// 17 significant digits, "nan"/"inf" spelled out.
std::string format_number(double v);

}  // namespace scslab::cli
