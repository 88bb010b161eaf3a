#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "scslab/cli/cache.hpp"
#include "scslab/cli/report.hpp"
#include "scslab/version.hpp"

namespace {

using scslab::cli::Command;
using scslab::cli::ConfigError;
using scslab::cli::RunConfig;

struct Flags {
  std::string config;
  int k = 0;
  std::size_t n = 0, form = 0;
  std::string h;
  long h1 = 0, h2 = 0, nmax = 0;
  double x = 0.0, tol = 0.0, route_tol = 0.0, sym2_tol = 0.0;
  std::string xgrid, window, window2, cache_dir, csv, json, plot;
  bool no_eigen_route = false;
  unsigned threads = 0;
  std::map<std::string, CLI::Option*> opts;
};

void add_options(CLI::App* sub, Flags& f, Command c) {
  auto add = [&](const std::string& name, auto& var, const std::string& help) {
    f.opts[name] = sub->add_option("--" + name, var, help);
  };
  add("config", f.config, "JSON configuration file; flags override its values");
  add("k", f.k, "weight (even, >= 4)");
  add("n", f.n, "eigenvalue table length (0 picks what the command needs)");
  add("cache-dir", f.cache_dir, "eigenvalue cache directory (default $SCSLAB_CACHE_DIR or .scslab-cache)");
  add("sym2-tol", f.sym2_tol, "tolerance for L(1, sym^2 f)");
  add("csv", f.csv, "CSV output path (stdout when neither --csv nor --json is given)");
  add("json", f.json, "JSON report path");
  add("plot", f.plot, "gnuplot script path (needs --csv)");
  add("threads", f.threads, "worker threads for the experiment");
  if (c != Command::Eigen && c != Command::Variance && c != Command::PeterssonCheck)
    add("form", f.form, "eigenform index, ordered by lambda(2)");
  if (c == Command::Sum) add("h", f.h, "shift");
  if (c == Command::MeanSquare || c == Command::SmoothScan) add("h", f.h, "comma-separated shifts, e.g. 1,2,3,4");
  if (c == Command::Variance) {
    add("h1", f.h1, "first shift");
    add("h2", f.h2, "second shift");
    add("window2", f.window2, "second window (defaults to --window)");
    add("route-tol", f.route_tol, "declared tolerance between the two routes");
    f.opts["no-eigen-route"] = sub->add_flag("--no-eigen-route", f.no_eigen_route, "skip the eigenform route");
  }
  if (c == Command::Sum) add("x", f.x, "single X");
  if (c == Command::Sum || c == Command::Variance || c == Command::MeanSquare || c == Command::SmoothScan)
    add("xgrid", f.xgrid, "X-grid a:b:s (step s) or a:b:xr (ratio r)");
  if (c == Command::Sum || c == Command::Variance || c == Command::SmoothScan)
    add("window", f.window, "window kind:a:A[:H], kind in bump, cosine, sharp");
  if (c == Command::Variance || c == Command::PeterssonCheck) add("tol", f.tol, "certified tail tolerance");
  if (c == Command::PeterssonCheck) {
    add("nmax", f.nmax, "check all 1 <= n1, n2 <= nmax");
    add("route-tol", f.route_tol, "relative tolerance for the identity");
  }
}

bool given(const Flags& f, const std::string& name) {
  const auto it = f.opts.find(name);
  return it != f.opts.end() && it->second->count() > 0;
}

RunConfig build_config(const Flags& f, Command c) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = scslab::cli::load_config_file(f.config);
  cfg.command = c;
  if (given(f, "k")) cfg.k = f.k;
  if (given(f, "n")) cfg.n = f.n;
  if (given(f, "form")) cfg.form = f.form;
  if (given(f, "h")) {
    cfg.hs = scslab::cli::parse_list(f.h, "h");
    cfg.h = cfg.hs.front();
    if (c == Command::Sum && cfg.hs.size() != 1) throw ConfigError("h", "sum takes a single shift");
  }
  if (given(f, "h1")) cfg.h1 = f.h1;
  if (given(f, "h2")) cfg.h2 = f.h2;
  if (given(f, "x")) cfg.x = f.x;
  if (given(f, "xgrid")) cfg.xgrid = f.xgrid;
  if (given(f, "window")) cfg.window = f.window;
  if (given(f, "window2")) cfg.window2 = f.window2;
  if (given(f, "tol")) cfg.tol = f.tol;
  if (given(f, "route-tol")) cfg.route_tol = f.route_tol;
  if (given(f, "sym2-tol")) cfg.sym2_tol = f.sym2_tol;
  if (given(f, "no-eigen-route")) cfg.eigen_route = false;
  if (given(f, "nmax")) cfg.nmax = f.nmax;
  if (given(f, "cache-dir")) cfg.cache_dir = f.cache_dir;
  if (given(f, "csv")) cfg.csv = f.csv;
  if (given(f, "json")) cfg.json = f.json;
  if (given(f, "plot")) cfg.plot = f.plot;
  if (given(f, "threads")) cfg.threads = f.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shifted convolution sums of Hecke eigenvalues: tables, experiments and checks"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", scslab::version());
  app.require_subcommand(1);

  const std::pair<Command, const char*> commands[] = {
      {Command::Eigen, "normalized Hecke eigenvalue tables (cached)"},
      {Command::Sum, "sharp, weighted and smooth shifted sums"},
      {Command::Variance, "weighted variance against the main term, by both routes"},
      {Command::MeanSquare, "mean square of sharp sums with exponent fits"},
      {Command::SmoothScan, "smooth sums scaled by X^0.55"},
      {Command::PeterssonCheck, "trace formula identity over a grid of (n1, n2)"},
  };
  std::map<Command, Flags> flags;
  std::map<Command, CLI::App*> subs;
  for (const auto& [c, help] : commands) {
    subs[c] = app.add_subcommand(scslab::cli::to_string(c), help);
    add_options(subs[c], flags[c], c);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [c, sub] : subs) {
      if (!sub->parsed()) continue;
      const RunConfig cfg = build_config(flags[c], c);
      const auto env = scslab::cli::run(cfg);
      scslab::cli::write_outputs(env);
      if (cfg.csv.empty() && cfg.json.empty()) {
        std::cout << env.csv;
      } else {
        for (const auto* path : {&cfg.csv, &cfg.json, &cfg.plot})
          if (!path->empty()) std::cerr << "wrote " << *path << '\n';
      }
      for (const auto& [name, secs] : env.timings) std::cerr << "phase " << name << ' ' << secs << " s\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "scslab: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const scslab::cli::CacheError& e) {
    std::cerr << "scslab: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "scslab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
