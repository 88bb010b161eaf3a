#include "scslab/cli/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "scslab/cli/cache.hpp"
#include "scslab/experiments/experiments.hpp"
#include "scslab/petersson/petersson.hpp"
#include "scslab/qarith/modular_forms.hpp"
#include "scslab/sums/sums.hpp"
#include "scslab/version.hpp"

namespace scslab::cli {
namespace {

using json = nlohmann::ordered_json;
using qarith::HeckeEigenform;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class PhaseTimer {
 public:
  explicit PhaseTimer(ReportEnvelope& env) : env_(env) {}
  template <class F>
  auto operator()(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      env_.timings.emplace_back(name, seconds_since(t0));
    } else {
      auto r = f();
      env_.timings.emplace_back(name, seconds_since(t0));
      return r;
    }
  }

 private:
  ReportEnvelope& env_;
};

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::string opt_csv(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

class Csv {
 public:
  Csv(const std::string& command, const std::vector<std::string>& columns) {
    out_ << "# " << kCsvSchema << ' ' << command << '\n';
    row(columns);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string num(double v) { return format_number(v); }
std::string num(long v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

struct FormSet {
  std::vector<HeckeEigenform> forms;
  bool cache_hit = false;
  std::string path;
};

void attach_sym2(HeckeEigenform& f, double tol) {
  const double L = petersson::sym2_l1(f, petersson::Sym2Method::NormIdentity, tol);
  f.sym2_l1 = L;
  const double log_norm = std::log(2.0 * L / M_PI) + std::lgamma(f.k) - f.k * std::log(4.0 * M_PI);
  const double norm = std::exp(log_norm);
  if (std::isfinite(norm) && norm > 0.0) f.petersson_norm = norm;
}

/// Eigenforms of weight k with tables to N from the cache, computing and storing them on a miss.
/// L-values are attached when the table is long enough for the norm identity.
FormSet load_or_compute(const RunConfig& cfg, int k, std::size_t N, bool want_sym2, ReportEnvelope& env) {
  PhaseTimer timed(env);
  FormSet set;
  set.path = cache_path(cache_directory(cfg), k, N);
  if (std::filesystem::exists(set.path)) {
    set.forms = timed("load", [&] { return cache_load(set.path, k, N); });
    set.cache_hit = true;
  } else {
    set.forms = timed("compute", [&] {
      auto forms = qarith::hecke_eigenforms(k, N);
      if (N >= petersson::norm_required_length(k, cfg.sym2_tol))
        for (auto& f : forms) attach_sym2(f, cfg.sym2_tol);
      return forms;
    });
    if (!set.forms.empty()) timed("store", [&] { cache_store(set.path, set.forms); });
  }
  if (want_sym2) {
    timed("sym2", [&] {
      for (auto& f : set.forms)
        if (!f.sym2_l1) attach_sym2(f, cfg.sym2_tol);
    });
  }
  return set;
}

const HeckeEigenform& pick_form(const RunConfig& cfg, const FormSet& set) {
  if (set.forms.empty()) throw ConfigError("k", "S_" + std::to_string(cfg.k) + " is zero; no eigenform to use");
  if (cfg.form >= set.forms.size())
    throw ConfigError("form", "index " + std::to_string(cfg.form) + " but dim S_k = " + std::to_string(set.forms.size()));
  return set.forms[cfg.form];
}

json cache_json(const FormSet& set) {
  json j;
  j["file"] = set.path;
  j["status"] = set.cache_hit ? "hit" : "miss";
  j["forms"] = set.forms.size();
  return j;
}

std::vector<double> grid_of(const RunConfig& cfg) {
  if (!cfg.xgrid.empty()) return parse_xgrid(cfg.xgrid);
  return {*cfg.x};
}

std::vector<long> integer_grid(const RunConfig& cfg) {
  std::vector<long> out;
  for (const double X : parse_xgrid(cfg.xgrid)) out.push_back(static_cast<long>(X));
  return out;
}

std::string plot_header(const RunConfig& cfg, const std::string& title) {
  namespace fs = std::filesystem;
  const fs::path csv = fs::absolute(cfg.csv);
  fs::path png = csv;
  png.replace_extension(".png");
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set datafile commentschars '#'\n"
    << "set terminal pngcairo size 1000,640\n"
    << "set output '" << png.string() << "'\n"
    << "set title '" << title << "'\n"
    << "set key outside right\n"
    << "set grid\n"
    << "csv = '" << csv.string() << "'\n";
  return s.str();
}

// eigen: n, f1..fd
void run_eigen(const RunConfig& cfg, ReportEnvelope& env) {
  const std::size_t N = cfg.n ? cfg.n : petersson::norm_required_length(cfg.k, cfg.sym2_tol);
  const FormSet set = load_or_compute(cfg, cfg.k, N, false, env);
  PhaseTimer timed(env);
  json forms = json::array();
  timed("diagnostics", [&] {
    for (std::size_t i = 0; i < set.forms.size(); ++i) {
      const auto& f = set.forms[i];
      const auto d = qarith::validate(f, N);
      json jf;
      jf["index"] = i;
      jf["lambda2"] = N >= 2 ? json(f[2]) : json(nullptr);
      jf["sym2_l1"] = opt(f.sym2_l1);
      jf["petersson_norm"] = opt(f.petersson_norm);
      jf["hecke_residual"] = d.hecke_residual;
      jf["divisor_excess"] = d.divisor_excess;
      jf["prime_excess"] = d.prime_excess;
      jf["lambda_one_error"] = d.lambda_one_error;
      forms.push_back(jf);
    }
  });
  env.payload["k"] = cfg.k;
  env.payload["N"] = N;
  env.payload["dimension"] = qarith::cusp_form_dimension(cfg.k);
  env.payload["cache"] = cache_json(set);
  env.payload["forms"] = forms;

  std::vector<std::string> cols{"n"};
  for (std::size_t i = 0; i < set.forms.size(); ++i) cols.push_back("f" + std::to_string(i + 1));
  Csv csv("eigen", cols);
  for (std::size_t n = 1; n <= N; ++n) {
    std::vector<std::string> row{std::to_string(n)};
    for (const auto& f : set.forms) row.push_back(num(f[n]));
    csv.row(row);
  }
  env.csv = csv.str();
  if (!cfg.csv.empty()) {
    std::ostringstream p;
    p << plot_header(cfg, "normalized Hecke eigenvalues, k = " + std::to_string(cfg.k)) << "set xlabel 'n'\n"
      << "set ylabel 'lambda(n)'\n";
    if (set.forms.empty()) {
      p << "print 'S_k is zero'\n";
    } else {
      p << "plot for [i=2:" << set.forms.size() + 1 << "] csv using 1:i with points pt 7 ps 0.4 title columnhead(i)\n";
    }
    env.plot = p.str();
  }
}

// sum: X, sharp, weighted, smooth
void run_sum(const RunConfig& cfg, ReportEnvelope& env) {
  const sums::Window W = sums::parse_window(cfg.window);
  const auto grid = grid_of(cfg);
  std::size_t need = 1;
  for (const double X : grid) {
    need = std::max<std::size_t>(need, static_cast<std::size_t>(std::floor(X)) + cfg.h);
    const auto r = sums::smooth_sum_range(X, cfg.h, W);
    if (r.first <= r.last) need = std::max<std::size_t>(need, r.last + cfg.h);
  }
  const FormSet set = load_or_compute(cfg, cfg.k, std::max(need, cfg.n), false, env);
  const HeckeEigenform& f = pick_form(cfg, set);
  PhaseTimer timed(env);
  Csv csv("sum", {"X", "sharp", "weighted", "smooth"});
  json rows = json::array();
  timed("sums", [&] {
    for (const double X : grid) {
      const double a = sums::sharp_sum(f, X, cfg.h), b = sums::weighted_sum(f, X, cfg.h),
                   c = sums::smooth_sum(f, X, cfg.h, W);
      csv.row({num(X), num(a), num(b), num(c)});
      json r;
      r["X"] = X;
      r["sharp"] = a;
      r["weighted"] = b;
      r["smooth"] = c;
      rows.push_back(r);
    }
  });
  env.payload["k"] = cfg.k;
  env.payload["form"] = cfg.form;
  env.payload["h"] = cfg.h;
  env.payload["window"] = W.descriptor();
  env.payload["cache"] = cache_json(set);
  env.payload["rows"] = rows;
  env.csv = csv.str();
  if (!cfg.csv.empty()) {
    env.plot = plot_header(cfg, "shifted sums, k = " + std::to_string(cfg.k) + ", h = " + std::to_string(cfg.h)) +
               "set xlabel 'X'\nplot for [i=2:4] csv using 1:i with linespoints title columnhead(i)\n";
  }
}

// variance: X, lhs_petersson, main_term, residual, tail_bound, diagonal, offdiagonal,
//           lhs_eigen, route_gap, extension_exact, max_c0
void run_variance(const RunConfig& cfg, ReportEnvelope& env) {
  experiments::VarianceConfig vc;
  vc.k = cfg.k;
  vc.h1 = cfg.h1;
  vc.h2 = cfg.h2;
  vc.W1 = sums::parse_window(cfg.window);
  vc.W2 = cfg.window2.empty() ? vc.W1 : sums::parse_window(cfg.window2);
  vc.xgrid = parse_xgrid(cfg.xgrid);
  vc.tail_tol = cfg.tol;
  vc.route_tol = cfg.route_tol;
  vc.eigen_route = cfg.eigen_route;
  vc.threads = cfg.threads;

  std::vector<HeckeEigenform> forms;
  json cache = nullptr;
  if (cfg.eigen_route && cfg.k <= experiments::kEigenMaxWeight && qarith::cusp_form_dimension(cfg.k) > 0) {
    const double Xmax = *std::max_element(vc.xgrid.begin(), vc.xgrid.end());
    const std::size_t need = std::max(experiments::variance_required_length(vc.h1, vc.h2, vc.W1, vc.W2, Xmax),
                                      petersson::norm_required_length(cfg.k, cfg.sym2_tol));
    FormSet set = load_or_compute(cfg, cfg.k, std::max(need, cfg.n), true, env);
    cache = cache_json(set);
    forms = std::move(set.forms);
  }
  PhaseTimer timed(env);
  const auto rep = timed("experiment", [&] { return experiments::variance_experiment(vc, forms); });

  Csv csv("variance", {"X", "lhs_petersson", "main_term", "residual", "tail_bound", "diagonal", "offdiagonal",
                       "lhs_eigen", "route_gap", "extension_exact", "max_c0"});
  json points = json::array();
  for (const auto& p : rep.points) {
    csv.row({num(p.X), num(p.lhs_petersson), num(p.main_term), num(p.residual), num(p.tail_bound), num(p.diagonal),
             num(p.offdiagonal), opt_csv(p.lhs_eigen), opt_csv(p.route_gap), flag(p.extension_exact),
             num(p.max_c0)});
    json j;
    j["X"] = p.X;
    j["lhs_petersson"] = p.lhs_petersson;
    j["main_term"] = p.main_term;
    j["residual"] = p.residual;
    j["tail_bound"] = p.tail_bound;
    j["diagonal"] = p.diagonal;
    j["offdiagonal"] = p.offdiagonal;
    j["lhs_eigen"] = opt(p.lhs_eigen);
    j["route_gap"] = opt(p.route_gap);
    j["extension_exact"] = p.extension_exact;
    j["allowance"] = p.allowance;
    j["max_c0"] = p.max_c0;
    points.push_back(j);
  }
  env.payload["k"] = rep.k;
  env.payload["h1"] = rep.h1;
  env.payload["h2"] = rep.h2;
  env.payload["window1"] = rep.window1;
  env.payload["window2"] = rep.window2;
  env.payload["B"] = rep.B;
  env.payload["eigen_route"] = rep.eigen_route;
  env.payload["lattice_count"] = rep.lattice_count;
  env.payload["forms"] = rep.forms;
  env.payload["cache"] = cache;
  env.payload["route_tol"] = rep.route_tol;
  env.payload["tail_tol"] = rep.tail_tol;
  env.payload["residual_slope"] = rep.residual_slope;
  env.payload["max_abs_residual"] = rep.max_abs_residual;
  env.payload["median_abs_residual"] = rep.median_abs_residual;
  env.payload["max_offdiag_plus_tail"] = rep.max_offdiag_plus_tail;
  env.payload["routes_agree"] = rep.routes_agree;
  env.payload["points"] = points;
  env.csv = csv.str();
  if (!cfg.csv.empty()) {
    env.plot = plot_header(cfg, "variance, k = " + std::to_string(cfg.k) + ", (h1, h2) = (" + std::to_string(cfg.h1) +
                                    ", " + std::to_string(cfg.h2) + ")") +
               "set xlabel 'X'\n"
               "set multiplot layout 2,1\n"
               "plot csv using 1:2 with linespoints title 'lhs', csv using 1:3 with lines title 'B X'\n"
               "plot csv using 1:4 with linespoints title 'residual'\n"
               "unset multiplot\n";
  }
}

// meansquare: h, X, V, sum_squares, normalized, in_range
void run_meansquare(const RunConfig& cfg, ReportEnvelope& env) {
  const auto grid = integer_grid(cfg);
  const long Xmax = *std::max_element(grid.begin(), grid.end());
  const long hmax = *std::max_element(cfg.hs.begin(), cfg.hs.end());
  const std::size_t need = static_cast<std::size_t>(2 * Xmax - 1 + hmax);
  const FormSet set = load_or_compute(cfg, cfg.k, std::max(need, cfg.n), false, env);
  const HeckeEigenform& f = pick_form(cfg, set);
  PhaseTimer timed(env);
  const auto rep = timed("experiment", [&] { return experiments::meansquare_experiment(f, cfg.hs, grid, cfg.threads); });

  Csv csv("meansquare", {"h", "X", "V", "sum_squares", "normalized", "in_range"});
  json points = json::array();
  for (const auto& p : rep.points) {
    csv.row({num(p.h), num(p.X), num(p.V), num(p.sum_squares), num(p.normalized), flag(p.in_range)});
    json j;
    j["h"] = p.h;
    j["X"] = p.X;
    j["V"] = p.V;
    j["sum_squares"] = p.sum_squares;
    j["normalized"] = p.normalized;
    j["in_range"] = p.in_range;
    points.push_back(j);
  }
  json fits = json::array();
  for (const auto& e : rep.fits) {
    json j;
    j["h"] = e.h;
    j["exponent"] = e.exponent;
    j["standard_error"] = e.standard_error;
    j["lower"] = e.lower;
    j["upper"] = e.upper;
    j["points"] = e.points;
    fits.push_back(j);
  }
  env.payload["k"] = cfg.k;
  env.payload["form"] = cfg.form;
  env.payload["cache"] = cache_json(set);
  env.payload["fits"] = fits;
  env.payload["band_ratio"] = rep.band_ratio;
  env.payload["points"] = points;
  env.csv = csv.str();
  if (!cfg.csv.empty()) {
    std::ostringstream hs;
    for (std::size_t i = 0; i < cfg.hs.size(); ++i) hs << (i ? " " : "") << cfg.hs[i];
    env.plot = plot_header(cfg, "mean square, k = " + std::to_string(cfg.k)) +
               "set logscale xy\nset xlabel 'X'\nset ylabel 'V(X, h)'\n"
               "plot for [h in '" + hs.str() + "'] csv using 2:($1 == h ? $3 : 1/0) with linespoints title 'h = '.h\n";
  }
}

// smoothscan: h, X, value, ratio, in_range
void run_smoothscan(const RunConfig& cfg, ReportEnvelope& env) {
  const sums::Window W = sums::parse_window(cfg.window);
  const auto grid = parse_xgrid(cfg.xgrid);
  std::size_t need = 1;
  for (const double X : grid)
    for (const long h : cfg.hs) {
      const auto r = sums::smooth_sum_range(X, h, W);
      if (r.first <= r.last) need = std::max<std::size_t>(need, r.last + h);
    }
  const FormSet set = load_or_compute(cfg, cfg.k, std::max(need, cfg.n), false, env);
  const HeckeEigenform& f = pick_form(cfg, set);
  PhaseTimer timed(env);
  const auto rep = timed("experiment", [&] { return experiments::smooth_bound_scan(f, W, cfg.hs, grid, cfg.threads); });

  Csv csv("smoothscan", {"h", "X", "value", "ratio", "in_range"});
  json points = json::array();
  for (const auto& p : rep.points) {
    csv.row({num(p.h), num(p.X), num(p.value), num(p.ratio), flag(p.in_range)});
    json j;
    j["h"] = p.h;
    j["X"] = p.X;
    j["value"] = p.value;
    j["ratio"] = p.ratio;
    j["in_range"] = p.in_range;
    points.push_back(j);
  }
  json growth = json::array();
  for (const auto& [h, g] : rep.decade_growth) growth.push_back(json{{"h", h}, {"growth", g}});
  env.payload["k"] = cfg.k;
  env.payload["form"] = cfg.form;
  env.payload["window"] = rep.window;
  env.payload["exponent"] = experiments::kScanExponent;
  env.payload["cache"] = cache_json(set);
  env.payload["decade_growth"] = growth;
  env.payload["doubling_trend"] = rep.doubling_trend;
  env.payload["points"] = points;
  env.csv = csv.str();
  if (!cfg.csv.empty()) {
    std::ostringstream hs;
    for (std::size_t i = 0; i < cfg.hs.size(); ++i) hs << (i ? " " : "") << cfg.hs[i];
    env.plot = plot_header(cfg, "smooth sum scan, k = " + std::to_string(cfg.k)) +
               "set logscale x\nset xlabel 'X'\nset ylabel '|A^W| / X^0.55'\n"
               "plot for [h in '" + hs.str() + "'] csv using 2:($1 == h ? $4 : 1/0) with linespoints title 'h = '.h\n";
  }
}

// petersson-check: n1, n2, lhs, rhs_total, diagonal, offdiagonal, tail_bound, c0, gap, within
void run_petersson_check(const RunConfig& cfg, ReportEnvelope& env) {
  std::vector<HeckeEigenform> forms;
  json cache = nullptr;
  if (qarith::cusp_form_dimension(cfg.k) > 0) {
    const std::size_t need = std::max<std::size_t>(cfg.nmax, petersson::norm_required_length(cfg.k, cfg.sym2_tol));
    FormSet set = load_or_compute(cfg, cfg.k, std::max(need, cfg.n), true, env);
    cache = cache_json(set);
    forms = std::move(set.forms);
  }
  PhaseTimer timed(env);
  Csv csv("petersson-check", {"n1", "n2", "lhs", "rhs_total", "diagonal", "offdiagonal", "tail_bound", "c0", "gap",
                              "within"});
  std::size_t failures = 0;
  double worst = 0.0;
  special::KloostermanTable table;
  timed("trace", [&] {
    for (long n1 = 1; n1 <= cfg.nmax; ++n1)
      for (long n2 = 1; n2 <= cfg.nmax; ++n2) {
        const double lhs = forms.empty() ? 0.0 : petersson::trace_formula_lhs(cfg.k, n1, n2, forms);
        const auto rhs = petersson::trace_formula_rhs_auto(cfg.k, n1, n2, cfg.tol, &table);
        const double gap = std::fabs(lhs - rhs.total());
        const bool within = gap <= rhs.tail_bound + cfg.route_tol * (1.0 + std::fabs(rhs.total()));
        failures += within ? 0 : 1;
        worst = std::max(worst, gap / (1.0 + std::fabs(rhs.total())));
        csv.row({num(n1), num(n2), num(lhs), num(rhs.total()), num(rhs.diagonal), num(rhs.offdiagonal),
                 num(rhs.tail_bound), num(rhs.c0), num(gap), flag(within)});
      }
  });
  env.payload["k"] = cfg.k;
  env.payload["nmax"] = cfg.nmax;
  env.payload["forms"] = forms.size();
  env.payload["cache"] = cache;
  env.payload["tail_tol"] = cfg.tol;
  env.payload["route_tol"] = cfg.route_tol;
  env.payload["pairs"] = cfg.nmax * cfg.nmax;
  env.payload["failures"] = failures;
  env.payload["max_relative_gap"] = worst;
  env.csv = csv.str();
  if (!cfg.csv.empty()) {
    env.plot = plot_header(cfg, "trace formula gaps, k = " + std::to_string(cfg.k)) +
               "set logscale cb\nset xlabel 'n1'\nset ylabel 'n2'\n"
               "plot csv using 1:2:($9 + 1e-300) with points pt 5 ps 1.5 palette title 'gap'\n";
  }
}

}  // namespace

double ReportEnvelope::phase(const std::string& name) const {
  for (const auto& [n, t] : timings)
    if (n == name) return t;
  throw DomainError("no timing phase '" + name + "'");
}

bool ReportEnvelope::has_phase(const std::string& name) const {
  return std::any_of(timings.begin(), timings.end(), [&](const auto& p) { return p.first == name; });
}

nlohmann::ordered_json ReportEnvelope::to_json() const {
  json j;
  j["version"] = version;
  j["config"] = cli::to_json(config);
  json t = json::array();
  for (const auto& [name, secs] : timings) t.push_back(json{{"phase", name}, {"seconds", secs}});
  j["timings"] = t;
  j["wall_seconds"] = wall_seconds;
  j["payload"] = payload;
  return j;
}

ReportEnvelope run(const RunConfig& cfg) {
  validate(cfg);
  ReportEnvelope env;
  env.config = cfg;
  env.version = scslab::version();
  env.payload = json::object();
  const auto t0 = Clock::now();
  switch (cfg.command) {
    case Command::Eigen: run_eigen(cfg, env); break;
    case Command::Sum: run_sum(cfg, env); break;
    case Command::Variance: run_variance(cfg, env); break;
    case Command::MeanSquare: run_meansquare(cfg, env); break;
    case Command::SmoothScan: run_smoothscan(cfg, env); break;
    case Command::PeterssonCheck: run_petersson_check(cfg, env); break;
  }
  env.wall_seconds = seconds_since(t0);
  return env;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string temp_name(const std::string& path) { return path + ".tmp." + std::to_string(::getpid()); }

void write_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << text;
  os.flush();
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void atomic_write(const std::string& path, const std::string& text) {
  const std::string tmp = temp_name(path);
  try {
    write_file(tmp, text);
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

void write_outputs(const ReportEnvelope& env) {
  std::vector<std::pair<std::string, std::string>> files;
  if (!env.config.csv.empty()) files.emplace_back(env.config.csv, env.csv);
  if (!env.config.json.empty()) files.emplace_back(env.config.json, env.to_json().dump(2) + "\n");
  if (!env.config.plot.empty()) files.emplace_back(env.config.plot, env.plot);

  std::vector<std::string> temps;
  try {
    for (const auto& [path, text] : files) {
      temps.push_back(temp_name(path));
      write_file(temps.back(), text);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) std::filesystem::remove(t, ec);
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(temps[i], files[i].first);
}

}  // namespace scslab::cli
