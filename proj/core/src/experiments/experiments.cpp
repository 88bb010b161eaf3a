#include "scslab/experiments/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scslab/common.hpp"
#include "scslab/petersson/petersson.hpp"
#include "scslab/special/arith.hpp"
#include "scslab/special/bessel.hpp"
#include "scslab/sums/sums.hpp"

namespace scslab::experiments {
namespace {

// Runs fn(i) for i < n on up to `threads` workers; results go to caller-owned slots.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void require_shifts(long h1, long h2, const char* who) {
  if (h1 < 1 || h2 < 1) throw DomainError(std::string(who) + ": shifts must be positive integers");
}

void require_weight(int k, const char* who) {
  if (k < 4 || k % 2 != 0) throw DomainError(std::string(who) + ": weight must be even and >= 4");
}

void require_X(double X, const char* who) {
  if (!(X > 0.0) || !std::isfinite(X)) throw DomainError(std::string(who) + ": X must be positive");
}

// r >= 1 with a_W <= h (2r + d) / (2 d X) <= A_W, and the window value there
struct Line {
  long r = 0;
  double weight = 0.0;
};

double line_argument(long h, long d, long r, double X) {
  return static_cast<double>(h) * (2.0 * static_cast<double>(r) + static_cast<double>(d)) /
         (2.0 * static_cast<double>(d) * X);
}

std::vector<Line> window_lines(long h, long d, double X, const Window& W) {
  auto inside = [&](long r) {
    const double y = line_argument(h, d, r, X);
    return y >= W.a() && y <= W.A();
  };
  const double scale = static_cast<double>(d) * X / static_cast<double>(h);
  long lo = std::max(1L, static_cast<long>(std::ceil(W.a() * scale - 0.5 * d)));
  long hi = static_cast<long>(std::floor(W.A() * scale - 0.5 * d));
  while (lo > 1 && inside(lo - 1)) --lo;
  while (lo <= hi && !inside(lo)) ++lo;
  while (inside(hi + 1)) ++hi;
  while (hi >= lo && !inside(hi)) --hi;
  std::vector<Line> out;
  for (long r = lo; r <= hi; ++r) {
    const double w = W(line_argument(h, d, r, X));
    if (w != 0.0) out.push_back({r, w});
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double sup_norm(const Window& W) {
  return W.smooth() ? sums::sobolev_norm(W, 0, sums::kSupNorm) : std::fabs(W.height());
}

}  // namespace

std::pair<double, double> least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("least_squares_slope: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("least_squares_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least_squares_slope: abscissae are all equal");
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - my - slope * (x[i] - mx);
    ssr += e * e;
  }
  const double se = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  return {slope, se};
}

double main_term(long h1, long h2, const Window& W1, const Window& W2) {
  require_shifts(h1, h2, "main_term");
  const double lo = std::max(W1.a() / static_cast<double>(h1), W2.a() / static_cast<double>(h2));
  const double hi = std::min(W1.A() / static_cast<double>(h1), W2.A() / static_cast<double>(h2));
  if (!(hi > lo)) return 0.0;
  const double prefactor =
      special::sigma(1, special::gcd(static_cast<std::uint64_t>(h1), static_cast<std::uint64_t>(h2))).get_d();
  if (!W1.smooth() && !W2.smooth()) return prefactor * W1.height() * W2.height() * (hi - lo);
  auto g = [&](double y) { return W1(static_cast<double>(h1) * y) * W2(static_cast<double>(h2) * y); };
  double err = 0.0;
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 25, 1e-10, &err);
  return prefactor * I;
}

std::vector<std::pair<long, long>> diagonal_solutions(long d1, long d2) {
  if (d1 < 1 || d2 < 1) throw DomainError("diagonal_solutions: d1, d2 must be positive");
  if (d1 == d2) throw DomainError("diagonal_solutions: d1 = d2 gives the infinite family r1 = r2");
  // (2 r1 + d1)^2 - (2 r2 + d2)^2 = d1^2 - d2^2 = u v with v = sum > 0
  const long D = d1 * d1 - d2 * d2;
  std::vector<std::pair<long, long>> out;
  for (const auto vv : special::divisors(static_cast<std::uint64_t>(std::labs(D)))) {
    const long v = static_cast<long>(vv);
    const long u = D / v;
    if ((u + v) % 2 != 0) continue;
    const long s1 = (v + u) / 2, s2 = (v - u) / 2;  // 2 r1 + d1, 2 r2 + d2
    if ((s1 - d1) % 2 != 0 || (s2 - d2) % 2 != 0) continue;
    const long r1 = (s1 - d1) / 2, r2 = (s2 - d2) / 2;
    if (r1 >= 1 && r2 >= 1) out.emplace_back(r1, r2);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t variance_required_length(long h1, long h2, const Window& W1, const Window& W2, double X) {
  require_shifts(h1, h2, "variance_required_length");
  require_X(X, "variance_required_length");
  const double top = std::max(W1.A(), W2.A()) * X;
  return static_cast<std::size_t>(std::ceil(top)) + static_cast<std::size_t>(std::max(h1, h2));
}

double variance_lhs_eigen(int k, long h1, long h2, const Window& W1, const Window& W2, double X,
                          std::span<const HeckeEigenform> forms) {
  require_weight(k, "variance_lhs_eigen");
  require_shifts(h1, h2, "variance_lhs_eigen");
  require_X(X, "variance_lhs_eigen");
  CompensatedSum acc;
  for (const auto& f : forms) {
    if (f.k != k) throw DomainError("variance_lhs_eigen: form of the wrong weight");
    if (!f.sym2_l1) throw DomainError("variance_lhs_eigen: form without L(1, sym^2 f)");
    acc += sums::smooth_sum(f, X, h1, W1) * sums::smooth_sum(f, X, h2, W2) / *f.sym2_l1;
  }
  return 2.0 * kPi * kPi / (k - 1.0) * acc.value();
}

VarianceTerms variance_lhs_petersson(int k, long h1, long h2, const Window& W1, const Window& W2, double X,
                                     double tol, special::KloostermanTable* table) {
  require_weight(k, "variance_lhs_petersson");
  require_shifts(h1, h2, "variance_lhs_petersson");
  require_X(X, "variance_lhs_petersson");
  if (!(tol > 0.0)) throw DomainError("variance_lhs_petersson: tol must be positive");
  special::KloostermanTable local;
  special::KloostermanTable& kl = table ? *table : local;

  VarianceTerms out;
  out.lattice_count = !W1.smooth() && !W2.smooth();
  const auto div1 = special::divisors(static_cast<std::uint64_t>(h1));
  const auto div2 = special::divisors(static_cast<std::uint64_t>(h2));

  struct Block {
    long d1, d2;
    std::vector<Line> lines1, lines2;
  };
  std::vector<Block> blocks;
  std::size_t pair_count = 0;
  for (const auto dd1 : div1) {
    for (const auto dd2 : div2) {
      Block b{static_cast<long>(dd1), static_cast<long>(dd2), window_lines(h1, static_cast<long>(dd1), X, W1),
              window_lines(h2, static_cast<long>(dd2), X, W2)};
      pair_count += b.lines1.size() * b.lines2.size();
      blocks.push_back(std::move(b));
    }
  }
  out.pairs = pair_count;

  // diagonal: N1 = N2 exactly
  CompensatedSum diag;
  for (const auto& b : blocks) {
    if (b.d1 == b.d2) {
      if (out.lattice_count) {
        // two sharp cutoffs: count the common r-range
        const long lo = std::max(b.lines1.empty() ? 0 : b.lines1.front().r, b.lines2.empty() ? 0 : b.lines2.front().r);
        const long hi = std::min(b.lines1.empty() ? -1 : b.lines1.back().r, b.lines2.empty() ? -1 : b.lines2.back().r);
        if (hi >= lo) diag += W1.height() * W2.height() * static_cast<double>(hi - lo + 1);
        continue;
      }
      std::size_t j = 0;
      for (const auto& l1 : b.lines1) {
        while (j < b.lines2.size() && b.lines2[j].r < l1.r) ++j;
        if (j < b.lines2.size() && b.lines2[j].r == l1.r) diag += l1.weight * b.lines2[j].weight;
      }
    } else {
      for (const auto& [r1, r2] : diagonal_solutions(b.d1, b.d2)) {
        const double y1 = line_argument(h1, b.d1, r1, X), y2 = line_argument(h2, b.d2, r2, X);
        diag += W1(y1) * W2(y2);
      }
    }
  }
  out.diagonal = diag.value();

  // Kloosterman-Bessel part, one c-cutoff per pair sharing tol evenly
  const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
  const double pair_tol = pair_count ? tol / static_cast<double>(pair_count) : tol;
  DoubleDouble off;
  CompensatedSum tail;
  for (const auto& b : blocks) {
    for (const auto& l1 : b.lines1) {
      const long N1 = l1.r * (l1.r + b.d1);
      for (const auto& l2 : b.lines2) {
        const long N2 = l2.r * (l2.r + b.d2);
        const double w = l1.weight * l2.weight;
        const double root = std::sqrt(static_cast<double>(N1) * static_cast<double>(N2));
        const long c0 = special::bessel_tail_cutoff(k, root, pair_tol / (kTwoPi * std::fabs(w)));
        out.max_c0 = std::max(out.max_c0, c0);
        DoubleDouble csum;
        for (long c = 1; c <= c0; ++c) {
          const double J = special::bessel_j(k - 1, 4.0 * kPi * root / static_cast<double>(c));
          if (J == 0.0) continue;
          csum.add_product(kl(N1, N2, c) / static_cast<double>(c), J);
        }
        off.add_product(sign * kTwoPi * w, csum.value());
        tail += kTwoPi * std::fabs(w) * special::bessel_tail_bound(k, root, c0);
      }
    }
  }
  out.offdiagonal = off.value();
  out.tail_bound = tail.value();
  return out;
}

VarianceReport variance_experiment(const VarianceConfig& cfg, std::span<const HeckeEigenform> forms) {
  require_weight(cfg.k, "variance_experiment");
  require_shifts(cfg.h1, cfg.h2, "variance_experiment");
  if (cfg.xgrid.empty()) throw DomainError("variance_experiment: empty X-grid");
  for (const double X : cfg.xgrid) require_X(X, "variance_experiment");
  if (!(cfg.tail_tol > 0.0) || !(cfg.route_tol > 0.0)) throw DomainError("variance_experiment: tolerances must be positive");

  VarianceReport rep;
  rep.k = cfg.k;
  rep.h1 = cfg.h1;
  rep.h2 = cfg.h2;
  rep.window1 = cfg.W1.descriptor();
  rep.window2 = cfg.W2.descriptor();
  rep.B = main_term(cfg.h1, cfg.h2, cfg.W1, cfg.W2);
  rep.route_tol = cfg.route_tol;
  rep.tail_tol = cfg.tail_tol;
  rep.threads = std::max(1u, cfg.threads);
  rep.lattice_count = !cfg.W1.smooth() && !cfg.W2.smooth();
  rep.eigen_route = cfg.eigen_route && cfg.k <= kEigenMaxWeight;

  std::vector<HeckeEigenform> owned;
  if (rep.eigen_route) {
    const double Xmax = *std::max_element(cfg.xgrid.begin(), cfg.xgrid.end());
    const std::size_t need = variance_required_length(cfg.h1, cfg.h2, cfg.W1, cfg.W2, Xmax);
    if (forms.empty()) {
      const std::size_t N = std::max(need, petersson::norm_required_length(cfg.k, 1e-10));
      owned = qarith::hecke_eigenforms(cfg.k, N);
    } else {
      owned.assign(forms.begin(), forms.end());
    }
    for (auto& f : owned) {
      if (f.table_length() < need) {
        throw InsufficientTable("variance_experiment: eigenvalue table too short for the X-grid", need);
      }
      if (!f.sym2_l1) f.sym2_l1 = petersson::sym2_l1(f, petersson::Sym2Method::NormIdentity, 1e-10);
    }
    rep.forms = owned.size();
  }

  const double allowance =
      static_cast<double>(std::max(cfg.h1, cfg.h2)) * sup_norm(cfg.W1) * sup_norm(cfg.W2);
  special::KloostermanTable table;
  rep.points.resize(cfg.xgrid.size());
  parallel_for(cfg.xgrid.size(), rep.threads, [&](std::size_t i) {
    const double X = cfg.xgrid[i];
    VariancePoint& p = rep.points[i];
    p.X = X;
    const VarianceTerms t = variance_lhs_petersson(cfg.k, cfg.h1, cfg.h2, cfg.W1, cfg.W2, X, cfg.tail_tol, &table);
    p.lhs_petersson = t.value();
    p.diagonal = t.diagonal;
    p.offdiagonal = t.offdiagonal;
    p.tail_bound = t.tail_bound;
    p.max_c0 = t.max_c0;
    p.main_term = rep.B * X;
    p.residual = p.lhs_petersson - p.main_term;
    p.extension_exact = static_cast<double>(cfg.h1) < 2.0 * cfg.W1.a() * X &&
                        static_cast<double>(cfg.h2) < 2.0 * cfg.W2.a() * X;
    p.allowance = p.extension_exact ? 0.0 : allowance;
    if (rep.eigen_route) {
      p.lhs_eigen = variance_lhs_eigen(cfg.k, cfg.h1, cfg.h2, cfg.W1, cfg.W2, X, owned);
      p.route_gap = std::fabs(*p.lhs_eigen - p.lhs_petersson);
    }
  });

  std::vector<double> xs, res, absres;
  for (const auto& p : rep.points) {
    xs.push_back(p.X);
    res.push_back(p.residual);
    absres.push_back(std::fabs(p.residual));
    rep.max_offdiag_plus_tail = std::max(rep.max_offdiag_plus_tail, std::fabs(p.offdiagonal) + p.tail_bound);
    if (p.route_gap && *p.route_gap > p.tail_bound + cfg.route_tol * (1.0 + std::fabs(p.lhs_petersson))) {
      rep.routes_agree = false;
    }
  }
  rep.max_abs_residual = *std::max_element(absres.begin(), absres.end());
  rep.median_abs_residual = median(absres);
  if (xs.size() >= 2 && xs.front() != xs.back()) rep.residual_slope = least_squares_slope(xs, res).first;
  return rep;
}

MeanSquareReport meansquare_experiment(const HeckeEigenform& f, std::span<const long> hs, std::span<const long> xgrid,
                                       unsigned threads) {
  if (hs.empty() || xgrid.empty()) throw DomainError("meansquare_experiment: empty h-list or X-grid");
  for (const long h : hs)
    if (h < 1) throw DomainError("meansquare_experiment: shifts must be positive integers");
  for (const long X : xgrid)
    if (X < 1) throw DomainError("meansquare_experiment: X must be a positive integer");
  const long Xmax = *std::max_element(xgrid.begin(), xgrid.end());
  const long hmax = *std::max_element(hs.begin(), hs.end());
  const auto need = static_cast<std::size_t>(2 * Xmax - 1 + hmax);
  if (f.table_length() < need) throw InsufficientTable("meansquare_experiment: eigenvalue table too short", need);

  MeanSquareReport rep;
  rep.k = f.k;
  rep.hs.assign(hs.begin(), hs.end());
  rep.xgrid.assign(xgrid.begin(), xgrid.end());
  rep.threads = std::max(1u, threads);
  rep.points.resize(hs.size() * xgrid.size());
  parallel_for(hs.size(), rep.threads, [&](std::size_t i) {
    const long h = hs[i];
    // A(x) = sum_{n <= x} lambda(n) lambda(n + h) for x < 2 Xmax
    std::vector<double> A(static_cast<std::size_t>(2 * Xmax), 0.0);
    CompensatedSum run;
    for (long x = 1; x < 2 * Xmax; ++x) {
      run += f[static_cast<std::size_t>(x)] * f[static_cast<std::size_t>(x + h)];
      A[static_cast<std::size_t>(x)] = run.value();
    }
    for (std::size_t j = 0; j < xgrid.size(); ++j) {
      const long X = xgrid[j];
      CompensatedSum sq;
      for (long x = X; x <= 2 * X - 1; ++x) sq += A[static_cast<std::size_t>(x)] * A[static_cast<std::size_t>(x)];
      MeanSquarePoint& p = rep.points[i * xgrid.size() + j];
      p.h = h;
      p.X = X;
      p.sum_squares = sq.value();
      p.V = std::sqrt(p.sum_squares / static_cast<double>(X));
      p.normalized = p.V / std::sqrt(static_cast<double>(h) * static_cast<double>(X));
      p.in_range = static_cast<double>(h) * static_cast<double>(h) <= static_cast<double>(X);
    }
  });

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    std::vector<double> lx, lv;
    for (std::size_t j = 0; j < xgrid.size(); ++j) {
      const auto& p = rep.points[i * xgrid.size() + j];
      if (p.in_range) {
        lo = std::min(lo, p.normalized);
        hi = std::max(hi, p.normalized);
      }
      if (p.V > 0.0) {
        lx.push_back(std::log(static_cast<double>(p.X)));
        lv.push_back(std::log(p.V));
      }
    }
    ExponentFit fit;
    fit.h = hs[i];
    fit.points = lx.size();
    if (lx.size() >= 2) {
      const auto [slope, se] = least_squares_slope(lx, lv);
      fit.exponent = slope;
      fit.standard_error = se;
      fit.lower = slope - 2.0 * se;
      fit.upper = slope + 2.0 * se;
    } else {
      fit.exponent = fit.lower = fit.upper = std::numeric_limits<double>::quiet_NaN();
    }
    rep.fits.push_back(fit);
  }
  rep.band_ratio = hi > 0.0 && lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  return rep;
}

SmoothScanReport smooth_bound_scan(const HeckeEigenform& f, const Window& W, std::span<const long> hs,
                                   std::span<const double> xgrid, unsigned threads) {
  if (hs.empty() || xgrid.empty()) throw DomainError("smooth_bound_scan: empty h-list or X-grid");
  for (const long h : hs)
    if (h < 1) throw DomainError("smooth_bound_scan: shifts must be positive integers");
  for (const double X : xgrid) require_X(X, "smooth_bound_scan");
  SmoothScanReport rep;
  rep.window = W.descriptor();
  rep.threads = std::max(1u, threads);
  rep.points.resize(hs.size() * xgrid.size());
  parallel_for(rep.points.size(), rep.threads, [&](std::size_t idx) {
    const long h = hs[idx / xgrid.size()];
    const double X = xgrid[idx % xgrid.size()];
    SmoothScanPoint& p = rep.points[idx];
    p.h = h;
    p.X = X;
    p.value = sums::smooth_sum(f, X, h, W);
    p.ratio = std::fabs(p.value) / std::pow(X, kScanExponent);
    p.in_range = static_cast<double>(h) <= std::pow(X, 0.45);
  });

  for (std::size_t i = 0; i < hs.size(); ++i) {
    // envelope of the ratio over each decade of X, in-range points only
    std::vector<std::pair<int, double>> env;
    for (std::size_t j = 0; j < xgrid.size(); ++j) {
      const auto& p = rep.points[i * xgrid.size() + j];
      if (!p.in_range) continue;
      const int decade = static_cast<int>(std::floor(std::log10(p.X) + 1e-12));
      if (env.empty() || env.back().first != decade) {
        env.emplace_back(decade, p.ratio);
      } else {
        env.back().second = std::max(env.back().second, p.ratio);
      }
    }
    double growth = 0.0;
    for (std::size_t j = 1; j < env.size(); ++j) {
      const double g = env[j - 1].second > 0.0 ? env[j].second / env[j - 1].second
                                               : (env[j].second > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      growth = std::max(growth, g);
    }
    rep.decade_growth.emplace_back(hs[i], growth);
    if (growth > 2.0) rep.doubling_trend = true;
  }
  return rep;
}

}  // namespace scslab::experiments
