#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scslab/qarith/hecke.hpp"
#include "scslab/special/kloosterman.hpp"
#include "scslab/sums/window.hpp"

namespace scslab::experiments {

using qarith::HeckeEigenform;
using sums::Window;

/// Largest weight for which variance_experiment runs the eigenform route by default.
inline constexpr int kEigenMaxWeight = 60;

/// B_{h1,h2}(W1, W2) = sigma_1(gcd(h1, h2)) int_0^inf W1(h1 y) W2(h2 y) dy.
/// Adaptive Gauss-Kronrod to 1e-10; exact for two sharp cutoffs; 0 for disjoint supports.
double main_term(long h1, long h2, const Window& W1, const Window& W2);

/// All positive (r1, r2) with r1 (r1 + d1) = r2 (r2 + d2), ordered by r1, from the
/// factorizations u v = d1^2 - d2^2. Throws DomainError if d1 = d2 or either is < 1.
std::vector<std::pair<long, long>> diagonal_solutions(long d1, long d2);

/// Table length needed by variance_lhs_eigen: ceil(A_W X) + max(h1, h2) over both windows.
std::size_t variance_required_length(long h1, long h2, const Window& W1, const Window& W2, double X);

/// (2 pi^2 / (k - 1)) sum_f A_f^{W1}(X, h1) A_f^{W2}(X, h2) / L(1, sym^2 f).
/// Every form must have weight k and carry sym2_l1.
double variance_lhs_eigen(int k, long h1, long h2, const Window& W1, const Window& W2, double X,
                          std::span<const HeckeEigenform> forms);

struct VarianceTerms {
  double diagonal = 0.0;     // d1 = d2 lines plus sporadic d1 != d2 solutions
  double offdiagonal = 0.0;  // Kloosterman-Bessel sum up to the per-pair cutoffs
  double tail_bound = 0.0;   // certified bound on the omitted c-range
  long max_c0 = 0;
  std::size_t pairs = 0;     // (r1, r2) pairs with nonzero weight
  bool lattice_count = false;  // diagonal by integer counting (two sharp cutoffs)
  double value() const { return diagonal + offdiagonal; }
};

/// The same average through the Hecke relations and the trace formula, without eigenforms.
/// Each (r1, r2) pair gets its own c-cutoff; the summed tail is at most tol.
VarianceTerms variance_lhs_petersson(int k, long h1, long h2, const Window& W1, const Window& W2, double X,
                                     double tol, special::KloostermanTable* table = nullptr);

struct VarianceConfig {
  int k = 12;
  long h1 = 1, h2 = 1;
  Window W1{sums::WindowKind::SmoothBump, 1.0, 2.0};
  Window W2{sums::WindowKind::SmoothBump, 1.0, 2.0};
  std::vector<double> xgrid;
  double tail_tol = 1e-12;
  /// Declared route tolerance: |eigen - petersson| <= tail + route_tol (1 + |value|).
  double route_tol = 1e-3;
  /// Run the eigenform route (only honoured for k <= kEigenMaxWeight).
  bool eigen_route = true;
  unsigned threads = 1;
};

struct VariancePoint {
  double X = 0.0;
  std::optional<double> lhs_eigen;
  double lhs_petersson = 0.0;
  double diagonal = 0.0;
  double offdiagonal = 0.0;
  double tail_bound = 0.0;
  double main_term = 0.0;  // B X
  double residual = 0.0;   // lhs_petersson - B X
  std::optional<double> route_gap;
  /// h_i < 2 a_{W_i} X for both windows, so the r-sum extends to all of Z exactly.
  bool extension_exact = true;
  /// Extra slack max(h1, h2) ||W1||_inf ||W2||_inf recorded when the guard fails.
  double allowance = 0.0;
  long max_c0 = 0;
};

struct VarianceReport {
  int k = 0;
  long h1 = 0, h2 = 0;
  std::string window1, window2;
  double B = 0.0;
  bool eigen_route = false;
  bool lattice_count = false;
  double route_tol = 0.0;
  double tail_tol = 0.0;
  std::vector<VariancePoint> points;
  double residual_slope = 0.0;   // least-squares slope of residual against X
  double max_abs_residual = 0.0;
  double median_abs_residual = 0.0;
  double max_offdiag_plus_tail = 0.0;
  bool routes_agree = true;
  std::size_t forms = 0;
  unsigned threads = 1;
};

/// Runs the grid. `forms` may supply eigenforms for the eigen route; when empty and the
/// route is enabled they are computed here (L-values by the norm identity).
VarianceReport variance_experiment(const VarianceConfig& cfg, std::span<const HeckeEigenform> forms = {});

struct MeanSquarePoint {
  long h = 0;
  long X = 0;
  double V = 0.0;           // (X^-1 sum_{x=X}^{2X-1} A_f(x, h)^2)^(1/2)
  double sum_squares = 0.0; // sum_{x=X}^{2X-1} A_f(x, h)^2
  double normalized = 0.0;  // V / (h^(1/2) X^(1/2))
  bool in_range = true;     // h <= X^(1/2)
};

struct ExponentFit {
  long h = 0;
  double exponent = 0.0;
  double standard_error = 0.0;
  double lower = 0.0, upper = 0.0;  // exponent -/+ 2 standard errors
  std::size_t points = 0;
};

struct MeanSquareReport {
  int k = 0;
  std::vector<long> hs;
  std::vector<long> xgrid;
  std::vector<MeanSquarePoint> points;  // h-major, then grid order
  std::vector<ExponentFit> fits;
  /// max / min of `normalized` over in-range points
  double band_ratio = 0.0;
  unsigned threads = 1;
};

/// Mean-square statistic of the sharp sums with a log-log least-squares exponent per h.
/// Needs a table of length >= 2 max(X) - 1 + max(h).
MeanSquareReport meansquare_experiment(const HeckeEigenform& f, std::span<const long> hs, std::span<const long> xgrid,
                                       unsigned threads = 1);

struct SmoothScanPoint {
  long h = 0;
  double X = 0.0;
  double value = 0.0;  // A_f^W(X, h)
  double ratio = 0.0;  // |A_f^W(X, h)| / X^0.55
  bool in_range = true;  // h <= X^0.45
};

struct SmoothScanReport {
  std::string window;
  std::vector<SmoothScanPoint> points;  // h-major, then grid order
  /// Largest ratio between the ratio envelopes of consecutive decades, per h.
  std::vector<std::pair<long, double>> decade_growth;
  bool doubling_trend = false;
  unsigned threads = 1;
};

inline constexpr double kScanExponent = 0.55;

SmoothScanReport smooth_bound_scan(const HeckeEigenform& f, const Window& W, std::span<const long> hs,
                                   std::span<const double> xgrid, unsigned threads = 1);

/// Unweighted least-squares slope of y on x; also the standard error of the slope.
std::pair<double, double> least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace scslab::experiments
