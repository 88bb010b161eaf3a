#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "scslab/common.hpp"
#include "scslab/qarith/hecke.hpp"
#include "scslab/special/kloosterman.hpp"

namespace scslab::petersson {

using qarith::HeckeEigenform;

/// Fundamental-domain integral I(f) = int_F |h|^2 dx dy / y^2 of the normalized
/// function h = (4 pi)^(k/2) Gamma(k)^(-1/2) y^(k/2) f, so that
/// L(1, sym^2 f) = (pi / 2) I(f) and <f, f> = Gamma(k) I(f) / (4 pi)^k.
/// The part y >= 1 is integrated in x exactly (Parseval, incomplete gamma);
/// the rest by composite Gauss-Legendre panels, doubled until stable to tol.
struct NormIntegral {
  double value = 0.0;
  double quadrature_change = 0.0;  // change at the last panel doubling
  int panels = 0;
  std::size_t terms = 0;           // q-expansion terms used
};
NormIntegral normalized_norm_integral(const HeckeEigenform& f, double tol, int min_panels = 1);

/// Table length needed for the q-expansion truncation error to stay below tol on y >= sqrt(3)/2.
std::size_t norm_required_length(int k, double tol);

/// log <f, f> over the standard fundamental domain.
double log_petersson_norm(const HeckeEigenform& f, double tol);
/// <f, f>; overflows to infinity for large weights, use log_petersson_norm there.
double petersson_norm(const HeckeEigenform& f, double tol);

enum class Sym2Method { NormIdentity, SmoothedSeries, RankinSlope };
std::string to_string(Sym2Method m);

/// L(1, sym^2 f) by one route:
///   NormIdentity   (pi/2) (4 pi)^k <f, f> / Gamma(k)
///   SmoothedSeries sum a(n)/n e^(-n/T) over the Euler-product coefficients of
///                  L(s, sym^2 f), corrected by the residues at s = 0 and s = -2
///                  obtained from the functional equation
///   RankinSlope    zeta(2) times the least-squares slope of sum_{n <= X} lambda(n)^2
///                  on a geometric grid reaching the end of the table
double sym2_l1(const HeckeEigenform& f, Sym2Method method, double tol);

/// Smoothing length used by the SmoothedSeries route for a table of length N.
double smoothed_series_scale(std::size_t N);

struct Sym2Triangulation {
  double norm_identity = 0.0;
  double smoothed_series = 0.0;
  double rankin_slope = 0.0;
  /// max pairwise |a - b| / min(|a|, |b|)
  double spread = 0.0;
  double consensus() const { return norm_identity; }
};

/// Thrown when the three routes disagree beyond 10 tol; carries all three values.
class Sym2Disagreement : public NumericalFailure {
 public:
  explicit Sym2Disagreement(const Sym2Triangulation& t);
  const Sym2Triangulation& values() const noexcept { return values_; }

 private:
  Sym2Triangulation values_;
};

/// All three routes; throws Sym2Disagreement if their spread exceeds 10 tol.
Sym2Triangulation sym2_l1_triangulate(const HeckeEigenform& f, double tol);

/// (2 pi^2 / (k - 1)) sum_f lambda_f(n1) lambda_f(n2) / L(1, sym^2 f).
/// Every form must carry sym2_l1; throws DomainError otherwise.
double trace_formula_lhs(int k, long n1, long n2, std::span<const HeckeEigenform> forms);

struct TraceFormulaResult {
  double diagonal = 0.0;
  double offdiagonal = 0.0;
  double tail_bound = 0.0;
  long c0 = 0;
  double total() const { return diagonal + offdiagonal; }
};

/// delta_{n1,n2} + 2 pi (-1)^(k/2) sum_{c <= c0} S(n1, n2; c) / c J_{k-1}(4 pi sqrt(n1 n2) / c),
/// with the tail past c0 bounded by the J-Bessel majorant.
TraceFormulaResult trace_formula_rhs(int k, long n1, long n2, long c0, special::KloostermanTable* table = nullptr);
/// Same with c0 chosen as the smallest cutoff whose tail bound is <= tol.
TraceFormulaResult trace_formula_rhs_auto(int k, long n1, long n2, double tol,
                                          special::KloostermanTable* table = nullptr);

}  // namespace scslab::petersson
