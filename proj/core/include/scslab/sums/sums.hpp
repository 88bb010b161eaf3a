#pragma once

#include <complex>
#include <cstddef>

#include "scslab/qarith/hecke.hpp"
#include "scslab/sums/window.hpp"

namespace scslab::sums {

using qarith::HeckeEigenform;

/// A_f(X, h) = sum_{1 <= n <= floor(X)} lambda(n) lambda(n + h). Needs N >= floor(X) + h.
double sharp_sum(const HeckeEigenform& f, double X, long h);

/// sum_{n_first <= n <= n_last} lambda(n) lambda(n + h), the building block of sharp_sum.
double sharp_sum_range(const HeckeEigenform& f, long h, long n_first, long n_last);

/// B_f(X, h) = sum_{n + h <= X} lambda(n + h) lambda(n) (n / (n + h))^((k-1)/2). Needs N >= floor(X).
double weighted_sum(const HeckeEigenform& f, double X, long h);

/// A_f^W(X, h) = sum_n lambda(n) lambda(n + h) W((n + h/2) / X) over a_W X <= n + h/2 <= A_W X.
double smooth_sum(const HeckeEigenform& f, double X, long h, const Window& W);

/// Inclusive n-range [first, last] where W((n + h/2) / X) may be nonzero; empty if first > last.
struct IndexRange {
  long first = 1;
  long last = 0;
};
IndexRange smooth_sum_range(double X, long h, const Window& W);

struct DirichletResult {
  std::complex<double> value;
  /// Rigorous bound on the omitted terms n > N_terms (infinite if unavailable).
  double tail_bound = 0.0;
  std::size_t terms = 0;
};

/// Partial sum of D_f(s, h) = sum_{m - n = h} lambda(m) lambda(n) (nm)^((k-1)/2) / (n + m + h)^(s + k - 1)
/// over n <= N_terms with a tail bound from d(n) <= C(delta) n^delta. Only the half-plane of
/// absolute convergence Re s > 1 is supported; continuation is out of scope.
DirichletResult dirichlet_series(const HeckeEigenform& f, std::complex<double> s, long h, std::size_t N_terms);

/// sum_{n <= X} lambda(n)^2. Needs N >= floor(X).
double rankin_statistic(const HeckeEigenform& f, double X);

}  // namespace scslab::sums
