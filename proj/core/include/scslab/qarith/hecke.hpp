#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "scslab/qarith/modular_forms.hpp"

namespace scslab::qarith {

/// A normalized Hecke eigenform of level one, stored as its eigenvalue table
/// lambda(n) = a_f(n) / n^((k-1)/2), 1 <= n <= N (index 0 holds 0).
struct HeckeEigenform {
  int k = 0;
  std::vector<double> lambda;
  std::optional<double> petersson_norm;
  std::optional<double> sym2_l1;

  std::size_t table_length() const noexcept { return lambda.empty() ? 0 : lambda.size() - 1; }
  /// lambda(n) with a bounds check; throws InsufficientTable past the end.
  double at(std::size_t n) const;
  double operator[](std::size_t n) const noexcept { return lambda[n]; }

  /// Copy restricted to n <= N.
  HeckeEigenform truncated(std::size_t N) const;
};

/// Worst-case deviations found by validate().
struct EigenformDiagnostics {
  double hecke_residual = 0.0;    // max |lambda(m)lambda(n) - sum_{d|(m,n)} lambda(mn/d^2)|
  double divisor_excess = 0.0;    // max (|lambda(n)| - d(n)), may be negative
  double prime_excess = 0.0;      // max (|lambda(p)| - 2) over primes p
  double lambda_one_error = 0.0;  // |lambda(1) - 1|
};

/// Normalized eigenforms of S_k with tables to N, sorted by lambda(2) ascending.
/// T_2 is diagonalized in double precision and each eigenpair refined by Newton
/// iteration against the exact matrix in multiprecision; if T_2 has a near
/// repeated eigenvalue T_2 + pi T_3 is used instead. Returns an empty list when
/// dim S_k = 0. Throws NumericalFailure if eigenspaces cannot be separated.
std::vector<HeckeEigenform> hecke_eigenforms(int k, std::size_t N);
std::vector<HeckeEigenform> hecke_eigenforms(int k, MonomialCache& cache);

/// Checks the Hecke relations for all m n <= max_product and the Deligne bounds
/// for all n in the table.
EigenformDiagnostics validate(const HeckeEigenform& f, std::size_t max_product);

}  // namespace scslab::qarith
