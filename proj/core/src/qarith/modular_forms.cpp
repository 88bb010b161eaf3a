#include "scslab/qarith/modular_forms.hpp"

#include <string>

#include "scslab/common.hpp"
#include "scslab/special/arith.hpp"

namespace scslab::qarith {

QSeries delta_qexp(std::size_t N) {
  if (N < 1) throw DomainError("delta_qexp: N must be at least 1");
  // prod (1 - q^n)^3 = sum_j (-1)^j (2j + 1) q^{j(j+1)/2}
  const std::size_t M = N - 1;
  QSeries eta3(M);
  for (std::size_t j = 0; j * (j + 1) / 2 <= M; ++j) {
    const long v = static_cast<long>(2 * j + 1);
    eta3[j * (j + 1) / 2] = (j % 2 == 0) ? v : -v;
  }
  const QSeries eta24 = eta3.square().square().square();
  QSeries out(N);
  for (std::size_t n = 1; n <= N; ++n) out[n] = eta24[n - 1];
  return out;
}

QSeries eisenstein_qexp(int weight, std::size_t N) {
  long factor = 0;
  unsigned e = 0;
  if (weight == 4) {
    factor = 240;
    e = 3;
  } else if (weight == 6) {
    factor = -504;
    e = 5;
  } else {
    throw DomainError("eisenstein_qexp: unsupported weight " + std::to_string(weight));
  }
  auto s = special::sigma_table(e, N);
  s[0] = 1;
  for (std::size_t n = 1; n <= N; ++n) s[n] *= factor;
  return QSeries(std::move(s));
}

int cusp_form_dimension(int k) {
  if (k < 0 || k % 2 != 0) return 0;
  if (k == 2) return 0;
  const int base = k / 12;
  return (k % 12 == 2) ? base - 1 : base;
}

const QSeries& MonomialCache::delta_power(int c) {
  std::lock_guard lock(mutex_);
  if (auto it = delta_powers_.find(c); it != delta_powers_.end()) return it->second;
  QSeries value = one(order_);
  if (c >= 1) {
    if (!delta_powers_.count(1)) delta_powers_.emplace(1, delta_qexp(std::max<std::size_t>(order_, 1)).truncated(order_));
    // extend from the largest cached power below c
    int from = 1;
    for (const auto& [p, s] : delta_powers_) {
      if (p <= c) from = p;
    }
    value = delta_powers_.at(from);
    const QSeries& delta = delta_powers_.at(1);
    for (int p = from + 1; p <= c; ++p) {
      value = value * delta;
      delta_powers_.emplace(p, value);
    }
  }
  return delta_powers_.emplace(c, std::move(value)).first->second;
}

const QSeries& MonomialCache::eisenstein_monomial(int weight) {
  if (weight < 0 || weight % 2 != 0 || weight == 2) {
    throw DomainError("eisenstein_monomial: no monomial of weight " + std::to_string(weight));
  }
  std::lock_guard lock(mutex_);
  if (auto it = eisenstein_.find(weight); it != eisenstein_.end()) return it->second;
  if (weight == 0) return eisenstein_.emplace(0, one(order_)).first->second;
  if (weight == 4 || weight == 6) {
    return eisenstein_.emplace(weight, eisenstein_qexp(weight, order_)).first->second;
  }
  // weights 8, 10, 12, ... all step down by 4 to a cached or base monomial
  std::vector<int> chain;
  int w = weight;
  while (w > 6 && !eisenstein_.count(w)) {
    chain.push_back(w);
    w -= 4;
  }
  if (!eisenstein_.count(w)) eisenstein_.emplace(w, eisenstein_qexp(w, order_));
  if (!eisenstein_.count(4)) eisenstein_.emplace(4, eisenstein_qexp(4, order_));
  const QSeries& e4 = eisenstein_.at(4);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    eisenstein_.emplace(*it, eisenstein_.at(*it - 4) * e4);
  }
  return eisenstein_.at(weight);
}

std::vector<QSeries> victor_miller_basis(int k, std::size_t N) {
  MonomialCache cache(N);
  return victor_miller_basis(k, cache);
}

std::vector<QSeries> victor_miller_basis(int k, MonomialCache& cache) {
  if (k % 2 != 0 || k < 4) throw DomainError("victor_miller_basis: weight must be even and >= 4");
  const int d = cusp_form_dimension(k);
  if (d == 0) return {};
  const std::size_t N = cache.order();
  if (N < static_cast<std::size_t>(d)) {
    throw InsufficientTable("victor_miller_basis: truncation below dim S_k", static_cast<std::size_t>(d));
  }
  // g_c = Delta^c E_{k - 12c} = q^c + O(q^{c+1}) for c = 1..d
  std::vector<QSeries> basis;
  basis.reserve(static_cast<std::size_t>(d));
  for (int c = 1; c <= d; ++c) {
    const QSeries& dc = cache.delta_power(c);
    const QSeries& ew = cache.eisenstein_monomial(k - 12 * c);
    basis.push_back(k - 12 * c == 0 ? dc : dc * ew);
  }
  // back-substitute to reach the identity on q^1..q^d
  for (int i = d - 1; i >= 0; --i) {
    for (int j = i + 1; j < d; ++j) {
      const mpz_class c = basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)];
      basis[static_cast<std::size_t>(i)].submul(c, basis[static_cast<std::size_t>(j)]);
    }
  }
  return basis;
}

mpq_class ExactMatrix::trace() const {
  mpq_class t = 0;
  for (std::size_t i = 0; i < std::min(rows, cols); ++i) t += (*this)(i, i);
  return t;
}

bool ExactMatrix::is_identity() const {
  if (rows != cols) return false;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
    }
  }
  return true;
}

mpz_class hecke_coefficient(int k, unsigned m, const QSeries& f, std::size_t n) {
  if (n == 0) {
    // constant term of T_m f: sigma_{k-1}(m) a_f(0)
    return special::sigma(static_cast<unsigned>(k - 1), m) * f[0];
  }
  const std::uint64_t g = special::gcd(m, n);
  mpz_class total = 0;
  mpz_class power;
  for (std::uint64_t dv : special::divisors(g)) {
    const std::size_t idx = static_cast<std::size_t>(m) * n / (dv * dv);
    if (idx > f.order()) {
      throw InsufficientTable("hecke_coefficient: series too short", idx);
    }
    mpz_ui_pow_ui(power.get_mpz_t(), dv, static_cast<unsigned long>(k - 1));
    mpz_addmul(total.get_mpz_t(), power.get_mpz_t(), f[idx].get_mpz_t());
  }
  return total;
}

ExactMatrix hecke_matrix(int k, unsigned m, std::span<const QSeries> basis) {
  if (m == 0) throw DomainError("hecke_matrix: operator index must be positive");
  const std::size_t d = basis.size();
  ExactMatrix M(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    if (basis[j].order() < m * d) {
      throw InsufficientTable("hecke_matrix: basis truncation too small for T_" + std::to_string(m), m * d);
    }
    for (std::size_t i = 0; i < d; ++i) {
      M(i, j) = mpq_class(hecke_coefficient(k, m, basis[j], i + 1));
    }
  }
  return M;
}

std::size_t rational_rank(const std::vector<std::vector<mpz_class>>& rows) {
  if (rows.empty()) return 0;
  std::vector<std::vector<mpq_class>> a;
  for (const auto& r : rows) a.emplace_back(r.begin(), r.end());
  const std::size_t n_rows = a.size(), n_cols = a[0].size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n_cols && rank < n_rows; ++col) {
    std::size_t piv = rank;
    while (piv < n_rows && a[piv][col] == 0) ++piv;
    if (piv == n_rows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = rank + 1; r < n_rows; ++r) {
      if (a[r][col] == 0) continue;
      const mpq_class f = a[r][col] / a[rank][col];
      for (std::size_t c = col; c < n_cols; ++c) a[r][c] -= f * a[rank][c];
    }
    ++rank;
  }
  return rank;
}

}  // namespace scslab::qarith
