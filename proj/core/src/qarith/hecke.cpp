#include "scslab/qarith/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <gmpxx.h>

#include "scslab/common.hpp"
#include "scslab/special/arith.hpp"

namespace scslab::qarith {
namespace {

using MpfMatrix = std::vector<std::vector<mpf_class>>;

constexpr double kCollisionGap = 1e-6;
constexpr int kMaxNewtonSteps = 80;

/// pi to the given precision by Machin's formula.
mpf_class machin_pi(mp_bitcnt_t prec) {
  auto arctan_inv = [prec](unsigned long x) {
    mpf_class sum(0, prec), term(1, prec), x2(x * x, prec), eps(1, prec);
    mpf_div_2exp(eps.get_mpf_t(), eps.get_mpf_t(), prec + 8);
    term /= x;
    for (unsigned long n = 0;; ++n) {
      const mpf_class t = term / (2 * n + 1);
      if (abs(t) < eps) break;
      if (n % 2 == 0) {
        sum += t;
      } else {
        sum -= t;
      }
      term /= x2;
    }
    return sum;
  };
  mpf_class pi(0, prec);
  pi = 16 * arctan_inv(5) - 4 * arctan_inv(239);
  return pi;
}

/// m^((k-1)/2) in multiprecision.
mpf_class half_power(unsigned long m, int k, mp_bitcnt_t prec) {
  mpf_class r(m, prec);
  mpf_sqrt(r.get_mpf_t(), r.get_mpf_t());
  mpf_pow_ui(r.get_mpf_t(), r.get_mpf_t(), static_cast<unsigned long>(k - 1));
  return r;
}

MpfMatrix to_mpf(const ExactMatrix& m, const mpf_class& scale, mp_bitcnt_t prec) {
  MpfMatrix out(m.rows, std::vector<mpf_class>(m.cols, mpf_class(0, prec)));
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      mpf_class e(m(i, j), prec);
      out[i][j] = e * scale;
    }
  }
  return out;
}

/// Solves J x = b in place by Gaussian elimination with partial pivoting.
std::vector<mpf_class> solve(MpfMatrix J, std::vector<mpf_class> b, mp_bitcnt_t prec) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (abs(J[r][col]) > abs(J[piv][col])) piv = r;
    }
    if (J[piv][col] == 0) throw NumericalFailure("hecke_eigenforms: singular Newton system");
    std::swap(J[piv], J[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const mpf_class f = J[r][col] / J[col][col];
      if (f == 0) continue;
      for (std::size_t c = col; c < n; ++c) J[r][c] -= f * J[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<mpf_class> x(n, mpf_class(0, prec));
  for (std::size_t i = n; i-- > 0;) {
    mpf_class s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= J[i][c] * x[c];
    x[i] = s / J[i][i];
  }
  return x;
}

struct EigenPair {
  mpf_class mu;
  std::vector<mpf_class> v;  // v[0] = 1
};

/// Newton iteration on (A - mu I) v = 0 with v_1 = 1 from a double start.
EigenPair refine(const MpfMatrix& A, double mu0, const std::vector<double>& v0, mp_bitcnt_t prec) {
  const std::size_t d = A.size();
  EigenPair ep{mpf_class(mu0, prec), std::vector<mpf_class>(d, mpf_class(0, prec))};
  for (std::size_t i = 0; i < d; ++i) ep.v[i] = mpf_class(v0[i], prec);
  ep.v[0] = 1;
  if (d == 1) {
    ep.mu = A[0][0];
    return ep;
  }
  mpf_class tol(1, prec);
  mpf_div_2exp(tol.get_mpf_t(), tol.get_mpf_t(), prec - 24);
  for (int step = 0; step < kMaxNewtonSteps; ++step) {
    // residual r = A v - mu v; unknowns (mu, v_2..v_d)
    std::vector<mpf_class> r(d, mpf_class(0, prec));
    for (std::size_t i = 0; i < d; ++i) {
      mpf_class s(0, prec);
      for (std::size_t j = 0; j < d; ++j) s += A[i][j] * ep.v[j];
      r[i] = ep.mu * ep.v[i] - s;
    }
    MpfMatrix J(d, std::vector<mpf_class>(d, mpf_class(0, prec)));
    for (std::size_t i = 0; i < d; ++i) {
      J[i][0] = -ep.v[i];
      for (std::size_t j = 1; j < d; ++j) J[i][j] = A[i][j] - (i == j ? ep.mu : mpf_class(0, prec));
    }
    const auto delta = solve(std::move(J), std::move(r), prec);
    ep.mu += delta[0];
    mpf_class vnorm(1, prec), dnorm = abs(delta[0]) / (1 + abs(ep.mu));
    for (std::size_t j = 1; j < d; ++j) {
      ep.v[j] += delta[j];
      if (abs(ep.v[j]) > vnorm) vnorm = abs(ep.v[j]);
    }
    for (std::size_t j = 1; j < d; ++j) {
      const mpf_class rel = abs(delta[j]) / vnorm;
      if (rel > dnorm) dnorm = rel;
    }
    if (dnorm < tol) return ep;
  }
  throw NumericalFailure("hecke_eigenforms: Newton refinement did not converge");
}

/// Double-precision eigen-decomposition used as the Newton start.
void double_start(const MpfMatrix& A, std::vector<double>& mus, std::vector<std::vector<double>>& vecs) {
  const std::size_t d = A.size();
  Eigen::MatrixXd M(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = A[i][j].get_d();
    }
  }
  if (!M.allFinite()) throw NumericalFailure("hecke_eigenforms: scaled Hecke matrix overflows double");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
  if (es.info() != Eigen::Success) throw NumericalFailure("hecke_eigenforms: double eigensolver failed");
  mus.resize(d);
  vecs.assign(d, std::vector<double>(d));
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    mus[c] = es.eigenvalues()(col).real();
    const auto lead = es.eigenvectors()(0, col);
    for (std::size_t i = 0; i < d; ++i) {
      vecs[c][i] = (es.eigenvectors()(static_cast<Eigen::Index>(i), col) / lead).real();
    }
  }
}

/// D^{-1} A D with D = diag(i^((k-1)/2)).
MpfMatrix balanced(const MpfMatrix& A, int k, mp_bitcnt_t prec) {
  const std::size_t d = A.size();
  std::vector<mpf_class> dscale(d, mpf_class(0, prec));
  for (std::size_t i = 0; i < d; ++i) dscale[i] = half_power(i + 1, k, prec);
  MpfMatrix B = A;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) B[i][j] = A[i][j] * dscale[j] / dscale[i];
  }
  return B;
}

bool separated(std::vector<double> mus) {
  std::sort(mus.begin(), mus.end());
  double scale = 1.0;
  for (double m : mus) scale = std::max(scale, std::fabs(m));
  for (std::size_t i = 1; i < mus.size(); ++i) {
    if (mus[i] - mus[i - 1] < kCollisionGap * scale) return false;
  }
  return true;
}

}  // namespace

double HeckeEigenform::at(std::size_t n) const {
  if (n >= lambda.size()) throw InsufficientTable("eigenvalue table too short", n);
  return lambda[n];
}

HeckeEigenform HeckeEigenform::truncated(std::size_t N) const {
  if (N > table_length()) throw InsufficientTable("eigenvalue table too short", N);
  HeckeEigenform g = *this;
  g.lambda.resize(N + 1);
  return g;
}

std::vector<HeckeEigenform> hecke_eigenforms(int k, std::size_t N) {
  if (k % 2 != 0 || k < 4) throw DomainError("hecke_eigenforms: weight must be even and >= 4");
  if (N < 2) throw DomainError("hecke_eigenforms: table length must be at least 2");
  const int d = cusp_form_dimension(k);
  if (d == 0) return {};
  MonomialCache cache(std::max<std::size_t>(N, 3 * static_cast<std::size_t>(d)));
  auto forms = hecke_eigenforms(k, cache);
  for (auto& f : forms) f.lambda.resize(N + 1);
  return forms;
}

std::vector<HeckeEigenform> hecke_eigenforms(int k, MonomialCache& cache) {
  if (k % 2 != 0 || k < 4) throw DomainError("hecke_eigenforms: weight must be even and >= 4");
  const int di = cusp_form_dimension(k);
  if (di == 0) return {};
  const auto d = static_cast<std::size_t>(di);
  const std::size_t N = cache.order();
  if (N < std::max<std::size_t>(2, 3 * d)) {
    throw InsufficientTable("hecke_eigenforms: truncation too small for T_2 and T_3", std::max<std::size_t>(2, 3 * d));
  }
  const auto basis = victor_miller_basis(k, cache);

  std::size_t basis_bits = 0;
  for (const auto& b : basis) basis_bits = std::max(basis_bits, b.max_bits());
  // working precision covers the cancellation between basis elements
  const mp_bitcnt_t prec = static_cast<mp_bitcnt_t>(basis_bits + 64 * d + 128);

  const ExactMatrix t2 = hecke_matrix(k, 2, basis);
  mpf_class s2 = 1 / half_power(2, k, prec);
  MpfMatrix A = to_mpf(t2, s2, prec);
  std::vector<double> mus;
  std::vector<std::vector<double>> vecs;
  double_start(balanced(A, k, prec), mus, vecs);
  if (!separated(mus)) {
    const ExactMatrix t3 = hecke_matrix(k, 3, basis);
    const mpf_class s3 = machin_pi(prec) / half_power(3, k, prec);
    const MpfMatrix B = to_mpf(t3, s3, prec);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) A[i][j] += B[i][j];
    }
    double_start(balanced(A, k, prec), mus, vecs);
    if (!separated(mus)) {
      throw NumericalFailure("hecke_eigenforms: T_2 + pi T_3 does not separate the eigenspaces of weight " +
                             std::to_string(k));
    }
  }

  // balance with D = diag(i^((k-1)/2)) so coordinates become lambda(1..d)
  std::vector<mpf_class> dscale(d, mpf_class(0, prec));
  for (std::size_t i = 0; i < d; ++i) dscale[i] = half_power(i + 1, k, prec);
  const MpfMatrix As = balanced(A, k, prec);

  std::vector<HeckeEigenform> forms;
  forms.reserve(d);
  mpf_class acc(0, prec), term(0, prec);
  const mp_bitcnt_t out_prec = 128;
  for (std::size_t c = 0; c < d; ++c) {
    EigenPair ep = refine(As, mus[c], vecs[c], prec);
    for (std::size_t j = 0; j < d; ++j) ep.v[j] *= dscale[j];
    HeckeEigenform f;
    f.k = k;
    f.lambda.assign(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
      acc = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const mpz_class& coeff = basis[j][n];
        if (coeff == 0) continue;
        mpf_set_z(term.get_mpf_t(), coeff.get_mpz_t());
        acc += term * ep.v[j];
      }
      mpf_class a(acc, out_prec);
      a /= half_power(n, k, out_prec);
      f.lambda[n] = a.get_d();
    }
    f.lambda[1] = 1.0;
    forms.push_back(std::move(f));
  }
  std::sort(forms.begin(), forms.end(),
            [](const HeckeEigenform& a, const HeckeEigenform& b) { return a.lambda[2] < b.lambda[2]; });
  return forms;
}

EigenformDiagnostics validate(const HeckeEigenform& f, std::size_t max_product) {
  EigenformDiagnostics diag;
  const std::size_t N = f.table_length();
  if (max_product > N) throw InsufficientTable("validate: table shorter than max product", max_product);
  diag.lambda_one_error = std::fabs(f.lambda[1] - 1.0);
  const auto dcount = special::divisor_count_table(N);
  diag.divisor_excess = -1e300;
  for (std::size_t n = 1; n <= N; ++n) {
    diag.divisor_excess = std::max(diag.divisor_excess, std::fabs(f.lambda[n]) - dcount[n]);
  }
  diag.prime_excess = -2.0;
  for (std::uint32_t p : special::primes_up_to(static_cast<std::uint32_t>(N))) {
    diag.prime_excess = std::max(diag.prime_excess, std::fabs(f.lambda[p]) - 2.0);
  }
  for (std::size_t m = 1; m * m <= max_product; ++m) {
    for (std::size_t n = m; m * n <= max_product; ++n) {
      const std::uint64_t g = special::gcd(m, n);
      double rhs = 0.0;
      if (g == 1) {
        rhs = f.lambda[m * n];
      } else {
        for (std::uint64_t dv : special::divisors(g)) rhs += f.lambda[m * n / (dv * dv)];
      }
      diag.hecke_residual = std::max(diag.hecke_residual, std::fabs(f.lambda[m] * f.lambda[n] - rhs));
    }
  }
  return diag;
}

}  // namespace scslab::qarith
