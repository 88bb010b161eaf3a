#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <numeric>
#include <thread>
#include <vector>

#include "scslab/common.hpp"
#include "scslab/special/arith.hpp"
#include "scslab/special/bessel.hpp"
#include "scslab/special/kloosterman.hpp"

using namespace scslab;
using namespace scslab::special;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

double oracle_j(int nu, double x) {
  return static_cast<double>(boost::math::cyl_bessel_j(Big(nu), Big(x)));
}

long double naive_kloosterman(long m, long n, long c, long double* imag) {
  std::complex<long double> s = 0;
  for (long x = 0; x < c; ++x) {
    if (std::gcd(x, c) != 1 && c != 1) continue;
    long xi = 0;
    while ((x * xi) % c != 1 % c) ++xi;
    const long double t = 2.0L * 3.14159265358979323846264338327950288L * ((m * x + n * xi) % c) / c;
    s += std::complex<long double>(std::cos(t), std::sin(t));
  }
  if (imag) *imag = s.imag();
  return s.real();
}

}  // namespace

TEST(Arith, SigmaAndDivisors) {
  EXPECT_EQ(sigma(1, 1), 1);
  EXPECT_EQ(sigma(1, 6), 12);
  EXPECT_EQ(sigma(3, 2), 9);
  EXPECT_EQ(sigma(0, 12), 6);
  EXPECT_THROW(sigma(1, 0), DomainError);
  EXPECT_EQ(divisor_count(1), 1u);
  EXPECT_EQ(divisor_count(12), 6u);
  for (std::uint64_t p : {2u, 3u, 97u, 7919u}) EXPECT_EQ(divisor_count(p), 2u);
  EXPECT_THROW(divisor_count(0), DomainError);
  const auto table = divisor_count_table(500);
  const auto s5 = sigma_table(5, 100);
  for (std::uint64_t n = 1; n <= 500; ++n) {
    std::uint64_t brute = 0;
    for (std::uint64_t d = 1; d <= n; ++d) brute += n % d == 0;
    EXPECT_EQ(table[n], brute);
    EXPECT_EQ(divisors(n).size(), brute);
    if (n <= 100) EXPECT_EQ(s5[n], sigma(5, n));
  }
}

TEST(Arith, InverseModAndPrimes) {
  for (std::int64_t c = 2; c <= 60; ++c) {
    for (std::int64_t a = 1; a < c; ++a) {
      if (std::gcd(a, c) != 1) {
        EXPECT_THROW(inverse_mod(a, c), DomainError);
        continue;
      }
      EXPECT_EQ((a * inverse_mod(a, c)) % c, 1);
    }
  }
  const auto ps = primes_up_to(100);
  EXPECT_EQ(ps.size(), 25u);
  EXPECT_EQ(ps.back(), 97u);
}

TEST(Arith, DivisorBoundConstantDominates) {
  for (double delta : {0.1, 0.2, 0.25, 0.5}) {
    const double c = divisor_bound_constant(delta);
    const auto d = divisor_count_table(200000);
    for (std::size_t n = 1; n < d.size(); ++n) {
      ASSERT_LE(d[n], c * std::pow(static_cast<double>(n), delta) * (1 + 1e-12)) << delta << " " << n;
    }
  }
  EXPECT_THROW(divisor_bound_constant(0.0), DomainError);
  EXPECT_THROW(divisor_bound_constant(0.01), DomainError);
}

TEST(Kloosterman, Examples) {
  EXPECT_DOUBLE_EQ(kloosterman(1, 1, 1), 1.0);
  EXPECT_NEAR(kloosterman(1, 1, 2), 1.0, 1e-15);
  EXPECT_NEAR(kloosterman(1, 1, 3), -1.0, 1e-15);
  EXPECT_THROW(kloosterman(1, 1, 0), DomainError);
  // Ramanujan sum: S(m, 0; c) = c_c(m); S(0, 0; c) = phi(c)
  EXPECT_NEAR(kloosterman(0, 0, 12), 4.0, 1e-14);
  EXPECT_NEAR(kloosterman(1, 0, 12), 0.0, 1e-14);
}

TEST(Kloosterman, MatchesEnumerationSymmetricAndBounded) {
  KloostermanTable table;
  for (long c = 1; c <= 100; ++c) {
    for (long m = 1; m <= 50; m += (c > 40 ? 7 : 1)) {
      for (long n = 1; n <= 50; n += (c > 40 ? 5 : 1)) {
        const double s = table(m, n, c);
        EXPECT_EQ(s, table(n, m, c));
        EXPECT_LE(std::fabs(s), c + 1e-9);
        if (c <= 40 && m <= 8 && n <= 8) {
          long double im = 0;
          EXPECT_NEAR(s, static_cast<double>(naive_kloosterman(m, n, c, &im)), 1e-12 * c);
          EXPECT_LE(std::fabs(static_cast<double>(im)), 1e-10 * c);
        }
      }
    }
  }
  EXPECT_EQ(table.max_c(), 100);
  EXPECT_EQ(table(3, 5, 7), table(10, 12, 7));
}

TEST(Kloosterman, ConcurrentLookupsAgree) {
  KloostermanTable table;
  std::vector<std::thread> workers;
  std::vector<double> out(4, 0.0);
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      double acc = 0;
      for (long c = 1; c <= 60; ++c) acc += table(2, 3, c);
      out[static_cast<std::size_t>(t)] = acc;
    });
  }
  for (auto& w : workers) w.join();
  for (double v : out) EXPECT_EQ(v, out[0]);
}

TEST(Bessel, Examples) {
  EXPECT_EQ(bessel_j(11, 0.0), 0.0);
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  const double lead = std::pow(0.5, 11) / std::tgamma(12.0);
  // the next series term is (1/4)^2 / (2! * 12 * 13) = 1/4992
  EXPECT_NEAR(bessel_j(11, 1.0), lead * (1.0 - 1.0 / 48.0), lead / 4992.0 * 1.01);
  EXPECT_LE(std::fabs(bessel_j(11, 5.0)), std::pow(std::exp(1.0) * 5.0 / 24.0, 11));
  EXPECT_THROW(bessel_j(3, -1.0), DomainError);
}

TEST(Bessel, AgreesWithMultiprecisionOracle) {
  for (int nu : {0, 1, 2, 11, 23, 50, 100, 999, 3000, 10000}) {
    for (double x : {0.3, 1.0, 7.5, 30.0, 99.0, 250.0, 640.0, 999.5, 1500.0, 2100.0, 5000.0, 20000.0, 2.0e5}) {
      const double ref = oracle_j(nu, x);
      const double got = bessel_j(nu, x);
      // relative accuracy away from zeros: measure against the local envelope
      const double envelope = std::max(std::fabs(ref), x > nu ? 0.1 * std::sqrt(2.0 / (kPi * x)) : 0.0);
      EXPECT_LE(std::fabs(got - ref), 1e-10 * envelope + 1e-300) << nu << " " << x << " " << ref;
    }
  }
}

TEST(Bessel, LargeArgument) {
  for (int nu : {1, 11, 999}) {
    const double x = 1.0e6 + 0.25;
    const double ref = oracle_j(nu, x);
    EXPECT_LE(std::fabs(bessel_j(nu, x) - ref), 1e-10 * std::sqrt(2.0 / (kPi * x))) << nu;
  }
}

TEST(Bessel, ThreeTermRecurrence) {
  for (int nu = 2; nu <= 50; ++nu) {
    for (double x = 0.5; x <= 100.0; x += 0.5) {
      const double lhs = bessel_j(nu - 1, x) + bessel_j(nu + 1, x);
      const double rhs = 2.0 * nu / x * bessel_j(nu, x);
      const double scale = std::fabs(bessel_j(nu - 1, x)) + std::fabs(bessel_j(nu + 1, x)) + std::fabs(rhs);
      EXPECT_LE(std::fabs(lhs - rhs), 1e-8 * scale + 1e-300) << nu << " " << x;
    }
  }
}

TEST(Bessel, DecayBoundAndSeriesRemainder) {
  for (int nu = 11; nu <= 400; nu += 13) {
    for (double x : {0.1, 1.0, 5.0, 20.0, 60.0, 150.0}) {
      EXPECT_LE(bessel_j(nu, x), std::pow(std::exp(1.0) * x / (2.0 * (nu + 1)), nu) * (1 + 1e-12) + 1e-300);
    }
  }
  for (int nu = 2; nu <= 40; ++nu) {
    for (double x = 0.0; x <= 1.0; x += 0.125) {
      const double lead = std::pow(x / 2, nu) / std::tgamma(nu + 1.0);
      EXPECT_LE(std::fabs(bessel_j(nu, x) - lead), std::pow(x / 2, nu + 2) / std::tgamma(nu + 1.0) + 1e-300);
    }
  }
}

TEST(BesselTail, MajorantProperties) {
  // bound <= (e 4 pi x / 2k)^(k-1) sum_{c > c0} c^-(k-2), summed directly
  for (int k : {12, 24, 100}) {
    for (double x : {0.5, 2.0, 10.0}) {
      for (long c0 : {1L, 3L, 10L}) {
        double sum = 0;
        for (long c = c0 + 1; c < 200000; ++c) sum += std::pow(static_cast<double>(c), -(k - 2));
        const double ref = std::pow(std::exp(1.0) * 4.0 * kPi * x / (2.0 * k), k - 1) * sum;
        EXPECT_LE(bessel_tail_bound(k, x, c0), ref * (1 + 1e-12));
        // and it dominates the actual tail computed from the trivial Kloosterman bound
        double actual = 0;
        for (long c = c0 + 1; c < 20000; ++c) actual += std::fabs(bessel_j(k - 1, 4.0 * kPi * x / c));
        EXPECT_GE(bessel_tail_bound(k, x, c0), actual);
      }
    }
  }
  EXPECT_LT(bessel_tail_bound(1000, 30.0, 1), 1e-300);
  EXPECT_GT(bessel_tail_bound(1000, 900.0, 1), 1.0);
  double prev = bessel_tail_bound(1000, 30.0, 1);
  for (long c0 = 2; c0 <= 10; ++c0) {
    const double b = bessel_tail_bound(1000, 30.0, c0);
    EXPECT_LE(b, prev);
    prev = b;
  }
  EXPECT_GT(bessel_tail_bound(1000, 30.0, 10), 0.0);
  EXPECT_THROW(bessel_tail_bound(3, 1.0, 1), DomainError);
  const long c0 = bessel_tail_cutoff(12, 5.0, 1e-12);
  EXPECT_LE(bessel_tail_bound(12, 5.0, c0), 1e-12);
  EXPECT_GT(bessel_tail_bound(12, 5.0, c0 - 1), 1e-12);
}
