#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>

#include "scslab/common.hpp"
#include "scslab/qarith/hecke.hpp"
#include "scslab/qarith/modular_forms.hpp"
#include "scslab/sums/sums.hpp"
#include "scslab/sums/window.hpp"

using namespace scslab;
using namespace scslab::sums;

namespace {

const HeckeEigenform& delta_form() {
  static const HeckeEigenform f = qarith::hecke_eigenforms(12, 40000)[0];
  return f;
}

// lambda(n) straight from tau(n) of the exact expansion
double lambda_oracle(std::size_t n) {
  static const qarith::QSeries d = qarith::delta_qexp(100);
  return d[n].get_d() / std::pow(static_cast<double>(n), 5.5);
}

HeckeEigenform zero_form(std::size_t N) {
  HeckeEigenform f;
  f.k = 12;
  f.lambda.assign(N + 1, 0.0);
  return f;
}

}  // namespace

TEST(Window, SupportAndKinds) {
  const Window bump = make_window(WindowKind::SmoothBump, 1.0, 2.0);
  EXPECT_EQ(bump(0.99), 0.0);
  EXPECT_EQ(bump(1.0), 0.0);
  EXPECT_EQ(bump(2.0), 0.0);
  EXPECT_DOUBLE_EQ(bump(1.5), 1.0);
  const Window sharp = make_window(WindowKind::SharpCutoff, 0.0, 1.0);
  EXPECT_EQ(sharp(0.0), 1.0);
  EXPECT_EQ(sharp(1.0), 1.0);
  EXPECT_EQ(sharp(1.0000001), 0.0);
  EXPECT_FALSE(sharp.smooth());
  EXPECT_THROW(make_window(WindowKind::SmoothBump, 0.0, 1.0), DomainError);
  EXPECT_THROW(make_window(WindowKind::SmoothBump, 2.0, 1.0), DomainError);
  EXPECT_EQ(parse_window("bump:1:2").descriptor(), "bump:1:2");
  EXPECT_EQ(parse_window("cosine-spline:0.5:3:2").descriptor(), "cosine:0.5:3:2");
  EXPECT_THROW(parse_window("gauss:1:2"), DomainError);
  EXPECT_THROW(parse_window("bump:1"), DomainError);
  EXPECT_THROW(parse_window("bump:1:x"), DomainError);
}

TEST(Window, DerivativesMatchFiniteDifferences) {
  for (const Window& W : {make_window(WindowKind::SmoothBump, 1.0, 2.0), make_window(WindowKind::SmoothBump, 0.5, 4.0, 3.0),
                          make_window(WindowKind::CosineSpline, 1.0, 2.0)}) {
    for (int i = 1; i <= W.max_order(); ++i) {
      for (double t = 0.05; t < 0.96; t += 0.05) {
        const double y = W.a() + t * (W.A() - W.a());
        const double step = 1e-5 * (W.A() - W.a());
        const double fd = (W.deriv(i - 1, y + step) - W.deriv(i - 1, y - step)) / (2 * step);
        const double exact = W.deriv(i, y);
        // relative to the derivative's own scale on the support
        const double scale = std::max(std::fabs(exact), 1e-3 * sobolev_norm(W, i, kSupNorm));
        EXPECT_LE(std::fabs(fd - exact), 1e-6 * scale + 1e-9) << W.descriptor() << " i=" << i << " y=" << y;
      }
    }
  }
  EXPECT_THROW(make_window(WindowKind::CosineSpline, 1, 2).deriv(3, 1.5), DomainError);
}

TEST(Window, SobolevNorms) {
  const Window bump = make_window(WindowKind::SmoothBump, 1.0, 2.0);
  EXPECT_NEAR(sobolev_norm(bump, 0, kSupNorm), 1.0, 1e-12);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = ts.integrate([](double y) {
    const double t = 2 * y - 3;
    return std::exp(1 - 1 / (1 - t * t));
  }, 1.0, 2.0, 1e-10);
  EXPECT_NEAR(sobolev_norm(bump, 0, 1.0), oracle, 1e-9);
  const double l2 = ts.integrate([&](double y) { return bump(y) * bump(y) + bump.deriv(1, y) * bump.deriv(1, y); }, 1.0, 2.0, 1e-10);
  EXPECT_NEAR(sobolev_norm(bump, 1, 2.0), std::sqrt(l2), 1e-8);
  const Window zero = make_window(WindowKind::SmoothBump, 1.0, 2.0, 0.0);
  for (double p : {1.0, 2.0, kSupNorm}) EXPECT_EQ(sobolev_norm(zero, 2, p), 0.0);
  const Window sharp = make_window(WindowKind::SharpCutoff, 1.0, 3.0, 2.0);
  EXPECT_EQ(sobolev_norm(sharp, 0, kSupNorm), 2.0);
  EXPECT_THROW(sobolev_norm(sharp, 1, kSupNorm), DomainError);
  EXPECT_THROW(sobolev_norm(bump, 7, 1.0), DomainError);
  EXPECT_THROW(sobolev_norm(bump, 1, 3.0), DomainError);
  // cosine spline: ||W||_{0,1} = (A - a) / 2
  EXPECT_NEAR(sobolev_norm(make_window(WindowKind::CosineSpline, 1.0, 3.0), 0, 1.0), 1.0, 1e-10);
}

TEST(SharpSum, Examples) {
  const auto& f = delta_form();
  EXPECT_EQ(sharp_sum(f, 0.5, 1), 0.0);
  EXPECT_NEAR(sharp_sum(f, 1, 1), -24.0 / std::pow(2.0, 5.5), 1e-15);
  EXPECT_NEAR(sharp_sum(f, 2, 1), lambda_oracle(2) + lambda_oracle(2) * lambda_oracle(3), 1e-15);
  EXPECT_NEAR(sharp_sum(f, 2.99, 1), sharp_sum(f, 2, 1), 0.0);
  HeckeEigenform small = f.truncated(10);
  try {
    sharp_sum(small, 10, 3);
    FAIL();
  } catch (const InsufficientTable& e) {
    EXPECT_EQ(e.required(), 13u);
  }
  EXPECT_THROW(sharp_sum(f, 10, 0), DomainError);
}

TEST(SharpSum, AdditiveUnderRangeSplit) {
  const auto& f = delta_form();
  for (long h : {1L, 4L, 9L}) {
    const double whole = sharp_sum(f, 30000, h);
    const double split = sharp_sum_range(f, h, 1, 12345) + sharp_sum_range(f, h, 12346, 30000);
    EXPECT_LE(std::fabs(whole - split), 1e-12 * (1 + std::fabs(whole)));
  }
}

TEST(WeightedSum, ExamplesAndComparison) {
  const auto& f = delta_form();
  EXPECT_EQ(weighted_sum(f, 1, 1), 0.0);
  EXPECT_EQ(weighted_sum(f, 3, 3), 0.0);
  const double expected = lambda_oracle(2) * std::pow(0.5, 5.5) + lambda_oracle(3) * lambda_oracle(2) * std::pow(2.0 / 3.0, 5.5);
  EXPECT_NEAR(weighted_sum(f, 3, 1), expected, 1e-15);
  for (double X : {1e2, 1e3, 1e4}) {
    for (long h = 1; h <= 10; ++h) {
      const double b = weighted_sum(f, X, h);
      const double a = sharp_sum(f, X - h, h);
      EXPECT_LE(std::fabs(b - a), 5.0 * h * std::pow(X, 0.1)) << X << " " << h;
    }
  }
}

TEST(SmoothSum, RangeAndBruteForce) {
  const auto& f = delta_form();
  const Window bump = make_window(WindowKind::SmoothBump, 1.0, 2.0);
  const IndexRange r = smooth_sum_range(10, 1, bump);
  EXPECT_EQ(r.first, 10);  // n >= 9.5
  EXPECT_EQ(r.last, 19);   // n <= 19.5
  for (long h : {1L, 2L, 5L}) {
    for (double X : {10.0, 37.5, 1000.0}) {
      CompensatedSum brute;
      for (std::size_t n = 1; n + static_cast<std::size_t>(h) <= f.table_length(); ++n) {
        brute += f[n] * f[n + static_cast<std::size_t>(h)] * bump((n + 0.5 * h) / X);
      }
      EXPECT_NEAR(smooth_sum(f, X, h, bump), brute.value(), 1e-12 * (1 + std::fabs(brute.value())));
    }
  }
  // scale covariance
  EXPECT_NEAR(smooth_sum(f, 500, 1, bump.scaled(2.0)), 2.0 * smooth_sum(f, 500, 1, bump), 1e-12);
  EXPECT_THROW(smooth_sum(f.truncated(30), 20, 1, bump), InsufficientTable);
}

TEST(SmoothSum, SharpWindowMatchesSharpSumOffset) {
  const auto& f = delta_form();
  const Window sharp = make_window(WindowKind::SharpCutoff, 0.0, 1.0);
  for (long h : {1L, 2L, 3L, 8L}) {
    for (double X : {10.0, 101.0, 5000.0}) {
      EXPECT_EQ(smooth_sum(f, X, h, sharp), sharp_sum(f, X - 0.5 * h, h)) << h << " " << X;
    }
  }
}

TEST(Dirichlet, FirstTermConjugationAndTail) {
  const auto& f = delta_form();
  const auto one = dirichlet_series(f, {2.0, 0.0}, 1, 1);
  const double first = lambda_oracle(2) * std::pow(2.0, 5.5) / std::pow(4.0, 13);
  EXPECT_NEAR(one.value.real(), first, 1e-13 * std::fabs(first));
  const auto ten = dirichlet_series(f, {2.0, 0.0}, 1, 10);
  double direct = 0;
  for (int n = 1; n <= 10; ++n) {
    direct += lambda_oracle(n) * lambda_oracle(n + 1) * std::pow(n * (n + 1.0), 5.5) / std::pow(2.0 * n + 2, 13);
  }
  EXPECT_NEAR(ten.value.real(), direct, 1e-12 * std::fabs(direct));
  EXPECT_EQ(dirichlet_series(f, {3.0, 0.0}, 2, 500).value.imag(), 0.0);
  const std::complex<double> s(1.7, 4.2);
  const auto a = dirichlet_series(f, s, 3, 300), b = dirichlet_series(f, std::conj(s), 3, 300);
  EXPECT_NEAR(a.value.real(), b.value.real(), 1e-18);
  EXPECT_NEAR(a.value.imag(), -b.value.imag(), 1e-18);
  // later partial sums stay inside earlier error intervals
  for (double sigma : {1.5, 2.0, 3.0}) {
    const auto coarse = dirichlet_series(f, {sigma, 1.0}, 1, 200);
    const auto fine = dirichlet_series(f, {sigma, 1.0}, 1, 20000);
    EXPECT_LE(std::abs(fine.value - coarse.value), coarse.tail_bound);
    EXPECT_LT(fine.tail_bound, coarse.tail_bound);
  }
  EXPECT_THROW(dirichlet_series(f, {1.0, 0.0}, 1, 10), DomainError);
  EXPECT_TRUE(std::isinf(dirichlet_series(f, {1.01, 0.0}, 1, 10).tail_bound));
}

TEST(Rankin, MonotoneAndExamples) {
  const auto& f = delta_form();
  EXPECT_EQ(rankin_statistic(f, 1), 1.0);
  double prev = 0;
  for (double X = 10; X <= 10000; X *= 1.3) {
    const double r = rankin_statistic(f, X);
    EXPECT_GE(r, prev);
    prev = r;
  }
  EXPECT_EQ(rankin_statistic(zero_form(10), 10), 0.0);
}
