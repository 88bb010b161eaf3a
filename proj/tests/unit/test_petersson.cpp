#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "scslab/common.hpp"
#include "scslab/petersson/petersson.hpp"
#include "scslab/qarith/hecke.hpp"
#include "scslab/qarith/modular_forms.hpp"
#include "scslab/special/kloosterman.hpp"

using namespace scslab;
using namespace scslab::petersson;

namespace {

const HeckeEigenform& delta_form() {
  static const HeckeEigenform f = qarith::hecke_eigenforms(12, 40000)[0];
  return f;
}

// <Delta, Delta> by nested adaptive quadrature of y^12 |Delta(z)|^2 / y^2 over the
// fundamental domain truncated at y = 8, with Delta summed from the exact tau(n)
double delta_norm_oracle() {
  const qarith::QSeries d = qarith::delta_qexp(60);
  std::vector<double> tau(61, 0.0);
  for (int n = 1; n <= 60; ++n) tau[n] = d[n].get_d();
  auto integrand = [&](double x, double y) {
    std::complex<double> s = 0.0;
    for (int n = 1; n <= 60; ++n) s += tau[n] * std::exp(std::complex<double>(-kTwoPi * n * y, kTwoPi * n * x));
    return std::pow(y, 10.0) * std::norm(s);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto column = [&](double x) {
    return GK::integrate([&](double y) { return integrand(x, y); }, std::sqrt(1.0 - x * x), 8.0, 15, 1e-13);
  };
  return 2.0 * GK::integrate(column, 0.0, 0.5, 15, 1e-12);
}

std::vector<HeckeEigenform> with_l_values(std::vector<HeckeEigenform> forms) {
  for (auto& f : forms) f.sym2_l1 = sym2_l1(f, Sym2Method::NormIdentity, 1e-10);
  return forms;
}

}  // namespace

TEST(PeterssonNorm, DeltaMatchesDirectQuadrature) {
  const double oracle = delta_norm_oracle();
  const double v = petersson_norm(delta_form(), 1e-10);
  EXPECT_GT(v, 0.0);
  EXPECT_NEAR(v / oracle, 1.0, 1e-8);
  // classical value of <Delta, Delta>
  EXPECT_NEAR(v / 1.035362056804320922e-6, 1.0, 1e-9);
  EXPECT_NEAR(log_petersson_norm(delta_form(), 1e-10), std::log(v), 1e-12);
}

TEST(PeterssonNorm, StableUnderTableAndQuadratureChanges) {
  const auto& f = delta_form();
  const double a = normalized_norm_integral(f.truncated(20), 1e-8).value;
  const double b = normalized_norm_integral(f.truncated(40), 1e-8).value;
  EXPECT_NEAR(a / b, 1.0, 1e-8);
  const NormIntegral coarse = normalized_norm_integral(f, 1e-10);
  const NormIntegral dense = normalized_norm_integral(f, 1e-10, 2 * coarse.panels);
  EXPECT_GT(dense.panels, coarse.panels);
  EXPECT_NEAR(dense.value / coarse.value, 1.0, 1e-10);
}

TEST(PeterssonNorm, ShortTableNamesRequiredLength) {
  const auto forms = qarith::hecke_eigenforms(60, 200);
  const std::size_t need = norm_required_length(60, 1e-8);
  EXPECT_GT(need, 5u);
  try {
    petersson_norm(forms[0].truncated(5), 1e-8);
    FAIL() << "expected InsufficientTable";
  } catch (const InsufficientTable& e) {
    EXPECT_EQ(e.required(), need);
  }
  EXPECT_NO_THROW(petersson_norm(forms[0].truncated(need), 1e-8));
}

TEST(Sym2, ThreeRoutesAgreeForDelta) {
  const Sym2Triangulation t = sym2_l1_triangulate(delta_form(), 1e-4);
  EXPECT_LT(t.spread, 1e-3);
  EXPECT_NEAR(t.smoothed_series / t.norm_identity, 1.0, 1e-9);
  EXPECT_NEAR(t.rankin_slope / t.norm_identity, 1.0, 1e-3);
  EXPECT_DOUBLE_EQ(t.consensus(), t.norm_identity);
}

TEST(Sym2, DisagreementCarriesAllValues) {
  HeckeEigenform g = delta_form();
  for (auto& v : g.lambda) v *= 1.05;
  try {
    sym2_l1_triangulate(g, 1e-4);
    FAIL() << "expected Sym2Disagreement";
  } catch (const Sym2Disagreement& e) {
    EXPECT_GT(e.values().spread, 1e-3);
    EXPECT_GT(e.values().norm_identity, 0.0);
    EXPECT_GT(e.values().smoothed_series, 0.0);
    EXPECT_GT(e.values().rankin_slope, 0.0);
  }
}

TEST(Sym2, SanityWindowUpToWeight200) {
  for (int k = 12; k <= 200; k += 2) {
    if (qarith::cusp_form_dimension(k) == 0) continue;
    for (const auto& f : qarith::hecke_eigenforms(k, 64)) {
      const double L = sym2_l1(f, Sym2Method::NormIdentity, 1e-6);
      EXPECT_GE(L, 0.05) << "k=" << k;
      EXPECT_LE(L, 20.0) << "k=" << k;
    }
  }
}

TEST(Sym2, ShortTablesAreRejected) {
  const auto& f = delta_form();
  EXPECT_THROW(sym2_l1(f.truncated(100), Sym2Method::SmoothedSeries, 1e-8), InsufficientTable);
  EXPECT_THROW(sym2_l1(f.truncated(100), Sym2Method::RankinSlope, 1e-3), InsufficientTable);
  EXPECT_THROW(sym2_l1(f, Sym2Method::NormIdentity, 0.0), DomainError);
}

TEST(TraceFormula, DeltaSingleForm) {
  const auto forms = with_l_values({delta_form()});
  const double lhs = trace_formula_lhs(12, 1, 1, forms);
  EXPECT_DOUBLE_EQ(lhs, 2.0 * kPi * kPi / 11.0 / *forms[0].sym2_l1);
  special::KloostermanTable table;
  const TraceFormulaResult r = trace_formula_rhs_auto(12, 1, 1, 1e-12, &table);
  EXPECT_EQ(r.diagonal, 1.0);
  EXPECT_LE(r.tail_bound, 1e-12);
  EXPECT_NEAR(lhs, r.total(), 1e-9);
}

TEST(TraceFormula, IdentityForTwoDimensionalSpace) {
  const auto forms = with_l_values(qarith::hecke_eigenforms(24, 3000));
  ASSERT_EQ(forms.size(), 2u);
  special::KloostermanTable table;
  for (long n1 : {1, 2, 7, 12}) {
    for (long n2 : {1, 3, 12, 20}) {
      const TraceFormulaResult r = trace_formula_rhs_auto(24, n1, n2, 1e-10, &table);
      EXPECT_EQ(r.diagonal, n1 == n2 ? 1.0 : 0.0);
      EXPECT_NEAR(trace_formula_lhs(24, n1, n2, forms), r.total(), r.tail_bound + 1e-8) << n1 << "," << n2;
    }
  }
}

TEST(TraceFormula, EmptySpaceGivesCancellation) {
  EXPECT_EQ(trace_formula_lhs(14, 3, 3, {}), 0.0);
  special::KloostermanTable table;
  for (int k : {8, 10, 14}) {
    const TraceFormulaResult r = trace_formula_rhs_auto(k, 3, 3, 1e-9, &table);
    EXPECT_NEAR(r.total(), 0.0, r.tail_bound + 1e-9) << "k=" << k;
  }
}

TEST(TraceFormula, TotalStableBeyondCutoff) {
  special::KloostermanTable table;
  for (auto [n1, n2] : {std::pair{1L, 1L}, {5L, 17L}, {20L, 20L}}) {
    const TraceFormulaResult r = trace_formula_rhs_auto(16, n1, n2, 1e-11, &table);
    for (long extra : {1L, 10L, 200L}) {
      EXPECT_NEAR(trace_formula_rhs(16, n1, n2, r.c0 + extra, &table).total(), r.total(), 1e-10);
    }
  }
}

TEST(TraceFormula, LargeWeightDecay) {
  const TraceFormulaResult r = trace_formula_rhs_auto(1000, 1, 1, 1e-200);
  EXPECT_LT(std::fabs(r.offdiagonal) + r.tail_bound, 1e-200);
  EXPECT_GE(r.tail_bound, 0.0);
  EXPECT_EQ(r.total(), 1.0);
}

TEST(TraceFormula, MissingLValueIsAnError) {
  const std::vector<HeckeEigenform> forms{delta_form()};
  EXPECT_THROW(trace_formula_lhs(12, 1, 1, forms), DomainError);
  EXPECT_THROW(trace_formula_rhs(13, 1, 1, 5), DomainError);
  EXPECT_THROW(trace_formula_rhs(12, 0, 1, 5), DomainError);
}
