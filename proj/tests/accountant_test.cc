// Copyright 2026 The dpconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpconv/accountant.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpconv {
namespace {

using ::dpconv::testing::Unwrap;

constexpr double kInf = std::numeric_limits<double>::infinity();

// inf over a dense alpha grid of rho T alpha - log(delta) / (alpha - 1).
double OracleMaGrid(double rho_t, double delta) {
  double best = kInf;
  for (double alpha = 1.01; alpha <= 1e5; alpha *= 1.0001) {
    best = std::min(best, rho_t * alpha - std::log(delta) / (alpha - 1.0));
  }
  return best;
}

TEST(RenyiCurveTest, Linear) {
  const RenyiCurve curve = RenyiCurve::Linear(0.5);
  EXPECT_EQ(curve(3.0), 1.5);
  EXPECT_EQ(curve.linear_slope(), 0.5);
  EXPECT_EQ(curve.LimitAtOrderOne(), 0.5);
  EXPECT_EQ(curve.Scaled(4.0)(3.0), 6.0);
}

TEST(RenyiCurveTest, TabulatedUsesNextLargerOrder) {
  const RenyiCurve curve =
      Unwrap(RenyiCurve::Tabulated({{2.0, 0.1}, {4.0, 0.3}, {8.0, 0.9}}));
  EXPECT_EQ(curve(1.5), 0.1);
  EXPECT_EQ(curve(2.0), 0.1);
  EXPECT_EQ(curve(3.0), 0.3);
  EXPECT_EQ(curve(8.0), 0.9);
  EXPECT_EQ(curve(8.5), kInf);
  EXPECT_FALSE(curve.linear_slope().has_value());
  EXPECT_NEAR(curve.Scaled(2.0)(4.0), 0.6, 1e-15);
}

TEST(RenyiCurveTest, TabulatedValidation) {
  EXPECT_FALSE(RenyiCurve::Tabulated({}).ok());
  EXPECT_FALSE(RenyiCurve::Tabulated({{1.0, 0.1}}).ok());
  EXPECT_FALSE(RenyiCurve::Tabulated({{3.0, 0.1}, {2.0, 0.2}}).ok());
  EXPECT_FALSE(RenyiCurve::Tabulated({{2.0, -0.1}}).ok());
}

TEST(GaussianMechanismSpecTest, Create) {
  const GaussianMechanismSpec spec = Unwrap(GaussianMechanismSpec::Create(20.0));
  EXPECT_EQ(spec.rho, 1.0 / 800.0);
  EXPECT_EQ(spec.Curve()(2.0), 0.0025);
  EXPECT_FALSE(GaussianMechanismSpec::Create(0.0).ok());
  EXPECT_FALSE(GaussianMechanismSpec::Create(-2.0).ok());
}

TEST(CompositionQueryTest, Validation) {
  EXPECT_TRUE((CompositionQuery{0, 0.5}).Validate().ok());
  EXPECT_FALSE((CompositionQuery{-1, 0.5}).Validate().ok());
  EXPECT_FALSE((CompositionQuery{1, 0.0}).Validate().ok());
  EXPECT_FALSE((CompositionQuery{1, 1.0}).Validate().ok());
}

TEST(RdpComposeTest, Examples) {
  const RenyiCurve base = RenyiCurve::Linear(0.00125);
  EXPECT_EQ(RdpCompose(base, 0)(7.0), 0.0);
  EXPECT_EQ(RdpCompose(base, 1)(7.0), base(7.0));
  EXPECT_NEAR(RdpCompose(base, 1000)(3.0), 1.25 * 3.0, 1e-12);
}

TEST(RdpComposeTest, NestedCompositionMultiplies) {
  const RenyiCurve base =
      Unwrap(RenyiCurve::Tabulated({{2.0, 0.01}, {3.0, 0.02}, {5.0, 0.05}}));
  for (double alpha : {1.5, 2.0, 2.5, 4.0, 5.0}) {
    EXPECT_NEAR(RdpCompose(RdpCompose(base, 7), 11)(alpha),
                RdpCompose(base, 77)(alpha), 1e-14);
  }
}

TEST(MaGaussianEpsilonTest, KnownValues) {
  EXPECT_NEAR(Unwrap(MaGaussianEpsilon(0.00125, 1000, 1e-5)), 8.83723, 1e-4);
  EXPECT_NEAR(Unwrap(MaGaussianEpsilon(0.00125, 1000, 1e-5)),
              1.25 + std::sqrt(5.0 * std::log(1e5)), 1e-12);
  EXPECT_EQ(Unwrap(MaGaussianEpsilon(0.00125, 0, 1e-5)), 0.0);
  EXPECT_LT(Unwrap(MaGaussianEpsilon(1e-12, 1, 1e-5)), 1e-4);
}

TEST(MaGaussianEpsilonTest, MatchesGridOverOrders) {
  for (double rho_t : {1.25, 0.05, 3.0}) {
    EXPECT_NEAR(Unwrap(MaGaussianEpsilon(rho_t, 1, 1e-5)),
                OracleMaGrid(rho_t, 1e-5), 1e-5)
        << rho_t;
  }
}

TEST(ImprovedEpsilonTest, ZeroRounds) {
  EXPECT_EQ(Unwrap(ImprovedEpsilon(0.00125, 0, 1e-5)), 0.0);
}

TEST(ImprovedEpsilonTest, NeverAboveMa) {
  for (double rho : {1.0 / 800.0, 1.0 / 32.0, 0.5}) {
    for (int t_index = 0; t_index < 50; ++t_index) {
      const int64_t rounds = 1 + t_index * 20;
      for (int d_index = 0; d_index < 20; ++d_index) {
        const double delta = std::pow(10.0, -1.0 - 0.5 * d_index);
        EXPECT_LE(Unwrap(ImprovedEpsilon(rho, rounds, delta)),
                  Unwrap(MaGaussianEpsilon(rho, rounds, delta)) + 1e-12)
            << rho << " " << rounds << " " << delta;
      }
    }
  }
}

TEST(ImprovedEpsilonTest, MonotoneInRoundsAndDelta) {
  const double rho = 1.0 / 800.0;
  double previous = 0.0;
  for (int64_t rounds = 1; rounds <= 1000; rounds += 37) {
    const double eps = Unwrap(ImprovedEpsilon(rho, rounds, 1e-5));
    EXPECT_GE(eps, previous - 1e-9);
    previous = eps;
  }
  previous = kInf;
  for (double delta = 1e-10; delta < 0.5; delta *= 3.0) {
    const double eps = Unwrap(ImprovedEpsilon(rho, 500, delta));
    EXPECT_LE(eps, previous + 1e-9);
    previous = eps;
  }
}

TEST(ImprovedEpsilonTest, SecondObjectiveMatchesFineGrid) {
  const double rho_t = 0.4;
  const double delta = 1e-3;
  const ImprovedBreakdown b =
      Unwrap(ImprovedEpsilonBreakdown(rho_t, 1, delta));
  double grid = kInf;
  for (double alpha = 1.01; alpha <= 1.0 / delta; alpha += 0.01) {
    const double x = rho_t * alpha * (alpha - 1.0);
    // Log-domain evaluation of log(1 + expm1(x) / (alpha delta)).
    const double v =
        (x + std::log1p((alpha * delta - 1.0) * std::exp(-x)) -
         std::log(alpha * delta)) /
        (alpha - 1.0);
    grid = std::min(grid, v);
  }
  EXPECT_NEAR(b.eps1, grid, 1e-5);
  EXPECT_LE(b.eps1, grid + 1e-12);
}

TEST(ImprovedEpsilonTest, BreakdownIsConsistent) {
  const ImprovedBreakdown b =
      Unwrap(ImprovedEpsilonBreakdown(1.0 / 800.0, 1000, 1e-5));
  EXPECT_EQ(b.epsilon, std::min({b.eps0, b.eps1, b.eps_large_order}));
  EXPECT_GT(b.alpha0, 1.0);
  EXPECT_LE(b.alpha0, 1e5 + 1e-6);
  EXPECT_GT(b.alpha1, 1.0);
  const ImprovedTerms at0 = ImprovedTermsAt(1.25, 1e-5, b.alpha0);
  EXPECT_NEAR(std::max(0.0, at0.eps0), b.eps0, 1e-9);
}

TEST(ImprovedEpsilonTest, FirstObjectiveFromDefinition) {
  const double rho_t = 1.25, delta = 1e-5, alpha = 10.0;
  const double zeta = (1.0 / alpha) * std::pow(1.0 - 1.0 / alpha, alpha - 1.0);
  const ImprovedTerms terms = ImprovedTermsAt(rho_t, delta, alpha);
  EXPECT_NEAR(terms.eps0,
              rho_t * alpha - std::log(delta / zeta) / (alpha - 1.0), 1e-12);
  EXPECT_NEAR(terms.eps1,
              std::log1p(std::expm1(rho_t * alpha * (alpha - 1.0)) /
                         (alpha * delta)) /
                  (alpha - 1.0),
              1e-12);
}

TEST(MaCalibrateSigmaTest, KnownValues) {
  const double sigma = Unwrap(MaCalibrateSigma(1.0, 1e-5, 1));
  EXPECT_NEAR(sigma * sigma, 24.0259, 1e-4);
  EXPECT_NEAR(sigma * sigma, 24.025850929940457, 1e-12);
  EXPECT_NEAR(sigma, 4.9016, 1e-4);
  const double doubled = Unwrap(MaCalibrateSigma(1.0, 1e-5, 2));
  EXPECT_NEAR(doubled * doubled, 2.0 * sigma * sigma, 1e-12);
}

TEST(MaCalibrateSigmaTest, RecoversTargetWithinDroppedTermSlack) {
  for (double eps : {0.5, 1.0, 2.0}) {
    for (double delta : {1e-5, 1e-8}) {
      for (int64_t rounds : {1, 100, 1000}) {
        const double sigma = Unwrap(MaCalibrateSigma(eps, delta, rounds));
        const double rho = 1.0 / (2.0 * sigma * sigma);
        EXPECT_LE(Unwrap(MaGaussianEpsilon(rho, rounds, delta)), 1.05 * eps);
      }
    }
  }
}

TEST(ImprovedCalibrateSigmaTest, KnownValues) {
  const double sigma = Unwrap(ImprovedCalibrateSigma(1.0, 1e-5, 1));
  EXPECT_NEAR(sigma * sigma, 15.7519, 1e-3);
  EXPECT_NEAR(sigma * sigma, 15.752615853456454, 1e-12);
  const double correction = 2.0 * (std::log(2.0 * std::log(1e5)) + 1.0);
  EXPECT_NEAR(correction, 8.2740, 1e-3);
}

TEST(ImprovedCalibrateSigmaTest, BelowMaForSmallDeltas) {
  for (double delta : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10}) {
    for (int64_t rounds : {1, 100}) {
      EXPECT_LT(Unwrap(ImprovedCalibrateSigma(1.0, delta, rounds)),
                Unwrap(MaCalibrateSigma(1.0, delta, rounds)));
    }
  }
}

TEST(ImprovedCalibrateSigmaTest, CorrectionGrowsDoublyLogarithmically) {
  auto correction = [](double delta) {
    const double ma = Unwrap(MaCalibrateSigma(1.0, delta, 1));
    const double imp = Unwrap(ImprovedCalibrateSigma(1.0, delta, 1));
    return ma * ma - imp * imp;
  };
  EXPECT_NEAR(correction(1e-10) - correction(1e-5), 2.0 * std::log(2.0),
              1e-9);
}

TEST(ImprovedCalibrateSigmaTest, Preconditions) {
  EXPECT_EQ(ImprovedCalibrateSigma(1e-3, 0.4, 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_EQ(ImprovedCalibrateSigma(0.8, 0.3, 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_EQ(ImprovedCalibrateSigma(-1.0, 1e-5, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(SubsampledSpecTest, KnownValues) {
  const SubsampledGaussianSpec fig3 = Unwrap(SubsampledSpec(0.001, 4.0));
  EXPECT_NEAR(fig3.rho_q, 6.2563e-8, 1e-12);
  EXPECT_NEAR(fig3.rho_q, 6.256256256256257e-8, 1e-20);
  EXPECT_EQ(fig3.max_alpha, 89);

  const SubsampledGaussianSpec fig6 = Unwrap(SubsampledSpec(256.0 / 60000.0, 0.6));
  EXPECT_NEAR(fig6.rho_q, 5.079e-5, 1e-8);
  EXPECT_NEAR(fig6.rho_q, 5.0784582118272533e-5, 1e-18);
  EXPECT_EQ(fig6.max_alpha, 3);

  EXPECT_EQ(SubsampledSpec(0.1, 4.0).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_EQ(SubsampledSpec(0.0, 4.0).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(SubsampledSpec(0.01, -1.0).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(SubsampledSpecTest, EmptyAdmissibleSet) {
  // 1 + 0.01 * log(1/(0.05 * 0.1)) < 2.
  EXPECT_EQ(SubsampledSpec(0.05, 0.1).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(AdmissibleAlphasTest, RangeAndMonotonicity) {
  const std::vector<int64_t> alphas =
      AdmissibleAlphas(Unwrap(SubsampledSpec(0.001, 4.0)));
  ASSERT_EQ(alphas.size(), 88u);
  EXPECT_EQ(alphas.front(), 2);
  EXPECT_EQ(alphas.back(), 89);
  int64_t previous = 0;
  for (double sigma = 1.0; sigma <= 8.0; sigma += 0.5) {
    const int64_t top = Unwrap(SubsampledSpec(0.001, sigma)).max_alpha;
    EXPECT_GE(top, previous);
    previous = top;
  }
}

TEST(SubsampledCurveTest, TabulatesAdmissibleOrders) {
  const SubsampledGaussianSpec spec = Unwrap(SubsampledSpec(0.001, 4.0));
  const RenyiCurve curve = SubsampledCurve(spec, 1000);
  ASSERT_EQ(curve.points().size(), 88u);
  EXPECT_NEAR(curve(10.0), spec.rho_q * 1000.0 * 10.0, 1e-15);
  EXPECT_EQ(curve(90.0), kInf);
}

TEST(AccountingMethodTest, Names) {
  EXPECT_EQ(AccountingMethodName(AccountingMethod::kMa), "ma");
  EXPECT_EQ(AccountingMethodName(AccountingMethod::kImproved), "improved");
}

TEST(SgdEpsilonTest, ZeroRounds) {
  const SubsampledGaussianSpec spec = Unwrap(SubsampledSpec(0.001, 4.0));
  EXPECT_EQ(Unwrap(SgdEpsilon(spec, 0, 1e-5, AccountingMethod::kMa)), 0.0);
  EXPECT_EQ(Unwrap(SgdEpsilon(spec, 0, 1e-5, AccountingMethod::kImproved)),
            0.0);
}

TEST(SgdEpsilonTest, ImprovedBelowMaWithWideningGap) {
  const SubsampledGaussianSpec spec = Unwrap(SubsampledSpec(0.001, 4.0));
  double previous_gap = 0.0;
  for (int epochs = 1; epochs <= 400; epochs += 21) {
    const int64_t rounds = std::llround(epochs / 0.001);
    const double ma =
        Unwrap(SgdEpsilon(spec, rounds, 1e-5, AccountingMethod::kMa));
    const double improved =
        Unwrap(SgdEpsilon(spec, rounds, 1e-5, AccountingMethod::kImproved));
    EXPECT_LT(improved, ma) << epochs;
    EXPECT_GE(ma - improved, previous_gap - 1e-9) << epochs;
    previous_gap = ma - improved;
  }
}

TEST(SgdEpsilonTest, AdmissibleDomainMatchesExhaustiveSearch) {
  const SubsampledGaussianSpec spec = Unwrap(SubsampledSpec(0.001, 4.0));
  const int64_t rounds = 50000;
  const double rho_t = spec.rho_q * rounds;
  double best = kInf;
  for (int alpha = 2; alpha <= 89; ++alpha) {
    best = std::min(best, rho_t * alpha - std::log(1e-5) / (alpha - 1.0));
  }
  EXPECT_NEAR(Unwrap(SgdEpsilon(spec, rounds, 1e-5, AccountingMethod::kMa)),
              best, 1e-12);
}

TEST(SgdEpsilonTest, ContinuousDomainDelegatesToGaussianAccountants) {
  const SubsampledGaussianSpec spec = Unwrap(SubsampledSpec(0.003, 0.6));
  EXPECT_NEAR(Unwrap(SgdEpsilon(spec, 10000, 1e-5, AccountingMethod::kMa,
                                OrderDomain::kContinuous)),
              Unwrap(MaGaussianEpsilon(spec.rho_q, 10000, 1e-5)), 1e-12);
  EXPECT_NEAR(Unwrap(SgdEpsilon(spec, 10000, 1e-5, AccountingMethod::kImproved,
                                OrderDomain::kContinuous)),
              Unwrap(ImprovedEpsilon(spec.rho_q, 10000, 1e-5)), 1e-12);
}

TEST(SgdEpsilonTest, ImprovedNeverAboveMaInEitherDomain) {
  for (double sigma : {0.6, 1.0, 4.0}) {
    const SubsampledGaussianSpec spec = Unwrap(SubsampledSpec(0.003, sigma));
    for (OrderDomain domain :
         {OrderDomain::kAdmissibleIntegers, OrderDomain::kContinuous}) {
      for (int64_t rounds : {1, 100, 10000}) {
        EXPECT_LE(Unwrap(SgdEpsilon(spec, rounds, 1e-5,
                                    AccountingMethod::kImproved, domain)),
                  Unwrap(SgdEpsilon(spec, rounds, 1e-5, AccountingMethod::kMa,
                                    domain)) +
                      1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace dpconv
