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

#include "dpconv/conversion.h"

#include <cmath>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "dpconv/divergences.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpconv {
namespace {

using ::dpconv::testing::OracleGammaExact;
using ::dpconv::testing::OracleGridMinH1;
using ::dpconv::testing::Unwrap;

RenyiOrder Order(double alpha) { return Unwrap(RenyiOrder::Create(alpha)); }

double Gamma(double alpha, double eps, double delta) {
  return Unwrap(GammaExact(Order(alpha), eps, delta)).value;
}

TEST(PointTypesTest, Validation) {
  EXPECT_TRUE((ApproxDpPoint{0.0, 0.0}).Validate().ok());
  EXPECT_FALSE((ApproxDpPoint{-1.0, 0.1}).Validate().ok());
  EXPECT_FALSE((ApproxDpPoint{1.0, 1.0}).Validate().ok());
  EXPECT_TRUE((RenyiPoint{Order(2.0), 0.0}).Validate().ok());
  EXPECT_FALSE((RenyiPoint{Order(2.0), -0.1}).Validate().ok());
}

TEST(ConversionMethodTest, Names) {
  EXPECT_EQ(ConversionMethodName(ConversionMethod::kExact), "exact");
  EXPECT_EQ(ConversionMethodName(ConversionMethod::kBoundG), "bound-g");
  EXPECT_EQ(ConversionMethodName(ConversionMethod::kBoundF), "bound-f");
  EXPECT_EQ(ConversionMethodName(ConversionMethod::kClosedForm),
            "closed-form");
}

TEST(LogZetaTest, OrderTwo) {
  EXPECT_NEAR(LogZeta(Order(2.0)), std::log(0.25), 1e-15);
}

TEST(H1ObjectiveTest, KnownValues) {
  EXPECT_NEAR(Unwrap(H1Objective(0.5, Order(2.0), 0.0, 0.0)), 1.0, 1e-15);
  // At delta = 0 the first term reduces to p.
  const double p = 0.37;
  const double second = std::pow(1 - p, 3.0) * std::pow(std::exp(0.4) - p, -2.0);
  EXPECT_NEAR(Unwrap(H1Objective(p, Order(3.0), 0.4, 0.0)), p + second, 1e-14);
}

TEST(H1ObjectiveTest, RejectsOutsideOpenInterval) {
  EXPECT_FALSE(H1Objective(0.1, Order(2.0), 1.0, 0.1).ok());
  EXPECT_FALSE(H1Objective(1.0, Order(2.0), 1.0, 0.1).ok());
  EXPECT_FALSE(H1Objective(0.05, Order(2.0), 1.0, 0.1).ok());
}

TEST(H1ObjectiveTest, MidpointConvexity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = 1.1 + 9.0 * unit(rng);
    const double eps = 3.0 * unit(rng);
    const double delta = 0.5 * unit(rng);
    const double p1 = delta + (1 - delta) * (0.001 + 0.998 * unit(rng));
    const double p2 = delta + (1 - delta) * (0.001 + 0.998 * unit(rng));
    const RenyiOrder order = Order(alpha);
    const double mid = Unwrap(H1Objective(0.5 * (p1 + p2), order, eps, delta));
    const double avg = 0.5 * (Unwrap(H1Objective(p1, order, eps, delta)) +
                              Unwrap(H1Objective(p2, order, eps, delta)));
    EXPECT_LE(mid, avg * (1 + 1e-12));
  }
}

TEST(GammaExactTest, ZeroDelta) {
  const ConversionResult r = Unwrap(GammaExact(Order(2.0), 1.0, 0.0));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.method, ConversionMethod::kExact);
}

TEST(GammaExactTest, LargeDeltaClosedForm) {
  EXPECT_NEAR(Gamma(4.0, 1.0, 0.3), 1.0 - std::log(0.7), 1e-9);
  EXPECT_NEAR(Gamma(4.0, 1.0, 0.3), 1.356675, 1e-6);
}

TEST(GammaExactTest, SmallDeltaAgainstGridOracle) {
  const ConversionResult r = Unwrap(GammaExact(Order(2.0), 1.0, 0.01));
  EXPECT_NEAR(r.value, 0.066846424445952793, 1e-9);
  EXPECT_NEAR(r.value, OracleGammaExact(2.0, 1.0, 0.01), 1e-6);
  ASSERT_TRUE(r.minimizer_p.has_value());
  EXPECT_NEAR(*r.minimizer_p, 0.025637750932878, 1e-5);
  EXPECT_GT(*r.minimizer_p, 0.01);
  EXPECT_LT(*r.minimizer_p, 1.0);
  // Sandwiched by the closed-form lower bound and the large-delta value.
  EXPECT_GE(r.value, 0.033823);
  EXPECT_LE(r.value, 1.0 - std::log(0.99));
}

TEST(GammaExactTest, RandomInstancesAgainstGridOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> alpha_dist(1.5, 10.0);
  std::uniform_real_distribution<double> eps_dist(0.0, 3.0);
  std::uniform_real_distribution<double> log_delta(std::log(1e-3),
                                                   std::log(0.5));
  for (int i = 0; i < 10; ++i) {
    const double alpha = alpha_dist(rng);
    const double eps = eps_dist(rng);
    const double delta = std::exp(log_delta(rng));
    EXPECT_NEAR(Gamma(alpha, eps, delta), OracleGammaExact(alpha, eps, delta),
                1e-6)
        << alpha << " " << eps << " " << delta;
  }
}

TEST(GammaExactTest, MinimizerIsInsideTheOpenInterval) {
  for (double delta : {1e-6, 1e-3, 0.05}) {
    const ConversionResult r = Unwrap(GammaExact(Order(3.0), 0.5, delta));
    if (r.minimizer_p) {
      EXPECT_GT(*r.minimizer_p, delta);
      EXPECT_LT(*r.minimizer_p, 1.0);
      const auto [grid_p, grid_min] = OracleGridMinH1(3.0, 0.5, delta);
      EXPECT_NEAR(*r.minimizer_p, static_cast<double>(grid_p), 1e-3);
    }
  }
}

// The joint range of the hockey-stick and chi^alpha divergences is convex,
// so delta is concave in chi = exp((alpha - 1) gamma), not in gamma itself.
// Equivalently delta -> chi(gamma(delta)) is nondecreasing and convex.
TEST(GammaExactTest, MonotoneInDeltaAndChiConvex) {
  for (double alpha : {1.5, 3.0, 10.0}) {
    auto chi = [&](double gamma) { return std::exp((alpha - 1.0) * gamma); };
    for (double eps : {0.0, 0.5, 2.0}) {
      double previous = 0.0;
      for (double delta = 0.01; delta < 0.95; delta += 0.02) {
        const double lo = chi(Gamma(alpha, eps, delta - 0.01));
        const double mid = chi(Gamma(alpha, eps, delta));
        const double hi = chi(Gamma(alpha, eps, delta + 0.01));
        EXPECT_GE(mid, previous - 1e-9);
        EXPECT_LE(mid, 0.5 * (lo + hi) * (1 + 1e-9))
            << alpha << " " << eps << " " << delta;
        previous = mid;
      }
    }
  }
}

TEST(DeltaExactTest, MonotoneAndConcaveInChi) {
  for (double alpha : {1.5, 3.0, 10.0}) {
    auto delta_at_chi = [&](double eps, double chi) {
      return Unwrap(DeltaExact(Order(alpha), std::log(chi) / (alpha - 1.0),
                               eps))
          .value;
    };
    for (double eps : {0.0, 0.5, 2.0}) {
      double previous = 0.0;
      for (double log_chi = 0.03; log_chi < 6.0; log_chi += 0.05) {
        const double chi = std::exp(log_chi);
        const double h = 0.01 * chi;
        const double mid = delta_at_chi(eps, chi);
        EXPECT_GE(mid, previous - 1e-9);
        EXPECT_GE(mid, 0.5 * (delta_at_chi(eps, chi - h) +
                              delta_at_chi(eps, chi + h)) -
                           1e-9)
            << alpha << " " << eps << " " << chi;
        previous = mid;
      }
    }
  }
}

// In gamma itself the curvature changes sign: convex where alpha delta >= 1
// and concave for small delta once eps > 0.
TEST(GammaExactTest, CurvatureInDeltaIsMixed) {
  const double alpha = 10.0, eps = 2.0;
  auto second_difference = [&](double delta) {
    const double h = 0.01 * delta;
    return Gamma(alpha, eps, delta - h) + Gamma(alpha, eps, delta + h) -
           2.0 * Gamma(alpha, eps, delta);
  };
  EXPECT_LT(second_difference(1e-4), 0.0);
  EXPECT_GT(second_difference(0.5), 0.0);
}

TEST(GammaExactTest, MonotoneInEpsilon) {
  double previous = 0.0;
  for (double eps = 0.0; eps <= 5.0; eps += 0.1) {
    const double g = Gamma(2.5, eps, 1e-3);
    EXPECT_GE(g, previous - 1e-9);
    previous = g;
  }
}

TEST(GammaExactTest, RejectsInvalidInputs) {
  EXPECT_FALSE(GammaExact(Order(2.0), -1.0, 0.1).ok());
  EXPECT_FALSE(GammaExact(Order(2.0), 1.0, 1.0).ok());
  EXPECT_FALSE(GammaExact(Order(2.0), 1.0, -0.1).ok());
}

TEST(GammaLowerBoundTest, KnownValues) {
  // g = 1 - log 25 and f are both evaluated; f is the larger.
  const ConversionResult r = Unwrap(GammaLowerBound(Order(2.0), 1.0, 0.01));
  EXPECT_EQ(r.method, ConversionMethod::kBoundF);
  EXPECT_NEAR(r.value, 0.033872082991612554, 1e-12);
  EXPECT_GT(r.value, 1.0 - std::log(25.0));

  const ConversionResult large = Unwrap(GammaLowerBound(Order(4.0), 1.0, 0.3));
  EXPECT_EQ(large.method, ConversionMethod::kClosedForm);
  EXPECT_NEAR(large.value, 1.0 - std::log(0.7), 1e-15);

  for (double alpha : {1.5, 2.0, 7.0}) {
    EXPECT_EQ(Unwrap(GammaLowerBound(Order(alpha), 1.3, 0.0)).value, 0.0);
  }
}

TEST(GammaLowerBoundTest, FBoundFromItsDefinition) {
  const double alpha = 2.0, eps = 1.0, delta = 0.01;
  const double e = std::exp(eps);
  const double f =
      eps + std::log((e - alpha * delta) *
                         std::pow((delta - 1) / (delta - e), alpha) +
                     alpha * delta) /
                (alpha - 1);
  EXPECT_NEAR(Unwrap(GammaLowerBound(Order(alpha), eps, delta)).value, f,
              1e-12);
}

TEST(GammaLowerBoundTest, SandwichBelowExact) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double alpha = 1.05 + 20.0 * unit(rng);
    const double eps = 4.0 * unit(rng);
    const double delta = std::exp(std::log(1e-8) * unit(rng)) * 0.99;
    const double bound = Unwrap(GammaLowerBound(Order(alpha), eps, delta)).value;
    const double exact = Gamma(alpha, eps, delta);
    EXPECT_LE(bound, exact + 1e-9) << alpha << " " << eps << " " << delta;
    if (alpha * delta >= 1.0) EXPECT_NEAR(bound, exact, 1e-9);
  }
}

TEST(EpsilonUpperBoundTest, KnownValues) {
  EXPECT_EQ(Unwrap(EpsilonUpperBound(Order(2.0), 0.0, 1e-4)).value, 0.0);
  EXPECT_NEAR(Unwrap(EpsilonUpperBound(Order(4.0), 1.356675, 0.3)).value, 1.0,
              1e-6);
  const ConversionResult r = Unwrap(EpsilonUpperBound(Order(2.0), 0.5, 1e-4));
  EXPECT_NEAR(r.value, 8.08480, 1e-4);
  EXPECT_NEAR(r.value, 8.084749313151242, 1e-12);
  EXPECT_EQ(r.method, ConversionMethod::kBoundF);
}

TEST(EpsilonUpperBoundTest, TermsFromTheirDefinitions) {
  const double alpha = 2.0, gamma = 0.5, delta = 1e-4;
  const double zeta = 0.25;
  const double first = gamma - std::log(delta / zeta) / (alpha - 1);
  const double second =
      std::log((std::exp((alpha - 1) * gamma) - 1) / (alpha * delta) + 1) /
      (alpha - 1);
  EXPECT_NEAR(first, 8.324046010856292, 1e-12);
  EXPECT_NEAR(Unwrap(EpsilonUpperBound(Order(alpha), gamma, delta)).value,
              std::min(first, second), 1e-12);
}

TEST(EpsilonUpperBoundTest, TendsToZeroWithGamma) {
  for (double delta : {1e-8, 1e-4, 0.1}) {
    double previous = 1e300;
    for (double gamma : {1.0, 0.1, 1e-2, 1e-3, 1e-5, 1e-8, 1e-11, 1e-14}) {
      const double eps =
          Unwrap(EpsilonUpperBound(Order(2.0), gamma, delta)).value;
      EXPECT_LE(eps, previous);
      previous = eps;
    }
    EXPECT_LT(previous, 1e-3) << delta;
  }
}

TEST(EpsilonUpperBoundTest, RejectsDeltaOutsideOpenInterval) {
  EXPECT_FALSE(EpsilonUpperBound(Order(2.0), 0.5, 0.0).ok());
  EXPECT_FALSE(EpsilonUpperBound(Order(2.0), 0.5, 1.0).ok());
}

TEST(EpsilonExactTest, KnownValues) {
  EXPECT_EQ(Unwrap(EpsilonExact(Order(2.0), 0.0, 1e-4)).value, 0.0);
  const double eps = Unwrap(EpsilonExact(Order(2.0), 0.5, 1e-4)).value;
  EXPECT_LE(eps, 8.08480);
  EXPECT_NEAR(Gamma(2.0, eps, 1e-4), 0.5, 1e-8);
  EXPECT_NEAR(Unwrap(EpsilonExact(Order(4.0), 1.0 - std::log(0.7), 0.3)).value,
              1.0, 1e-8);
}

TEST(EpsilonExactTest, NeverAboveUpperBound) {
  for (double alpha : {1.5, 2.0, 8.0}) {
    for (double gamma : {0.01, 0.3, 2.0}) {
      for (double delta : {1e-6, 1e-3, 0.2}) {
        EXPECT_LE(Unwrap(EpsilonExact(Order(alpha), gamma, delta)).value,
                  Unwrap(EpsilonUpperBound(Order(alpha), gamma, delta)).value +
                      1e-9);
      }
    }
  }
}

TEST(DeltaExactTest, KnownValues) {
  EXPECT_EQ(Unwrap(DeltaExact(Order(3.0), 0.0, 0.7)).value, 0.0);
  EXPECT_NEAR(Unwrap(DeltaExact(Order(4.0), 1.0 - std::log(0.7), 1.0)).value,
              0.3, 1e-8);
  EXPECT_LE(Unwrap(DeltaExact(Order(2.0), 0.5, 8.08480)).value, 1e-4);
}

TEST(DeltaExactTest, ResultIsBelowOne) {
  const absl::StatusOr<ConversionResult> r = DeltaExact(Order(2.0), 5.0, 0.0);
  if (r.ok()) {
    EXPECT_LT(r->value, 1.0);
  } else {
    EXPECT_EQ(r.status().code(), absl::StatusCode::kOutOfRange);
  }
}

TEST(RoundTripTest, DeltaAndEpsilonInvertGamma) {
  for (double alpha : {1.5, 2.0, 4.0, 16.0}) {
    for (double eps : {0.05, 0.7, 2.0, 5.0}) {
      for (double delta : {1e-6, 1e-4, 1e-2, 0.2, 0.5}) {
        const double gamma = Gamma(alpha, eps, delta);
        EXPECT_NEAR(Unwrap(DeltaExact(Order(alpha), gamma, eps)).value, delta,
                    1e-6)
            << alpha << " " << eps << " " << delta;
        EXPECT_NEAR(Unwrap(EpsilonExact(Order(alpha), gamma, delta)).value, eps,
                    1e-6)
            << alpha << " " << eps << " " << delta;
      }
    }
  }
}

TEST(AbadiDeltaTest, KnownValues) {
  EXPECT_NEAR(Unwrap(AbadiDelta(Order(2.0), 0.5, 8.08480)), std::exp(-7.5848),
              1e-15);
  EXPECT_NEAR(Unwrap(AbadiDelta(Order(2.0), 0.5, 8.08480)), 5.076e-4, 1e-6);
  EXPECT_NEAR(Unwrap(AbadiDelta(Order(2.0), 0.0, 0.1)), 0.904837, 1e-6);
  EXPECT_LT(Unwrap(AbadiDelta(Order(2.0), 0.0, 800.0)), 1e-300);
  EXPECT_EQ(AbadiDelta(Order(2.0), 0.5, 0.5).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(AbadiDeltaTest, DominatesExactDelta) {
  for (double alpha : {1.5, 2.0, 4.0, 16.0}) {
    for (double gamma : {0.01, 0.1, 0.5, 1.0}) {
      for (double eps : {0.2, 1.0, 3.0}) {
        if (eps <= gamma) continue;
        EXPECT_LE(Unwrap(DeltaExact(Order(alpha), gamma, eps)).value,
                  Unwrap(AbadiDelta(Order(alpha), gamma, eps)));
      }
    }
  }
}

TEST(ZeroEpsilonRangeTest, KnownValues) {
  const auto range = ZeroEpsilonRange(Order(2.0), 0.0);
  ASSERT_TRUE(range.has_value());
  EXPECT_NEAR(range->lo, 0.25, 1e-15);
  EXPECT_NEAR(range->hi, 0.5, 1e-15);
  EXPECT_FALSE(ZeroEpsilonRange(Order(2.0), std::log(2.0)).has_value());

  const auto shifted = ZeroEpsilonRange(Order(2.0), 0.1);
  ASSERT_TRUE(shifted.has_value());
  EXPECT_NEAR(shifted->lo, 0.25 * std::exp(0.1), 1e-15);
  EXPECT_EQ(Unwrap(EpsilonUpperBound(Order(2.0), 0.1, 0.3)).value, 0.0);
}

TEST(ZeroEpsilonRangeTest, UpperBoundVanishesInsideRange) {
  for (double alpha : {1.5, 3.0, 6.0}) {
    const double gamma = 0.3 * std::log(alpha / (alpha - 1));
    const auto range = ZeroEpsilonRange(Order(alpha), gamma);
    ASSERT_TRUE(range.has_value());
    for (int k = 0; k <= 10; ++k) {
      const double delta = range->lo + (range->hi - range->lo) * k / 10.0;
      EXPECT_NEAR(Unwrap(EpsilonUpperBound(Order(alpha), gamma, delta)).value,
                  0.0, 1e-12);
    }
  }
}

TEST(ZeroEpsilonThresholdTest, AboveThresholdGivesZero) {
  for (double gamma : {0.05, 0.5, 2.0}) {
    const double t = ZeroEpsilonThreshold(Order(2.0), gamma);
    EXPECT_NEAR(t, std::max(1.0 - std::exp(-gamma), 0.5), 1e-15);
    const double delta = 0.5 * (t + 1.0);
    EXPECT_EQ(Unwrap(EpsilonUpperBound(Order(2.0), gamma, delta)).value, 0.0);
  }
}

TEST(JointRangeTest, BinaryPairsRespectExactConversion) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const BinaryDistributionPair pair{unit(rng), unit(rng)};
    const RenyiOrder order = Order(1.05 + 15.0 * unit(rng));
    const double eps = 3.0 * unit(rng);
    const double delta = Unwrap(HockeyStickBinary(pair, std::exp(eps)));
    const double renyi =
        ChiInverse(order, Unwrap(ChiAlphaBinary(pair, order)));
    EXPECT_GE(renyi, Unwrap(GammaExact(order, eps, delta)).value - 1e-7);
  }
}

}  // namespace
}  // namespace dpconv
