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

// Conversions between (alpha, gamma)-RDP and (eps, delta)-DP.
//
// gamma_alpha^eps(delta) is the largest gamma such that every
// (alpha, gamma)-RDP mechanism is (eps, delta)-DP. It is computed exactly by a
// one-dimensional convex minimization over the binary joint range, and the
// other exact conversions invert it by bisection.

#ifndef DPCONV_CONVERSION_H_
#define DPCONV_CONVERSION_H_

#include <optional>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpconv/divergences.h"
#include "dpconv/numerics.h"

namespace dpconv {

struct ApproxDpPoint {
  double epsilon;
  double delta;

  // OK iff epsilon >= 0 and 0 <= delta < 1.
  absl::Status Validate() const;
};

struct RenyiPoint {
  RenyiOrder order;
  double gamma;

  // OK iff gamma >= 0.
  absl::Status Validate() const;
};

enum class ConversionMethod { kExact, kBoundG, kBoundF, kClosedForm };

// "exact", "bound-g", "bound-f" or "closed-form".
std::string_view ConversionMethodName(ConversionMethod method);

struct ConversionResult {
  double value;
  // Interior minimizer of the joint-range objective. Present only for exact
  // dp-to-rdp results whose infimum is attained inside (delta, 1).
  std::optional<double> minimizer_p;
  ConversionMethod method;
};

// log zeta_alpha with zeta_alpha = (1/alpha)(1 - 1/alpha)^(alpha - 1).
double LogZeta(RenyiOrder order);

// h1(p) = p^a (p - d)^(1 - a) + (1 - p)^a (e^eps - p + d)^(1 - a) for
// p in (delta, 1). Evaluated in log domain.
absl::StatusOr<double> H1Objective(double p, RenyiOrder order, double eps,
                                   double delta);

// Exact gamma_alpha^eps(delta). Zero at delta = 0.
absl::StatusOr<ConversionResult> GammaExact(RenyiOrder order, double eps,
                                            double delta,
                                            const Tolerance& tol = {});

// Closed-form lower bound on gamma_alpha^eps(delta): exact when
// alpha * delta >= 1, otherwise the larger of the g and f bounds.
absl::StatusOr<ConversionResult> GammaLowerBound(RenyiOrder order, double eps,
                                                 double delta);

// Closed-form eps guaranteed by (alpha, gamma)-RDP at the given delta in
// (0, 1). Tends to 0 as gamma -> 0.
absl::StatusOr<ConversionResult> EpsilonUpperBound(RenyiOrder order,
                                                   double gamma, double delta);

// Smallest eps with gamma_exact(alpha, eps, delta) >= gamma. The value is
// the upper end of the final bisection bracket.
absl::StatusOr<ConversionResult> EpsilonExact(RenyiOrder order, double gamma,
                                              double delta,
                                              const Tolerance& tol = {});

// Smallest delta with gamma_exact(alpha, eps, delta) >= gamma. The value is
// the upper end of the final bisection bracket (searched in log delta), so it
// is never below the true delta by more than the bracket width. Returns
// OutOfRange when no delta < 1 - 1e-12 suffices.
absl::StatusOr<ConversionResult> DeltaExact(RenyiOrder order, double gamma,
                                            double eps,
                                            const Tolerance& tol = {});

// Baseline delta = exp(-(alpha - 1)(eps - gamma)). Requires eps > gamma.
absl::StatusOr<double> AbadiDelta(RenyiOrder order, double gamma, double eps);

struct ProbabilityInterval {
  double lo;
  double hi;
};

// The delta interval [zeta_alpha e^((alpha - 1) gamma), 1/alpha] on which
// EpsilonUpperBound is zero. Empty when gamma >= log(alpha / (alpha - 1)).
std::optional<ProbabilityInterval> ZeroEpsilonRange(RenyiOrder order,
                                                     double gamma);

// max(1 - e^-gamma, 1/alpha): every delta above it gives eps = 0 through the
// alpha * delta >= 1 branch.
double ZeroEpsilonThreshold(RenyiOrder order, double gamma);

}  // namespace dpconv

#endif  // DPCONV_CONVERSION_H_
