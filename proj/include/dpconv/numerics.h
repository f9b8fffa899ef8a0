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

// Scalar special functions and one-dimensional solvers shared by the rest of
// the library. Every routine is pure and safe to call concurrently.

#ifndef DPCONV_NUMERICS_H_
#define DPCONV_NUMERICS_H_

#include <initializer_list>
#include <span>

#include "absl/functional/function_ref.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpconv {

// Stopping rule shared by the iterative solvers.
struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_iters = 200;

  // OK iff abs_tol > 0, rel_tol >= 0 and max_iters >= 1.
  absl::Status Validate() const;
};

// Standard normal CDF. Total: -inf maps to 0 and +inf maps to 1.
double NormalCdf(double x);

// Log of the standard normal density.
double NormalLogPdf(double x);

// Inverse of NormalCdf on (0, 1). Returns InvalidArgument outside (0, 1).
absl::StatusOr<double> NormalCdfInverse(double u);

// log(sum_i exp(terms[i])). Entries may be -inf; an empty span yields -inf.
double LogSumExp(std::span<const double> terms);
double LogSumExp(std::initializer_list<double> terms);

// log(exp(a) - exp(b)) for a >= b. Returns -inf when a == b.
double LogDiffExp(double a, double b);

struct ScalarMinimum {
  double argmin;
  double value;
};

// Golden-section search for the minimum of a unimodal function on [lo, hi].
// The objective is never evaluated at lo or hi, so it may diverge there.
// Contraction stops once the bracket is narrower than
// abs_tol + rel_tol * |midpoint|.
absl::StatusOr<ScalarMinimum> MinimizeConvexScalar(
    absl::FunctionRef<double(double)> objective, double lo, double hi,
    const Tolerance& tol = {});

// Final bisection bracket. fn(lo) and fn(hi) keep the signs fn had at the
// initial endpoints, so callers can pick the side that is conservative for
// them. lo == hi when an exact zero was hit.
struct RootBracket {
  double lo;
  double hi;
};

// Bisection for a root of a monotone function whose values at lo and hi have
// opposite signs (a zero at either end is accepted). Stops when the bracket
// is narrower than abs_tol + rel_tol * |midpoint|. Returns InvalidArgument
// when the signs agree.
absl::StatusOr<RootBracket> BracketRootMonotone(
    absl::FunctionRef<double(double)> fn, double lo, double hi,
    const Tolerance& tol = {});

// Midpoint of the bracket returned by BracketRootMonotone.
absl::StatusOr<double> FindRootMonotone(absl::FunctionRef<double(double)> fn,
                                        double lo, double hi,
                                        const Tolerance& tol = {});

struct QuadratureResult {
  double value;
  double error_estimate;
  // Rectangle estimate of the mass in the clipped end strips. It is already
  // included in `value`.
  double clipped_mass;
  int subintervals;
};

// Width of the strips removed at each finite endpoint before quadrature.
inline constexpr double kQuadratureClip = 1e-10;

// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [lo, hi]. The
// endpoints are clipped by kQuadratureClip and the nodes are interior, so
// integrable endpoint singularities are never evaluated. Subdivision stops
// when the summed error estimate is at most max(abs_tol, rel_tol * |value|);
// tol.max_iters caps the number of bisections. On failure the status is
// ResourceExhausted and carries the best estimate in its message and in the
// "dpconv/estimate" payload.
absl::StatusOr<QuadratureResult> IntegrateAdaptive(
    absl::FunctionRef<double(double)> fn, double lo, double hi,
    const Tolerance& tol = {});

// As above on [knots.front(), knots.back()], starting from the partition the
// knots define. Only the two outer ends are clipped. Seeding the partition
// keeps narrow features from being missed by the first 15-point rule.
absl::StatusOr<QuadratureResult> IntegrateAdaptive(
    absl::FunctionRef<double(double)> fn, std::span<const double> knots,
    const Tolerance& tol = {});

}  // namespace dpconv

#endif  // DPCONV_NUMERICS_H_
