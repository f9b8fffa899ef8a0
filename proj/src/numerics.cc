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

#include "dpconv/numerics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/cord.h"
#include "absl/strings/str_format.h"

namespace dpconv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rational approximation of the lower-tail normal quantile with relative
// error below 1.2e-9 (P. J. Acklam). Used only as a Newton starting point.
double AcklamLowerQuantile(double u) {
  static constexpr std::array<double, 6> a = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double kLowBreak = 0.02425;
  if (u < kLowBreak) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Quantile for u in (0, 0.5].
double LowerQuantile(double u) {
  double x = AcklamLowerQuantile(u);
  for (int i = 0; i < 2; ++i) {
    const double density = std::exp(NormalLogPdf(x));
    if (!(density > 0.0)) break;
    x -= (NormalCdf(x) - u) / density;
  }
  return x;
}

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment GaussKronrod15(absl::FunctionRef<double(double)> fn, double lo,
                       double hi) {
  static constexpr std::array<double, 8> kNodes = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> kKronrodWeights = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> kGaussWeights = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = fn(center);
  double kronrod = kKronrodWeights[7] * f_center;
  double gauss = kGaussWeights[3] * f_center;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = fn(center - dx) + fn(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

absl::Status Tolerance::Validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol >= 0.0) || max_iters < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "invalid tolerance: abs_tol=%g rel_tol=%g max_iters=%d", abs_tol,
        rel_tol, max_iters));
  }
  return absl::OkStatus();
}

double NormalCdf(double x) {
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
  // u = -x / sqrt(2) split as u_hi + u_lo. Rounding u alone would cost a
  // relative error of about 2 u^2 ulp in the tail; the first-order term
  // erfc'(u_hi) u_lo restores it.
  constexpr double kInvSqrt2Hi = 0.7071067811865476;
  constexpr double kInvSqrt2Lo = -4.833646656726457e-17;
  const double u_hi = -x * kInvSqrt2Hi;
  const double u_lo = std::fma(-x, kInvSqrt2Hi, -u_hi) + -x * kInvSqrt2Lo;
  const double slope = -2.0 / std::sqrt(std::numbers::pi) * std::exp(-u_hi * u_hi);
  return 0.5 * (std::erfc(u_hi) + slope * u_lo);
}

double NormalLogPdf(double x) {
  constexpr double kLogSqrtTwoPi =
      0.91893853320467274178032973640561763986139747363778;
  return -0.5 * x * x - kLogSqrtTwoPi;
}

absl::StatusOr<double> NormalCdfInverse(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("normal quantile requires u in (0, 1), got %g", u));
  }
  // 1 - u is exact for u >= 0.5.
  if (u > 0.5) return -LowerQuantile(1.0 - u);
  return LowerQuantile(u);
}

double LogSumExp(std::span<const double> terms) {
  double peak = -kInf;
  for (double t : terms) peak = std::max(peak, t);
  if (std::isinf(peak)) return peak;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

double LogSumExp(std::initializer_list<double> terms) {
  return LogSumExp(std::span<const double>(terms.begin(), terms.size()));
}

double LogDiffExp(double a, double b) {
  if (b == -kInf) return a;
  if (a == b) return -kInf;
  return a + std::log(-std::expm1(b - a));
}

absl::StatusOr<ScalarMinimum> MinimizeConvexScalar(
    absl::FunctionRef<double(double)> objective, double lo, double hi,
    const Tolerance& tol) {
  if (absl::Status s = tol.Validate(); !s.ok()) return s;
  if (!(lo < hi)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("empty search interval [%g, %g]", lo, hi));
  }
  constexpr double kInvPhi = 0.61803398874989484820458683436563811772030918;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int iter = 0; iter < tol.max_iters; ++iter) {
    const double width = b - a;
    if (width <= tol.abs_tol + tol.rel_tol * std::abs(0.5 * (a + b))) {
      return fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "golden-section search did not contract to %g within %d iterations "
      "(bracket [%.17g, %.17g])",
      tol.abs_tol, tol.max_iters, a, b));
}

absl::StatusOr<RootBracket> BracketRootMonotone(
    absl::FunctionRef<double(double)> fn, double lo, double hi,
    const Tolerance& tol) {
  if (absl::Status s = tol.Validate(); !s.ok()) return s;
  const double f_lo = fn(lo);
  const double f_hi = fn(hi);
  if (f_lo == 0.0) return RootBracket{lo, lo};
  if (f_hi == 0.0) return RootBracket{hi, hi};
  if (std::isnan(f_lo) || std::isnan(f_hi) ||
      std::signbit(f_lo) == std::signbit(f_hi)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "root not bracketed: f(%.17g)=%g, f(%.17g)=%g", lo, f_lo, hi, f_hi));
  }
  const bool lo_negative = f_lo < 0.0;
  for (int iter = 0; iter < tol.max_iters; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol.abs_tol + tol.rel_tol * std::abs(mid) || mid == lo ||
        mid == hi) {
      return RootBracket{lo, hi};
    }
    const double f_mid = fn(mid);
    if (f_mid == 0.0) return RootBracket{mid, mid};
    if ((f_mid < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "bisection did not reach width %g within %d iterations "
      "(bracket [%.17g, %.17g])",
      tol.abs_tol, tol.max_iters, lo, hi));
}

absl::StatusOr<double> FindRootMonotone(absl::FunctionRef<double(double)> fn,
                                        double lo, double hi,
                                        const Tolerance& tol) {
  absl::StatusOr<RootBracket> bracket = BracketRootMonotone(fn, lo, hi, tol);
  if (!bracket.ok()) return bracket.status();
  return 0.5 * (bracket->lo + bracket->hi);
}

absl::StatusOr<QuadratureResult> IntegrateAdaptive(
    absl::FunctionRef<double(double)> fn, std::span<const double> knots,
    const Tolerance& tol) {
  if (absl::Status s = tol.Validate(); !s.ok()) return s;
  if (knots.size() < 2) {
    return absl::InvalidArgumentError("integration needs at least two knots");
  }
  for (size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i]) || (i > 0 && !(knots[i] >= knots[i - 1]))) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "integration knots must be finite and nondecreasing, got %g at %d",
          knots[i], i));
    }
  }
  double lo = knots.front();
  double hi = knots.back();
  if (lo == hi) return QuadratureResult{0.0, 0.0, 0.0, 0};

  double clipped_mass = 0.0;
  const bool clip = hi - lo > 4.0 * kQuadratureClip;
  if (clip) {
    lo += kQuadratureClip;
    hi -= kQuadratureClip;
    clipped_mass = kQuadratureClip * (fn(lo) + fn(hi));
    if (!std::isfinite(clipped_mass)) clipped_mass = 0.0;
  }

  std::priority_queue<Segment> queue;
  double total = 0.0;
  double error = 0.0;
  int subintervals = 0;
  double left_end = lo;
  for (size_t i = 1; i < knots.size(); ++i) {
    const double right_end = i + 1 == knots.size() ? hi : knots[i];
    if (!(right_end > left_end)) continue;
    Segment piece = GaussKronrod15(fn, left_end, right_end);
    total += piece.value;
    error += piece.error;
    queue.push(piece);
    ++subintervals;
    left_end = right_end;
  }
  auto converged = [&] {
    return error <= std::max(tol.abs_tol, tol.rel_tol * std::abs(total));
  };
  for (int iter = 0; iter < tol.max_iters && !converged(); ++iter) {
    Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Unsplittable at double precision; keep its estimate as is.
      queue.push(worst);
      break;
    }
    Segment left = GaussKronrod15(fn, worst.lo, mid);
    Segment right = GaussKronrod15(fn, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++subintervals;
  }
  // Recompute the sums to shed accumulated cancellation.
  total = 0.0;
  error = 0.0;
  std::vector<Segment> segments;
  segments.reserve(queue.size());
  while (!queue.empty()) {
    segments.push_back(queue.top());
    queue.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  for (const Segment& s : segments) {
    total += s.value;
    error += s.error;
  }
  total += clipped_mass;
  if (!std::isfinite(total) || !converged()) {
    absl::Status status = absl::ResourceExhaustedError(absl::StrFormat(
        "quadrature tolerance not met: estimate %.17g, error %g after %d "
        "subintervals",
        total, error, subintervals));
    status.SetPayload("dpconv/estimate",
                      absl::Cord(absl::StrFormat("%.17g", total)));
    return status;
  }
  return QuadratureResult{total, error, clipped_mass, subintervals};
}

absl::StatusOr<QuadratureResult> IntegrateAdaptive(
    absl::FunctionRef<double(double)> fn, double lo, double hi,
    const Tolerance& tol) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("invalid integration range [%g, %g]", lo, hi));
  }
  const double knots[] = {lo, hi};
  return IntegrateAdaptive(fn, knots, tol);
}

}  // namespace dpconv
