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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dpconv/divergences.h"
#include "dpconv/numerics.h"

namespace dpconv {
namespace {

// Relative margin kept between p and 1 in the exact search.
constexpr double kUpperMargin = 1e-12;
constexpr double kMinDelta = 1e-300;
constexpr double kMaxDelta = 1.0 - 1e-12;

absl::Status ValidateEpsDelta(double eps, double delta) {
  return ApproxDpPoint{eps, delta}.Validate();
}

absl::Status ValidateGamma(double gamma) {
  if (!(gamma >= 0.0) || std::isinf(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gamma must be finite and >= 0, got %g", gamma));
  }
  return absl::OkStatus();
}

absl::Status ValidateOpenDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

// log h1 as a function of u = log(p - delta), for u < log(1 - delta).
double LogH1OfU(double u, double alpha, double eps, double delta,
                double log_one_minus_delta) {
  const double log_p = std::log(delta + std::exp(u));
  // 1 - p = (1 - delta)(1 - e^(u - log(1 - delta))).
  const double log_p_bar =
      log_one_minus_delta + std::log(-std::expm1(u - log_one_minus_delta));
  // e^eps - (p - delta) = e^eps (1 - e^(u - eps)).
  const double log_slack = eps + std::log(-std::expm1(u - eps));
  return LogSumExp({alpha * log_p + (1.0 - alpha) * u,
                    alpha * log_p_bar + (1.0 - alpha) * log_slack});
}

// log(1 + expm1(x) / c) for x >= 0 and 0 < c < 1, without overflow.
double LogOnePlusExpm1Over(double x, double c) {
  if (x > 1.0) return x + std::log1p((c - 1.0) * std::exp(-x)) - std::log(c);
  return std::log1p(std::expm1(x) / c);
}

}  // namespace

absl::Status ApproxDpPoint::Validate() const {
  if (!(epsilon >= 0.0) || std::isinf(epsilon) ||
      !(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need finite eps >= 0 and delta in [0, 1), got eps=%g delta=%g",
        epsilon, delta));
  }
  return absl::OkStatus();
}

absl::Status RenyiPoint::Validate() const { return ValidateGamma(gamma); }

std::string_view ConversionMethodName(ConversionMethod method) {
  switch (method) {
    case ConversionMethod::kExact:
      return "exact";
    case ConversionMethod::kBoundG:
      return "bound-g";
    case ConversionMethod::kBoundF:
      return "bound-f";
    case ConversionMethod::kClosedForm:
      return "closed-form";
  }
  return "unknown";
}

double LogZeta(RenyiOrder order) {
  const double alpha = order.alpha();
  return -std::log(alpha) + order.minus_one() * std::log1p(-1.0 / alpha);
}

absl::StatusOr<double> H1Objective(double p, RenyiOrder order, double eps,
                                   double delta) {
  if (absl::Status s = ValidateEpsDelta(eps, delta); !s.ok()) return s;
  if (!(p > delta && p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("h1 requires p in (delta, 1), got p=%g delta=%g", p,
                        delta));
  }
  const double log_one_minus_delta = std::log1p(-delta);
  return std::exp(LogH1OfU(std::log(p - delta), order.alpha(), eps, delta,
                           log_one_minus_delta));
}

absl::StatusOr<ConversionResult> GammaExact(RenyiOrder order, double eps,
                                            double delta,
                                            const Tolerance& tol) {
  if (absl::Status s = ValidateEpsDelta(eps, delta); !s.ok()) return s;
  if (delta == 0.0) return ConversionResult{0.0, std::nullopt,
                                            ConversionMethod::kExact};
  const double alpha = order.alpha();
  const double log_one_minus_delta = std::log1p(-delta);
  // Infimum of h1 as p -> 1.
  const double log_boundary = -order.minus_one() * log_one_minus_delta;

  // The first term of h1 is minimized at p = alpha * delta and the second is
  // decreasing, so the minimizer satisfies p >= alpha * delta.
  const double u_hi = log_one_minus_delta + std::log1p(-kUpperMargin);
  const double u_lo =
      std::min(std::log(order.minus_one() * delta) - 1.0, u_hi - 1.0);
  absl::StatusOr<ScalarMinimum> minimum = MinimizeConvexScalar(
      [&](double u) {
        return LogH1OfU(u, alpha, eps, delta, log_one_minus_delta);
      },
      u_lo, u_hi, tol);
  if (!minimum.ok()) return minimum.status();

  double log_m = minimum->value;
  std::optional<double> minimizer = delta + std::exp(minimum->argmin);
  if (log_boundary <= log_m) {
    log_m = log_boundary;
    minimizer.reset();
  }
  const double gamma = std::max(0.0, eps + log_m / order.minus_one());
  return ConversionResult{gamma, minimizer, ConversionMethod::kExact};
}

absl::StatusOr<ConversionResult> GammaLowerBound(RenyiOrder order, double eps,
                                                 double delta) {
  if (absl::Status s = ValidateEpsDelta(eps, delta); !s.ok()) return s;
  if (delta == 0.0) {
    return ConversionResult{0.0, std::nullopt, ConversionMethod::kClosedForm};
  }
  const double alpha = order.alpha();
  if (alpha * delta >= 1.0) {
    return ConversionResult{eps - std::log1p(-delta), std::nullopt,
                            ConversionMethod::kClosedForm};
  }
  const double g = eps - (LogZeta(order) - std::log(delta)) / order.minus_one();
  // log[(e^eps - alpha delta) ((1 - delta) / (e^eps - delta))^alpha].
  const double scaled_delta = std::exp(-eps) * delta;
  const double log_first =
      eps + std::log1p(-alpha * scaled_delta) +
      alpha * (std::log1p(-delta) - eps - std::log1p(-scaled_delta));
  const double f =
      eps + LogSumExp({log_first, std::log(alpha * delta)}) /
                order.minus_one();
  if (g > f) return ConversionResult{g, std::nullopt, ConversionMethod::kBoundG};
  return ConversionResult{f, std::nullopt, ConversionMethod::kBoundF};
}

absl::StatusOr<ConversionResult> EpsilonUpperBound(RenyiOrder order,
                                                   double gamma,
                                                   double delta) {
  if (absl::Status s = ValidateGamma(gamma); !s.ok()) return s;
  if (absl::Status s = ValidateOpenDelta(delta); !s.ok()) return s;
  const double alpha = order.alpha();
  if (alpha * delta >= 1.0) {
    return ConversionResult{std::max(0.0, gamma + std::log1p(-delta)),
                            std::nullopt, ConversionMethod::kClosedForm};
  }
  const double g = std::max(
      0.0, gamma - (std::log(delta) - LogZeta(order)) / order.minus_one());
  const double f =
      LogOnePlusExpm1Over(order.minus_one() * gamma, alpha * delta) /
      order.minus_one();
  if (g < f) return ConversionResult{g, std::nullopt, ConversionMethod::kBoundG};
  return ConversionResult{f, std::nullopt, ConversionMethod::kBoundF};
}

absl::StatusOr<ConversionResult> EpsilonExact(RenyiOrder order, double gamma,
                                              double delta,
                                              const Tolerance& tol) {
  if (absl::Status s = ValidateGamma(gamma); !s.ok()) return s;
  if (absl::Status s = ValidateOpenDelta(delta); !s.ok()) return s;
  if (gamma == 0.0) {
    return ConversionResult{0.0, std::nullopt, ConversionMethod::kExact};
  }
  absl::Status failure;
  auto gamma_at = [&](double eps) -> std::optional<ConversionResult> {
    absl::StatusOr<ConversionResult> r = GammaExact(order, eps, delta, tol);
    if (!r.ok()) {
      if (failure.ok()) failure = r.status();
      return std::nullopt;
    }
    return *r;
  };
  std::optional<ConversionResult> at_zero = gamma_at(0.0);
  if (!at_zero) return failure;
  if (at_zero->value >= gamma) {
    return ConversionResult{0.0, at_zero->minimizer_p,
                            ConversionMethod::kExact};
  }
  absl::StatusOr<ConversionResult> bound =
      EpsilonUpperBound(order, gamma, delta);
  if (!bound.ok()) return bound.status();
  double hi = bound->value;
  for (int i = 0;; ++i) {
    std::optional<ConversionResult> at_hi = gamma_at(hi);
    if (!at_hi) return failure;
    if (at_hi->value >= gamma) break;
    if (i == 64) {
      return absl::InternalError(absl::StrFormat(
          "no eps <= %g reaches gamma=%g at delta=%g", hi, gamma, delta));
    }
    hi = 2.0 * hi + 1.0;
  }
  absl::StatusOr<RootBracket> bracket = BracketRootMonotone(
      [&](double eps) {
        std::optional<ConversionResult> r = gamma_at(eps);
        return r ? r->value - gamma : 0.0;
      },
      0.0, hi, tol);
  if (!failure.ok()) return failure;
  if (!bracket.ok()) return bracket.status();
  std::optional<ConversionResult> at_root = gamma_at(bracket->hi);
  if (!at_root) return failure;
  return ConversionResult{bracket->hi, at_root->minimizer_p,
                          ConversionMethod::kExact};
}

absl::StatusOr<ConversionResult> DeltaExact(RenyiOrder order, double gamma,
                                            double eps, const Tolerance& tol) {
  if (absl::Status s = ValidateGamma(gamma); !s.ok()) return s;
  if (!(eps >= 0.0) || std::isinf(eps)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eps must be finite and >= 0, got %g", eps));
  }
  if (gamma == 0.0) {
    return ConversionResult{0.0, std::nullopt, ConversionMethod::kExact};
  }
  absl::Status failure;
  auto excess = [&](double log_delta) {
    absl::StatusOr<ConversionResult> r =
        GammaExact(order, eps, std::exp(log_delta), tol);
    if (!r.ok()) {
      if (failure.ok()) failure = r.status();
      return 0.0;
    }
    return r->value - gamma;
  };
  const double lo = std::log(kMinDelta);
  double hi = std::log(kMaxDelta);
  if (eps > gamma) {
    // The baseline delta is itself sufficient; use it to tighten the bracket.
    const double log_baseline = -order.minus_one() * (eps - gamma);
    if (log_baseline > lo && log_baseline < hi && excess(log_baseline) >= 0.0) {
      hi = log_baseline;
    }
  }
  const double at_lo = excess(lo);
  if (!failure.ok()) return failure;
  if (at_lo >= 0.0) {
    return ConversionResult{kMinDelta, std::nullopt, ConversionMethod::kExact};
  }
  const double at_hi = excess(hi);
  if (!failure.ok()) return failure;
  if (at_hi < 0.0) {
    return absl::OutOfRangeError(absl::StrFormat(
        "no delta below 1 - 1e-12 certifies (alpha=%g, gamma=%g) at eps=%g",
        order.alpha(), gamma, eps));
  }
  absl::StatusOr<RootBracket> bracket = BracketRootMonotone(excess, lo, hi, tol);
  if (!failure.ok()) return failure;
  if (!bracket.ok()) return bracket.status();
  return ConversionResult{std::exp(bracket->hi), std::nullopt,
                          ConversionMethod::kExact};
}

absl::StatusOr<double> AbadiDelta(RenyiOrder order, double gamma, double eps) {
  if (absl::Status s = ValidateGamma(gamma); !s.ok()) return s;
  if (!(eps > gamma)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "baseline conversion requires eps > gamma, got eps=%g gamma=%g", eps,
        gamma));
  }
  return std::exp(-order.minus_one() * (eps - gamma));
}

std::optional<ProbabilityInterval> ZeroEpsilonRange(RenyiOrder order,
                                                    double gamma) {
  const double alpha = order.alpha();
  if (gamma >= std::log(alpha / order.minus_one())) return std::nullopt;
  return ProbabilityInterval{
      std::exp(LogZeta(order) + order.minus_one() * gamma), 1.0 / alpha};
}

double ZeroEpsilonThreshold(RenyiOrder order, double gamma) {
  return std::max(-std::expm1(-gamma), 1.0 / order.alpha());
}

}  // namespace dpconv
