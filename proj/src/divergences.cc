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

#include "dpconv/divergences.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dpconv/numerics.h"

namespace dpconv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool InOpenUnit(double x) { return x > 0.0 && x < 1.0; }

// a^alpha b^(1 - alpha) in log form; the term vanishes when a == 0.
double LogMomentTerm(double a, double b, double alpha) {
  if (a == 0.0) return -kInf;
  if (b == 0.0) return kInf;
  return alpha * std::log(a) + (1.0 - alpha) * std::log(b);
}

// a log(a / b), zero when a == 0.
double KlTerm(double a, double b) {
  if (a == 0.0) return 0.0;
  return a * (std::log(a) - std::log(b));
}

}  // namespace

absl::StatusOr<RenyiOrder> RenyiOrder::Create(double alpha) {
  if (!std::isfinite(alpha) || !(alpha - 1.0 >= kMinOrderGap)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Renyi order must be finite with alpha - 1 >= %g, got %.17g",
        kMinOrderGap, alpha));
  }
  return RenyiOrder(alpha);
}

absl::Status BinaryDistributionPair::Validate() const {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Bernoulli parameters must lie in [0, 1], got p=%g q=%g", p, q));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> HockeyStickBinary(const BinaryDistributionPair& pair,
                                         double lambda) {
  if (absl::Status s = pair.Validate(); !s.ok()) return s;
  if (!(lambda >= 0.0) || std::isinf(lambda)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "hockey-stick parameter must be finite and >= 0, got %g", lambda));
  }
  return std::max(0.0, pair.p - lambda * pair.q) +
         std::max(0.0, (1.0 - pair.p) - lambda * (1.0 - pair.q));
}

absl::StatusOr<double> ChiAlphaBinary(const BinaryDistributionPair& pair,
                                      RenyiOrder order) {
  if (absl::Status s = pair.Validate(); !s.ok()) return s;
  const double alpha = order.alpha();
  const double log_moment =
      LogSumExp({LogMomentTerm(pair.p, pair.q, alpha),
                 LogMomentTerm(1.0 - pair.p, 1.0 - pair.q, alpha)});
  if (log_moment == kInf) return kInf;
  return std::max(0.0, std::expm1(log_moment) / order.minus_one());
}

absl::StatusOr<double> RenyiBinary(double a, double b, RenyiOrder order) {
  if (!InOpenUnit(a) || !InOpenUnit(b)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "binary Renyi divergence requires a, b in (0, 1), got a=%g b=%g", a,
        b));
  }
  return internal::RenyiBinaryComplemented(a, 1.0 - a, b, 1.0 - b,
                                           order.alpha());
}

absl::StatusOr<double> KlBinary(double a, double b) {
  if (!InOpenUnit(a) || !InOpenUnit(b)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "binary KL divergence requires a, b in (0, 1), got a=%g b=%g", a, b));
  }
  return internal::KlBinaryComplemented(a, 1.0 - a, b, 1.0 - b);
}

double ChiOfGamma(RenyiOrder order, double gamma) {
  return std::expm1(order.minus_one() * gamma) / order.minus_one();
}

double ChiInverse(RenyiOrder order, double t) {
  return std::log1p(order.minus_one() * t) / order.minus_one();
}

absl::StatusOr<double> GaussianRenyi(double sigma, RenyiOrder order) {
  if (!(sigma > 0.0) || std::isinf(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("noise scale must be positive and finite, got %g",
                        sigma));
  }
  return order.alpha() / (2.0 * sigma * sigma);
}

double GaussianDeltaEps(double sigma, double eps) {
  const double shift = 1.0 / (2.0 * sigma);
  const double first = NormalCdf(-eps * sigma + shift);
  const double second = std::exp(eps) * NormalCdf(-eps * sigma - shift);
  return std::max(0.0, first - second);
}

namespace internal {

double RenyiBinaryComplemented(double a, double a_bar, double b, double b_bar,
                               double alpha) {
  const double log_moment =
      LogSumExp({alpha * std::log(a) + (1.0 - alpha) * std::log(b),
                 alpha * std::log(a_bar) + (1.0 - alpha) * std::log(b_bar)});
  return std::max(0.0, log_moment / (alpha - 1.0));
}

double KlBinaryComplemented(double a, double a_bar, double b, double b_bar) {
  return std::max(0.0, KlTerm(a, b) + KlTerm(a_bar, b_bar));
}

}  // namespace internal
}  // namespace dpconv
