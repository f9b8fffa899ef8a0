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

// Divergences between Bernoulli pairs and closed forms for the Gaussian
// mechanism with unit L2 sensitivity.

#ifndef DPCONV_DIVERGENCES_H_
#define DPCONV_DIVERGENCES_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpconv {

// Rényi order alpha > 1. Orders with alpha - 1 < kMinOrderGap are rejected
// because every conversion formula divides by alpha - 1.
class RenyiOrder {
 public:
  static constexpr double kMinOrderGap = 1e-9;

  static absl::StatusOr<RenyiOrder> Create(double alpha);

  double alpha() const { return alpha_; }
  double minus_one() const { return alpha_ - 1.0; }

 private:
  explicit RenyiOrder(double alpha) : alpha_(alpha) {}

  double alpha_;
};

// Two Bernoulli distributions P = Bern(p) and Q = Bern(q).
struct BinaryDistributionPair {
  double p;
  double q;

  // OK iff p and q lie in [0, 1].
  absl::Status Validate() const;
};

// E_lambda(P || Q) = (p - lambda q)_+ + (1 - p - lambda (1 - q))_+.
absl::StatusOr<double> HockeyStickBinary(const BinaryDistributionPair& pair,
                                         double lambda);

// chi^alpha(P || Q). +inf when Q puts zero mass where P does not.
absl::StatusOr<double> ChiAlphaBinary(const BinaryDistributionPair& pair,
                                      RenyiOrder order);

// d_alpha(a || b) for a, b in (0, 1).
absl::StatusOr<double> RenyiBinary(double a, double b, RenyiOrder order);

// Binary KL divergence d(a || b) for a, b in (0, 1).
absl::StatusOr<double> KlBinary(double a, double b);

// chi(gamma) = (exp((alpha - 1) gamma) - 1) / (alpha - 1).
double ChiOfGamma(RenyiOrder order, double gamma);

// Inverse of ChiOfGamma: log(1 + (alpha - 1) t) / (alpha - 1).
double ChiInverse(RenyiOrder order, double t);

// Rényi divergence of order alpha between N(0, sigma^2) and N(1, sigma^2).
absl::StatusOr<double> GaussianRenyi(double sigma, RenyiOrder order);

// Smallest delta for which the Gaussian mechanism with noise sigma is
// (eps, delta)-DP. Never negative.
double GaussianDeltaEps(double sigma, double eps);

namespace internal {

// d_alpha and d with each probability passed together with its complement
// so that values within rounding of 0 or 1 keep full relative precision.
// Arguments must be positive; no validation is performed.
double RenyiBinaryComplemented(double a, double a_bar, double b, double b_bar,
                               double alpha);
double KlBinaryComplemented(double a, double a_bar, double b, double b_bar);

}  // namespace internal
}  // namespace dpconv

#endif  // DPCONV_DIVERGENCES_H_
