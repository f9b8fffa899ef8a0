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

// Composition accounting for the Gaussian and subsampled Gaussian mechanisms.
//
// Both mechanisms have linear RDP curves gamma(alpha) = rho * alpha per
// round, so T rounds compose to rho * alpha * T. The moments accountant (MA)
// converts that curve to (eps, delta)-DP with the classical bound; the
// improved accountant uses the closed-form optimal-conversion bounds instead.

#ifndef DPCONV_ACCOUNTANT_H_
#define DPCONV_ACCOUNTANT_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpconv/numerics.h"

namespace dpconv {

// RDP profile alpha -> gamma(alpha) of a mechanism.
class RenyiCurve {
 public:
  // gamma(alpha) = slope * alpha. Requires slope >= 0.
  static RenyiCurve Linear(double slope);

  // Profile known only at the given orders. Orders must be > 1, strictly
  // increasing, with nonnegative gammas. Evaluation between orders uses the
  // next larger tabulated order, which is sound because RDP parameters are
  // nondecreasing in alpha; beyond the largest order the curve is +inf.
  static absl::StatusOr<RenyiCurve> Tabulated(
      std::vector<std::pair<double, double>> points);

  double operator()(double alpha) const;

  // Pointwise product with a nonnegative factor.
  RenyiCurve Scaled(double factor) const;

  std::optional<double> linear_slope() const { return slope_; }
  const std::vector<std::pair<double, double>>& points() const {
    return points_;
  }

  // lim gamma(alpha) as alpha -> 1 from above, when the curve defines it.
  std::optional<double> LimitAtOrderOne() const;

 private:
  RenyiCurve() = default;

  std::optional<double> slope_;
  std::vector<std::pair<double, double>> points_;
};

struct GaussianMechanismSpec {
  double sigma;
  double rho;

  // rho = 1 / (2 sigma^2). Requires finite sigma > 0.
  static absl::StatusOr<GaussianMechanismSpec> Create(double sigma);

  RenyiCurve Curve() const { return RenyiCurve::Linear(rho); }
};

struct SubsampledGaussianSpec {
  double q;
  double sigma;
  // Per-round RDP slope q^2 / ((1 - q) sigma^2).
  double rho_q;
  // Largest admissible integer order floor(1 + sigma^2 log(1 / (q sigma))).
  int64_t max_alpha;
};

struct CompositionQuery {
  int64_t rounds;
  double delta;

  // OK iff rounds >= 0 and delta in (0, 1).
  absl::Status Validate() const;
};

// alpha -> T gamma(alpha).
RenyiCurve RdpCompose(const RenyiCurve& curve, int64_t rounds);

// rho T + sqrt(4 rho T log(1 / delta)).
absl::StatusOr<double> MaGaussianEpsilon(double rho, int64_t rounds,
                                         double delta);

// The two closed-form objectives of the improved accountant at one order,
// for the linear curve gamma(alpha) = rho alpha T and alpha delta < 1.
struct ImprovedTerms {
  // rho alpha T - log(delta / zeta_alpha) / (alpha - 1), before clamping.
  double eps0;
  // log(1 + (e^(rho alpha (alpha - 1) T) - 1) / (alpha delta)) / (alpha - 1).
  double eps1;
};
ImprovedTerms ImprovedTermsAt(double rho_t, double delta, double alpha);

struct ImprovedBreakdown {
  double eps0;
  double alpha0;
  double eps1;
  double alpha1;
  // (rho T / delta + log(1 - delta))_+, the alpha = 1 / delta branch.
  double eps_large_order;
  double epsilon;
};

// Improved accountant for T rounds of a Gaussian mechanism with slope rho:
// min over alpha in (1, 1/delta] of the two objectives, and the large-order
// branch. Never above MaGaussianEpsilon.
absl::StatusOr<double> ImprovedEpsilon(double rho, int64_t rounds,
                                       double delta,
                                       const Tolerance& tol = {});
absl::StatusOr<ImprovedBreakdown> ImprovedEpsilonBreakdown(
    double rho, int64_t rounds, double delta, const Tolerance& tol = {});

// sigma with sigma^2 = (2T / eps^2) log(1 / delta) + T / eps.
absl::StatusOr<double> MaCalibrateSigma(double eps, double delta,
                                        int64_t rounds);

// The MA calibration reduced by (2T / eps^2)(log(2 log(1/delta)) + 1 -
// log eps). Requires eps > 2 delta log(1 / delta) (FailedPrecondition
// otherwise, and when the corrected sigma^2 is not positive).
absl::StatusOr<double> ImprovedCalibrateSigma(double eps, double delta,
                                              int64_t rounds);

// Requires sigma > 0 and 0 < q < 1 / (16 sigma); FailedPrecondition when the
// rate bound fails or no integer order >= 2 is admissible.
absl::StatusOr<SubsampledGaussianSpec> SubsampledSpec(double q, double sigma);

// {2, 3, ..., spec.max_alpha}.
std::vector<int64_t> AdmissibleAlphas(const SubsampledGaussianSpec& spec);

// Tabulated curve alpha -> rho_q alpha T over the admissible orders.
RenyiCurve SubsampledCurve(const SubsampledGaussianSpec& spec, int64_t rounds);

enum class AccountingMethod { kMa, kImproved };
enum class OrderDomain {
  // Both methods minimize over the admissible integer orders.
  kAdmissibleIntegers,
  // Both methods treat rho_q alpha as valid for every real alpha > 1.
  kContinuous,
};

std::string_view AccountingMethodName(AccountingMethod method);

// Epsilon after T rounds of subsampled Gaussian noise. The improved method is
// never above the MA method within the same order domain.
absl::StatusOr<double> SgdEpsilon(
    const SubsampledGaussianSpec& spec, int64_t rounds, double delta,
    AccountingMethod method,
    OrderDomain domain = OrderDomain::kAdmissibleIntegers,
    const Tolerance& tol = {});

}  // namespace dpconv

#endif  // DPCONV_ACCOUNTANT_H_
