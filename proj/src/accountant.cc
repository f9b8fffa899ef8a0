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

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dpconv/divergences.h"
#include "dpconv/numerics.h"

namespace dpconv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kOrderScanPoints = 64;

absl::Status ValidateDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

absl::Status ValidatePositive(const char* name, double value) {
  if (!(value > 0.0) || std::isinf(value)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s must be positive and finite, got %g", name, value));
  }
  return absl::OkStatus();
}

absl::Status ValidateRounds(int64_t rounds) {
  if (rounds < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("number of rounds must be >= 0, got %d", rounds));
  }
  return absl::OkStatus();
}

double LogZetaOf(double alpha) {
  return -std::log(alpha) + (alpha - 1.0) * std::log1p(-1.0 / alpha);
}

// log(1 + expm1(x) / c) for x >= 0 and 0 < c <= 1, without overflow.
double LogOnePlusExpm1Over(double x, double c) {
  if (x > 1.0) return x + std::log1p((c - 1.0) * std::exp(-x)) - std::log(c);
  return std::log1p(std::expm1(x) / c);
}

double MaObjective(double rho_t, double delta, double alpha) {
  return rho_t * alpha - std::log(delta) / (alpha - 1.0);
}

// Minimizes objective(1 + e^x) over [x_lo, x_hi]: a log-spaced scan picks the
// bracket around the best sample, then golden-section search refines it.
absl::StatusOr<ScalarMinimum> MinimizeOverLogOrder(
    absl::FunctionRef<double(double)> objective, double x_lo, double x_hi,
    const Tolerance& tol) {
  auto in_x = [&](double x) { return objective(1.0 + std::exp(x)); };
  std::vector<double> xs(kOrderScanPoints);
  std::vector<double> values(kOrderScanPoints);
  int best = 0;
  for (int i = 0; i < kOrderScanPoints; ++i) {
    xs[i] = x_lo + (x_hi - x_lo) * i / (kOrderScanPoints - 1);
    values[i] = in_x(xs[i]);
    if (values[i] < values[best]) best = i;
  }
  const double lo = xs[std::max(best - 1, 0)];
  const double hi = xs[std::min(best + 1, kOrderScanPoints - 1)];
  ScalarMinimum result{xs[best], values[best]};
  absl::StatusOr<ScalarMinimum> refined =
      MinimizeConvexScalar(in_x, lo, hi, tol);
  if (!refined.ok()) return refined.status();
  if (refined->value < result.value) result = *refined;
  result.argmin = 1.0 + std::exp(result.argmin);
  return result;
}

}  // namespace

RenyiCurve RenyiCurve::Linear(double slope) {
  RenyiCurve curve;
  curve.slope_ = slope;
  return curve;
}

absl::StatusOr<RenyiCurve> RenyiCurve::Tabulated(
    std::vector<std::pair<double, double>> points) {
  if (points.empty()) {
    return absl::InvalidArgumentError("tabulated Renyi curve needs points");
  }
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& [alpha, gamma] = points[i];
    if (!(alpha > 1.0) || !(gamma >= 0.0) || std::isinf(alpha) ||
        (i > 0 && !(alpha > points[i - 1].first))) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "tabulated orders must be > 1 and strictly increasing with "
          "gamma >= 0; bad entry (%g, %g)",
          alpha, gamma));
    }
  }
  RenyiCurve curve;
  curve.points_ = std::move(points);
  return curve;
}

double RenyiCurve::operator()(double alpha) const {
  if (slope_) return *slope_ * alpha;
  auto it = std::lower_bound(
      points_.begin(), points_.end(), alpha,
      [](const std::pair<double, double>& p, double a) { return p.first < a; });
  if (it == points_.end()) return kInf;
  return it->second;
}

RenyiCurve RenyiCurve::Scaled(double factor) const {
  RenyiCurve curve = *this;
  if (curve.slope_) *curve.slope_ *= factor;
  for (auto& point : curve.points_) point.second *= factor;
  return curve;
}

std::optional<double> RenyiCurve::LimitAtOrderOne() const { return slope_; }

absl::Status CompositionQuery::Validate() const {
  if (absl::Status s = ValidateRounds(rounds); !s.ok()) return s;
  return ValidateDelta(delta);
}

absl::StatusOr<GaussianMechanismSpec> GaussianMechanismSpec::Create(
    double sigma) {
  if (absl::Status s = ValidatePositive("sigma", sigma); !s.ok()) return s;
  return GaussianMechanismSpec{sigma, 1.0 / (2.0 * sigma * sigma)};
}

RenyiCurve RdpCompose(const RenyiCurve& curve, int64_t rounds) {
  return curve.Scaled(static_cast<double>(rounds));
}

absl::StatusOr<double> MaGaussianEpsilon(double rho, int64_t rounds,
                                         double delta) {
  if (absl::Status s = ValidatePositive("rho", rho); !s.ok()) return s;
  if (absl::Status s = CompositionQuery{rounds, delta}.Validate(); !s.ok()) {
    return s;
  }
  const double rho_t = rho * static_cast<double>(rounds);
  return rho_t + std::sqrt(-4.0 * rho_t * std::log(delta));
}

ImprovedTerms ImprovedTermsAt(double rho_t, double delta, double alpha) {
  const double gap = alpha - 1.0;
  return {rho_t * alpha - (std::log(delta) - LogZetaOf(alpha)) / gap,
          LogOnePlusExpm1Over(rho_t * alpha * gap, alpha * delta) / gap};
}

absl::StatusOr<ImprovedBreakdown> ImprovedEpsilonBreakdown(
    double rho, int64_t rounds, double delta, const Tolerance& tol) {
  if (absl::Status s = ValidatePositive("rho", rho); !s.ok()) return s;
  if (absl::Status s = CompositionQuery{rounds, delta}.Validate(); !s.ok()) {
    return s;
  }
  const double rho_t = rho * static_cast<double>(rounds);
  if (rho_t == 0.0) return ImprovedBreakdown{0.0, 1.0, 0.0, 1.0, 0.0, 0.0};

  ImprovedBreakdown out{kInf, 1.0 / delta, kInf, 1.0 / delta, 0.0, 0.0};
  out.eps_large_order = std::max(0.0, rho_t / delta + std::log1p(-delta));
  const double x_lo = std::log(RenyiOrder::kMinOrderGap);
  const double x_hi = std::log((1.0 - delta) / delta);
  if (x_hi > x_lo) {
    absl::StatusOr<ScalarMinimum> m0 = MinimizeOverLogOrder(
        [&](double alpha) { return ImprovedTermsAt(rho_t, delta, alpha).eps0; },
        x_lo, x_hi, tol);
    if (!m0.ok()) return m0.status();
    absl::StatusOr<ScalarMinimum> m1 = MinimizeOverLogOrder(
        [&](double alpha) { return ImprovedTermsAt(rho_t, delta, alpha).eps1; },
        x_lo, x_hi, tol);
    if (!m1.ok()) return m1.status();
    out.eps0 = std::max(0.0, m0->value);
    out.alpha0 = m0->argmin;
    out.eps1 = m1->value;
    out.alpha1 = m1->argmin;
  }
  out.epsilon = std::min({out.eps0, out.eps1, out.eps_large_order});
  return out;
}

absl::StatusOr<double> ImprovedEpsilon(double rho, int64_t rounds,
                                       double delta, const Tolerance& tol) {
  absl::StatusOr<ImprovedBreakdown> breakdown =
      ImprovedEpsilonBreakdown(rho, rounds, delta, tol);
  if (!breakdown.ok()) return breakdown.status();
  return breakdown->epsilon;
}

absl::StatusOr<double> MaCalibrateSigma(double eps, double delta,
                                        int64_t rounds) {
  if (absl::Status s = ValidatePositive("eps", eps); !s.ok()) return s;
  if (absl::Status s = ValidateDelta(delta); !s.ok()) return s;
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("calibration needs rounds >= 1, got %d", rounds));
  }
  const double t = static_cast<double>(rounds);
  return std::sqrt(2.0 * t / (eps * eps) * -std::log(delta) + t / eps);
}

absl::StatusOr<double> ImprovedCalibrateSigma(double eps, double delta,
                                              int64_t rounds) {
  absl::StatusOr<double> ma = MaCalibrateSigma(eps, delta, rounds);
  if (!ma.ok()) return ma.status();
  const double log_inv_delta = -std::log(delta);
  if (!(eps > 2.0 * delta * log_inv_delta)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "improved calibration requires eps > 2 delta log(1/delta) = %g, got "
        "eps=%g",
        2.0 * delta * log_inv_delta, eps));
  }
  const double t = static_cast<double>(rounds);
  const double correction = 2.0 * t / (eps * eps) *
                            (std::log(2.0 * log_inv_delta) + 1.0 -
                             std::log(eps));
  const double sigma2 = *ma * *ma - correction;
  if (!(sigma2 > 0.0)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "improved calibration gives nonpositive sigma^2 = %g", sigma2));
  }
  return std::sqrt(sigma2);
}

absl::StatusOr<SubsampledGaussianSpec> SubsampledSpec(double q, double sigma) {
  if (absl::Status s = ValidatePositive("sigma", sigma); !s.ok()) return s;
  if (!(q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must lie in (0, 1), got %g", q));
  }
  if (!(q < 1.0 / (16.0 * sigma))) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "subsampled RDP bound requires q < 1/(16 sigma) = %g, got q=%g",
        1.0 / (16.0 * sigma), q));
  }
  const double bound = 1.0 + sigma * sigma * std::log(1.0 / (q * sigma));
  if (bound < 2.0) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no admissible integer order: 1 + sigma^2 log(1/(q sigma)) = %g < 2",
        bound));
  }
  return SubsampledGaussianSpec{q, sigma, q * q / ((1.0 - q) * sigma * sigma),
                                static_cast<int64_t>(std::floor(bound))};
}

std::vector<int64_t> AdmissibleAlphas(const SubsampledGaussianSpec& spec) {
  std::vector<int64_t> alphas;
  for (int64_t alpha = 2; alpha <= spec.max_alpha; ++alpha) {
    alphas.push_back(alpha);
  }
  return alphas;
}

RenyiCurve SubsampledCurve(const SubsampledGaussianSpec& spec,
                           int64_t rounds) {
  std::vector<std::pair<double, double>> points;
  const double rho_t = spec.rho_q * static_cast<double>(rounds);
  for (int64_t alpha : AdmissibleAlphas(spec)) {
    const double a = static_cast<double>(alpha);
    points.emplace_back(a, rho_t * a);
  }
  return *RenyiCurve::Tabulated(std::move(points));
}

std::string_view AccountingMethodName(AccountingMethod method) {
  switch (method) {
    case AccountingMethod::kMa:
      return "ma";
    case AccountingMethod::kImproved:
      return "improved";
  }
  return "unknown";
}

absl::StatusOr<double> SgdEpsilon(const SubsampledGaussianSpec& spec,
                                  int64_t rounds, double delta,
                                  AccountingMethod method, OrderDomain domain,
                                  const Tolerance& tol) {
  if (absl::Status s = CompositionQuery{rounds, delta}.Validate(); !s.ok()) {
    return s;
  }
  if (spec.max_alpha < 2) {
    return absl::FailedPreconditionError("admissible order set is empty");
  }
  if (rounds == 0) return 0.0;
  if (domain == OrderDomain::kContinuous) {
    if (method == AccountingMethod::kMa) {
      return MaGaussianEpsilon(spec.rho_q, rounds, delta);
    }
    return ImprovedEpsilon(spec.rho_q, rounds, delta, tol);
  }
  const double rho_t = spec.rho_q * static_cast<double>(rounds);
  double best = kInf;
  for (int64_t order : AdmissibleAlphas(spec)) {
    const double alpha = static_cast<double>(order);
    double eps;
    if (method == AccountingMethod::kMa) {
      eps = MaObjective(rho_t, delta, alpha);
    } else if (alpha * delta >= 1.0) {
      eps = std::max(0.0, rho_t * alpha + std::log1p(-delta));
    } else {
      const ImprovedTerms terms = ImprovedTermsAt(rho_t, delta, alpha);
      eps = std::min(std::max(0.0, terms.eps0), terms.eps1);
    }
    best = std::min(best, eps);
  }
  return best;
}

}  // namespace dpconv
