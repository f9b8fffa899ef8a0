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

// Hypothesis-testing view of privacy.
//
// A tradeoff curve maps a type I error tau to the smallest achievable type II
// error beta. The privacy region lies between the curve and the diagonal
// beta = 1 - tau; outer bounds on the region are lower bounds on the curve.
// Every boundary function here returns the lower boundary beta(tau).

#ifndef DPCONV_TRADEOFF_H_
#define DPCONV_TRADEOFF_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "absl/functional/function_ref.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpconv/accountant.h"
#include "dpconv/conversion.h"
#include "dpconv/divergences.h"
#include "dpconv/numerics.h"

namespace dpconv {

// Nonincreasing convex beta: [0, 1] -> [0, 1] with beta(tau) <= 1 - tau.
class TradeoffCurve {
 public:
  // G_mu(tau) = Phi(Phi^-1(1 - tau) - mu). Requires mu >= 0.
  static TradeoffCurve Gaussian(double mu);

  // Boundary of the (eps, delta)-DP region.
  static TradeoffCurve ApproxDp(double eps, double delta);

  // Arbitrary curve with a finite-difference derivative: central differences
  // with step kDerivativeStep, one-sided within two steps of 0 and 1.
  static TradeoffCurve FromFunction(std::function<double(double)> eval);

  static constexpr double kDerivativeStep = 1e-6;

  double operator()(double tau) const { return eval_(tau); }
  double Derivative(double tau) const { return derivative_(tau); }
  double beta_at_zero() const { return beta_at_zero_; }

  // Points in (0, 1) where the derivative may jump.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  // log|beta'(tau)| as a function of z = Phi^-1(1 - tau), when known in
  // closed form. Enables quadrature in the probit coordinate, where the
  // Gaussian curve's integrands are smooth and do not overflow.
  bool has_probit_slope() const { return static_cast<bool>(log_slope_probit_); }
  double LogAbsSlopeAtProbit(double z) const { return log_slope_probit_(z); }

 private:
  TradeoffCurve() = default;

  std::function<double(double)> eval_;
  std::function<double(double)> derivative_;
  std::function<double(double)> log_slope_probit_;
  double beta_at_zero_ = 1.0;
  std::vector<double> breakpoints_;
};

// Lower privacy-region boundary sampled on a grid.
struct RegionBoundary {
  std::vector<double> taus;
  std::vector<double> betas;

  // OK iff the sizes match, taus are strictly increasing in [0, 1] and
  // 0 <= betas[i] <= 1 - taus[i] (up to 1e-12).
  absl::Status Validate() const;
};

// `points` uniform values on [1e-6, 1 - 1e-6]; a single point gives 0.5.
std::vector<double> DefaultTauGrid(int points = 1001);

// 64 log-spaced eps values on [1e-3, 20].
std::vector<double> DefaultEpsilonGrid();

// 1 + 10^s for 64 values of s uniform on [-2, 2.5].
std::vector<double> DefaultOrderGrid();

// tau values are clipped to [kTauClip, 1 - kTauClip] by the divergence-based
// boundaries, which are defined on the open unit square.
inline constexpr double kTauClip = 1e-12;

// G_mu(tau), with G(0) = 1 and G(1) = 0.
double GaussianTradeoff(double mu, double tau);

// max{0, 1 - delta - e^eps tau, e^-eps (1 - delta - tau)}.
double ApproxDpBoundary(double eps, double delta, double tau);

// Smallest beta in (0, 1 - tau] with d_alpha(1 - tau || beta) <= gamma and
// d_alpha(1 - beta || tau) <= gamma. Each constraint is inverted by
// bisection in log beta; the returned value is the lower bracket end, so it
// never exceeds the true boundary (outer bound preserved).
absl::StatusOr<double> RdpRegionBoundary(RenyiOrder order, double gamma,
                                         double tau, const Tolerance& tol = {});

// As RdpRegionBoundary with the binary KL divergence.
absl::StatusOr<double> KlRegionBoundary(double gamma, double tau,
                                        const Tolerance& tol = {});

// max over the listed orders of RdpRegionBoundary(alpha, curve(alpha), tau).
// When the curve has a limit gamma(1+) (linear curves do), the KL boundary
// at that limit is included too: it is the alpha -> 1 member of the same
// intersection, and without it a finite grid of orders can fall below it.
absl::StatusOr<double> RegionIntersectOverAlpha(const RenyiCurve& curve,
                                                std::span<const double> alphas,
                                                double tau,
                                                const Tolerance& tol = {});

// G_mu(tau) with mu = sqrt(2 rho T).
double GaussianRegionExact(double rho, int64_t rounds, double tau);

// The (eps, delta_exact(alpha, gamma, eps)) pairs behind
// RegionFromRdpViaDp, computed once per grid so many taus can reuse them.
absl::StatusOr<std::vector<ApproxDpPoint>> DpProfileFromRdp(
    RenyiOrder order, double gamma, std::span<const double> eps_grid,
    const Tolerance& tol = {});

// max over the profile of ApproxDpBoundary(eps, delta, tau).
double DpProfileBoundary(std::span<const ApproxDpPoint> profile, double tau);

// max over eps in the grid of ApproxDpBoundary(eps, delta_exact, tau).
absl::StatusOr<double> RegionFromRdpViaDp(RenyiOrder order, double gamma,
                                          double tau,
                                          std::span<const double> eps_grid,
                                          const Tolerance& tol = {});

// mu = q sqrt(T (e^(1 / sigma^2) - 1)).
double SgdFdpMu(double q, double sigma, int64_t rounds);

// G_mu(tau) with mu = SgdFdpMu(q, sigma, T).
absl::StatusOr<double> SgdRegionFdp(double q, double sigma, int64_t rounds,
                                    double tau);

// Smallest eps with GaussianDeltaEps(1 / mu, eps) <= delta. The value is the
// upper end of the final bisection bracket.
absl::StatusOr<double> GdpEpsilon(double mu, double delta,
                                  const Tolerance& tol = {});

// Tolerance used for region areas: boundaries have kinks, so the quadrature
// gets a generous subdivision budget.
inline constexpr Tolerance kAreaTolerance{1e-9, 1e-10, 4000};

// Integral over [0, 1] of (1 - tau - boundary(tau)).
absl::StatusOr<double> RegionArea(absl::FunctionRef<double(double)> boundary,
                                  const Tolerance& tol = kAreaTolerance);
absl::StatusOr<double> RegionArea(const TradeoffCurve& curve,
                                  const Tolerance& tol = kAreaTolerance);

// Exact integral of the linear interpolant through the samples, extended to
// beta(0) = 1 and beta(1) = 0 when the grid does not reach the endpoints.
absl::StatusOr<double> RegionArea(const RegionBoundary& boundary);

struct SgdAreaComparison {
  // Area of the f-DP region with mu = SgdFdpMu(q, sigma, T).
  double area_fdp;
  // Area of the RDP outer region over the admissible integer orders.
  double area_rdp;
  // area_fdp - area_rdp. Positive means the RDP outer bound is tighter.
  double difference;
};

absl::StatusOr<SgdAreaComparison> CompareSgdAreas(
    double q, double sigma, int64_t rounds,
    const Tolerance& tol = kAreaTolerance);

// CompareSgdAreas(...).difference.
absl::StatusOr<double> SgdAreaDifference(double q, double sigma,
                                         int64_t rounds,
                                         const Tolerance& tol = kAreaTolerance);

// D_alpha recovered from a tradeoff curve:
// log(1 - beta(0) + integral of |beta'|^(1 - alpha)) / (alpha - 1).
// +inf when the integral diverges.
absl::StatusOr<double> RdpFromTradeoff(const TradeoffCurve& curve,
                                       RenyiOrder order,
                                       const Tolerance& tol = {});

// Integral over [0, 1] of |beta'| f(1 / |beta'|). f must be convex with
// f(1) = 0.
absl::StatusOr<double> FDivergenceFromTradeoff(
    const TradeoffCurve& curve, absl::FunctionRef<double(double)> f,
    const Tolerance& tol = {});

}  // namespace dpconv

#endif  // DPCONV_TRADEOFF_H_
