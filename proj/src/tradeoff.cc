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

#include "dpconv/tradeoff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dpconv/accountant.h"
#include "dpconv/conversion.h"
#include "dpconv/divergences.h"
#include "dpconv/numerics.h"

namespace dpconv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinBeta = 1e-300;

// Probit-coordinate quadrature settings.
constexpr double kProbitScanHalfWidth = 400.0;
constexpr double kProbitScanStep = 0.25;
constexpr double kProbitLogWindow = 60.0;
constexpr double kProbitFixedHalfWidth = 40.0;
// Initial partitions: unit cells in the probit coordinate and 1/16 cells in
// tau, so integrands supported on a narrow band are not missed.
constexpr double kProbitSeedStep = 1.0;
constexpr int kPiecewiseSeeds = 16;

absl::Status ValidateTau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("type I error must lie in [0, 1], got %g", tau));
  }
  return absl::OkStatus();
}

absl::Status ValidateGamma(double gamma) {
  if (!(gamma >= 0.0) || std::isinf(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gamma must be finite and >= 0, got %g", gamma));
  }
  return absl::OkStatus();
}

// Probit coordinate z = Phi^-1(1 - tau) for tau in (0, 1).
double ProbitOfComplement(double tau) { return -*NormalCdfInverse(tau); }

// Divergence of a constraint as a function of (beta, 1 - beta); decreasing
// in beta on (0, 1 - tau].
using ConstraintFn = absl::FunctionRef<double(double, double)>;

// Smallest beta in (0, tau_bar] with constraint(beta) <= gamma, as the lower
// end of a bisection bracket in log beta.
absl::StatusOr<double> SmallestFeasibleBeta(ConstraintFn constraint,
                                            double gamma, double tau_bar,
                                            const Tolerance& tol) {
  auto slack = [&](double log_beta) {
    return gamma - constraint(std::exp(log_beta), -std::expm1(log_beta));
  };
  const double lo = std::log(kMinBeta);
  const double hi = std::log(tau_bar);
  if (slack(lo) >= 0.0) return 0.0;
  absl::StatusOr<RootBracket> bracket = BracketRootMonotone(slack, lo, hi, tol);
  if (!bracket.ok()) return bracket.status();
  return std::exp(bracket->lo);
}

// Both constraints of a divergence-ball region at one tau.
absl::StatusOr<double> DivergenceRegionBoundary(
    absl::FunctionRef<double(double, double, double, double)> divergence,
    double gamma, double tau, const Tolerance& tol) {
  if (absl::Status s = ValidateGamma(gamma); !s.ok()) return s;
  if (absl::Status s = ValidateTau(tau); !s.ok()) return s;
  tau = std::clamp(tau, kTauClip, 1.0 - kTauClip);
  const double tau_bar = 1.0 - tau;
  if (gamma == 0.0) return tau_bar;
  // d(1 - tau || beta) <= gamma.
  absl::StatusOr<double> first = SmallestFeasibleBeta(
      [&](double beta, double beta_bar) {
        return divergence(tau_bar, tau, beta, beta_bar);
      },
      gamma, tau_bar, tol);
  if (!first.ok()) return first.status();
  // d(1 - beta || tau) <= gamma.
  absl::StatusOr<double> second = SmallestFeasibleBeta(
      [&](double beta, double beta_bar) {
        return divergence(beta_bar, beta, tau, tau_bar);
      },
      gamma, tau_bar, tol);
  if (!second.ok()) return second.status();
  return std::min(tau_bar, std::max(*first, *second));
}

// Integral of fn over [0, 1] split at the given interior breakpoints.
absl::StatusOr<double> IntegratePiecewise(absl::FunctionRef<double(double)> fn,
                                          const std::vector<double>& breaks,
                                          const Tolerance& tol) {
  std::vector<double> knots;
  for (int i = 0; i <= kPiecewiseSeeds; ++i) {
    knots.push_back(static_cast<double>(i) / kPiecewiseSeeds);
  }
  for (double b : breaks) {
    if (b > 0.0 && b < 1.0) knots.push_back(b);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  absl::StatusOr<QuadratureResult> result = IntegrateAdaptive(fn, knots, tol);
  if (!result.ok()) return result.status();
  return result->value;
}

// log of the integral over the real line of exp(log_integrand(z)), for a
// unimodal log_integrand whose mass lies within kProbitScanHalfWidth of 0.
absl::StatusOr<double> LogIntegrateProbit(
    absl::FunctionRef<double(double)> log_integrand, const Tolerance& tol) {
  const int steps = static_cast<int>(2.0 * kProbitScanHalfWidth /
                                     kProbitScanStep);
  double peak_z = 0.0;
  double peak = -kInf;
  for (int i = 0; i <= steps; ++i) {
    const double z = -kProbitScanHalfWidth + i * kProbitScanStep;
    const double v = log_integrand(z);
    if (v > peak) {
      peak = v;
      peak_z = z;
    }
  }
  if (peak == kInf) return kInf;
  if (peak == -kInf) return -kInf;
  double lo = peak_z;
  while (lo > -kProbitScanHalfWidth &&
         log_integrand(lo) > peak - kProbitLogWindow) {
    lo -= kProbitScanStep;
  }
  double hi = peak_z;
  while (hi < kProbitScanHalfWidth &&
         log_integrand(hi) > peak - kProbitLogWindow) {
    hi += kProbitScanStep;
  }
  absl::StatusOr<QuadratureResult> scaled = IntegrateAdaptive(
      [&](double z) { return std::exp(log_integrand(z) - peak); }, lo, hi,
      tol);
  if (!scaled.ok()) return scaled.status();
  return peak + std::log(scaled->value);
}

}  // namespace

TradeoffCurve TradeoffCurve::Gaussian(double mu) {
  TradeoffCurve curve;
  curve.eval_ = [mu](double tau) { return GaussianTradeoff(mu, tau); };
  curve.derivative_ = [mu](double tau) {
    if (mu == 0.0) return -1.0;
    if (tau <= 0.0) return -kInf;
    if (tau >= 1.0) return 0.0;
    return -std::exp(mu * ProbitOfComplement(tau) - 0.5 * mu * mu);
  };
  curve.log_slope_probit_ = [mu](double z) { return mu * z - 0.5 * mu * mu; };
  curve.beta_at_zero_ = 1.0;
  return curve;
}

TradeoffCurve TradeoffCurve::ApproxDp(double eps, double delta) {
  TradeoffCurve curve;
  // The two lines meet at tau1; the flatter one reaches zero at tau2.
  const double tau1 = (1.0 - delta) / (1.0 + std::exp(eps));
  const double tau2 = 1.0 - delta;
  curve.eval_ = [eps, delta](double tau) {
    return ApproxDpBoundary(eps, delta, tau);
  };
  curve.derivative_ = [eps, tau1, tau2](double tau) {
    if (tau < tau1) return -std::exp(eps);
    if (tau < tau2) return -std::exp(-eps);
    return 0.0;
  };
  curve.beta_at_zero_ = 1.0 - delta;
  curve.breakpoints_ = {tau1, tau2};
  return curve;
}

TradeoffCurve TradeoffCurve::FromFunction(std::function<double(double)> eval) {
  TradeoffCurve curve;
  curve.beta_at_zero_ = eval(0.0);
  curve.derivative_ = [eval](double tau) {
    constexpr double h = kDerivativeStep;
    if (tau < 2.0 * h) return (eval(tau + h) - eval(tau)) / h;
    if (tau > 1.0 - 2.0 * h) return (eval(tau) - eval(tau - h)) / h;
    return (eval(tau + h) - eval(tau - h)) / (2.0 * h);
  };
  curve.eval_ = std::move(eval);
  return curve;
}

absl::Status RegionBoundary::Validate() const {
  if (taus.size() != betas.size() || taus.empty()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "boundary needs matching nonempty grids, got %d taus and %d betas",
        taus.size(), betas.size()));
  }
  for (size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] >= 0.0 && taus[i] <= 1.0) ||
        (i > 0 && !(taus[i] > taus[i - 1]))) {
      return absl::InvalidArgumentError(
          "boundary taus must be strictly increasing in [0, 1]");
    }
    if (!(betas[i] >= 0.0 && betas[i] <= 1.0 - taus[i] + 1e-12)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "boundary value %g at tau=%g is outside [0, 1 - tau]", betas[i],
          taus[i]));
    }
  }
  return absl::OkStatus();
}

std::vector<double> DefaultTauGrid(int points) {
  if (points <= 0) return {};
  if (points == 1) return {0.5};
  constexpr double kLo = 1e-6;
  constexpr double kHi = 1.0 - 1e-6;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = kLo + (kHi - kLo) * i / (points - 1);
  }
  return grid;
}

std::vector<double> DefaultEpsilonGrid() {
  constexpr int kPoints = 64;
  const double log_lo = std::log(1e-3);
  const double log_hi = std::log(20.0);
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (kPoints - 1));
  }
  return grid;
}

std::vector<double> DefaultOrderGrid() {
  constexpr int kPoints = 64;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = 1.0 + std::pow(10.0, -2.0 + 4.5 * i / (kPoints - 1));
  }
  return grid;
}

double GaussianTradeoff(double mu, double tau) {
  if (tau <= 0.0) return 1.0;
  if (tau >= 1.0) return 0.0;
  return NormalCdf(ProbitOfComplement(tau) - mu);
}

double ApproxDpBoundary(double eps, double delta, double tau) {
  const double delta_bar = 1.0 - delta;
  return std::max({0.0, delta_bar - std::exp(eps) * tau,
                   std::exp(-eps) * (delta_bar - tau)});
}

absl::StatusOr<double> RdpRegionBoundary(RenyiOrder order, double gamma,
                                         double tau, const Tolerance& tol) {
  const double alpha = order.alpha();
  return DivergenceRegionBoundary(
      [alpha](double a, double a_bar, double b, double b_bar) {
        return internal::RenyiBinaryComplemented(a, a_bar, b, b_bar, alpha);
      },
      gamma, tau, tol);
}

absl::StatusOr<double> KlRegionBoundary(double gamma, double tau,
                                        const Tolerance& tol) {
  return DivergenceRegionBoundary(internal::KlBinaryComplemented, gamma, tau,
                                  tol);
}

absl::StatusOr<double> RegionIntersectOverAlpha(const RenyiCurve& curve,
                                                std::span<const double> alphas,
                                                double tau,
                                                const Tolerance& tol) {
  if (alphas.empty()) {
    return absl::InvalidArgumentError("need at least one Renyi order");
  }
  double best = 0.0;
  for (double alpha : alphas) {
    absl::StatusOr<RenyiOrder> order = RenyiOrder::Create(alpha);
    if (!order.ok()) return order.status();
    const double gamma = curve(alpha);
    if (std::isinf(gamma)) continue;
    absl::StatusOr<double> beta = RdpRegionBoundary(*order, gamma, tau, tol);
    if (!beta.ok()) return beta.status();
    best = std::max(best, *beta);
  }
  if (std::optional<double> limit = curve.LimitAtOrderOne()) {
    absl::StatusOr<double> beta = KlRegionBoundary(*limit, tau, tol);
    if (!beta.ok()) return beta.status();
    best = std::max(best, *beta);
  }
  return best;
}

double GaussianRegionExact(double rho, int64_t rounds, double tau) {
  return GaussianTradeoff(std::sqrt(2.0 * rho * static_cast<double>(rounds)),
                          tau);
}

absl::StatusOr<std::vector<ApproxDpPoint>> DpProfileFromRdp(
    RenyiOrder order, double gamma, std::span<const double> eps_grid,
    const Tolerance& tol) {
  if (eps_grid.empty()) {
    return absl::InvalidArgumentError("need at least one eps value");
  }
  // eps = 0 belongs to the intersection and gives the diagonal at gamma = 0.
  std::vector<double> grid = {0.0};
  for (double eps : eps_grid) {
    if (!(eps >= 0.0) || std::isinf(eps)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("eps grid values must be finite and >= 0, got %g",
                          eps));
    }
    if (eps > 0.0) grid.push_back(eps);
  }
  std::vector<ApproxDpPoint> profile;
  for (double eps : grid) {
    absl::StatusOr<ConversionResult> delta = DeltaExact(order, gamma, eps, tol);
    // No delta below 1 works at this eps: the constraint is vacuous.
    if (absl::IsOutOfRange(delta.status())) continue;
    if (!delta.ok()) return delta.status();
    profile.push_back({eps, delta->value});
  }
  return profile;
}

double DpProfileBoundary(std::span<const ApproxDpPoint> profile, double tau) {
  double best = 0.0;
  for (const ApproxDpPoint& point : profile) {
    best = std::max(best, ApproxDpBoundary(point.epsilon, point.delta, tau));
  }
  return std::min(best, std::max(0.0, 1.0 - tau));
}

absl::StatusOr<double> RegionFromRdpViaDp(RenyiOrder order, double gamma,
                                          double tau,
                                          std::span<const double> eps_grid,
                                          const Tolerance& tol) {
  if (absl::Status s = ValidateTau(tau); !s.ok()) return s;
  absl::StatusOr<std::vector<ApproxDpPoint>> profile =
      DpProfileFromRdp(order, gamma, eps_grid, tol);
  if (!profile.ok()) return profile.status();
  return DpProfileBoundary(*profile, tau);
}

double SgdFdpMu(double q, double sigma, int64_t rounds) {
  return q * std::sqrt(static_cast<double>(rounds) *
                       std::expm1(1.0 / (sigma * sigma)));
}

absl::StatusOr<double> SgdRegionFdp(double q, double sigma, int64_t rounds,
                                    double tau) {
  if (!(q > 0.0 && q < 1.0) || !(sigma > 0.0) || rounds < 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need q in (0, 1), sigma > 0 and T >= 0, got q=%g sigma=%g T=%d", q,
        sigma, rounds));
  }
  if (absl::Status s = ValidateTau(tau); !s.ok()) return s;
  return GaussianTradeoff(SgdFdpMu(q, sigma, rounds), tau);
}

absl::StatusOr<double> GdpEpsilon(double mu, double delta,
                                  const Tolerance& tol) {
  if (!(mu > 0.0) || std::isinf(mu) || !(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need finite mu > 0 and delta in (0, 1), got mu=%g delta=%g", mu,
        delta));
  }
  const double sigma = 1.0 / mu;
  auto slack = [&](double eps) { return delta - GaussianDeltaEps(sigma, eps); };
  if (slack(0.0) >= 0.0) return 0.0;
  double hi = 1.0;
  for (int i = 0; slack(hi) < 0.0; ++i) {
    if (i == 64) {
      return absl::InternalError(
          absl::StrFormat("no eps brackets delta=%g at mu=%g", delta, mu));
    }
    hi *= 2.0;
  }
  absl::StatusOr<RootBracket> bracket = BracketRootMonotone(slack, 0.0, hi, tol);
  if (!bracket.ok()) return bracket.status();
  return bracket->hi;
}

absl::StatusOr<double> RegionArea(absl::FunctionRef<double(double)> boundary,
                                  const Tolerance& tol) {
  absl::StatusOr<QuadratureResult> area = IntegrateAdaptive(
      [&](double tau) { return (1.0 - tau) - boundary(tau); }, 0.0, 1.0, tol);
  if (!area.ok()) return area.status();
  return std::max(0.0, area->value);
}

absl::StatusOr<double> RegionArea(const TradeoffCurve& curve,
                                  const Tolerance& tol) {
  absl::StatusOr<double> area = IntegratePiecewise(
      [&](double tau) { return (1.0 - tau) - curve(tau); },
      curve.breakpoints(), tol);
  if (!area.ok()) return area.status();
  return std::max(0.0, *area);
}

absl::StatusOr<double> RegionArea(const RegionBoundary& boundary) {
  if (absl::Status s = boundary.Validate(); !s.ok()) return s;
  std::vector<double> taus = boundary.taus;
  std::vector<double> betas = boundary.betas;
  if (taus.front() > 0.0) {
    taus.insert(taus.begin(), 0.0);
    betas.insert(betas.begin(), 1.0);
  }
  if (taus.back() < 1.0) {
    taus.push_back(1.0);
    betas.push_back(0.0);
  }
  double area = 0.0;
  for (size_t i = 0; i + 1 < taus.size(); ++i) {
    const double gap_left = 1.0 - taus[i] - betas[i];
    const double gap_right = 1.0 - taus[i + 1] - betas[i + 1];
    area += 0.5 * (gap_left + gap_right) * (taus[i + 1] - taus[i]);
  }
  return std::max(0.0, area);
}

absl::StatusOr<SgdAreaComparison> CompareSgdAreas(double q, double sigma,
                                                  int64_t rounds,
                                                  const Tolerance& tol) {
  absl::StatusOr<SubsampledGaussianSpec> spec = SubsampledSpec(q, sigma);
  if (!spec.ok()) return spec.status();
  if (rounds < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("number of rounds must be >= 0, got %d", rounds));
  }
  if (rounds == 0) return SgdAreaComparison{0.0, 0.0, 0.0};
  absl::StatusOr<double> fdp_area =
      RegionArea(TradeoffCurve::Gaussian(SgdFdpMu(q, sigma, rounds)), tol);
  if (!fdp_area.ok()) return fdp_area.status();

  const RenyiCurve curve = SubsampledCurve(*spec, rounds);
  std::vector<double> alphas;
  for (const auto& point : curve.points()) alphas.push_back(point.first);
  absl::Status failure;
  absl::StatusOr<double> rdp_area = RegionArea(
      [&](double tau) {
        absl::StatusOr<double> beta =
            RegionIntersectOverAlpha(curve, alphas, tau);
        if (!beta.ok()) {
          if (failure.ok()) failure = beta.status();
          return 0.0;
        }
        return *beta;
      },
      tol);
  if (!failure.ok()) return failure;
  if (!rdp_area.ok()) return rdp_area.status();
  return SgdAreaComparison{*fdp_area, *rdp_area, *fdp_area - *rdp_area};
}

absl::StatusOr<double> SgdAreaDifference(double q, double sigma,
                                         int64_t rounds, const Tolerance& tol) {
  absl::StatusOr<SgdAreaComparison> areas =
      CompareSgdAreas(q, sigma, rounds, tol);
  if (!areas.ok()) return areas.status();
  return areas->difference;
}

absl::StatusOr<double> RdpFromTradeoff(const TradeoffCurve& curve,
                                       RenyiOrder order, const Tolerance& tol) {
  const double alpha = order.alpha();
  const double log_base = std::log(std::max(0.0, 1.0 - curve.beta_at_zero()));
  double log_integral;
  if (curve.has_probit_slope()) {
    absl::StatusOr<double> log_i = LogIntegrateProbit(
        [&](double z) {
          return (1.0 - alpha) * curve.LogAbsSlopeAtProbit(z) +
                 NormalLogPdf(z);
        },
        tol);
    if (!log_i.ok()) return log_i.status();
    log_integral = *log_i;
  } else {
    bool diverged = false;
    absl::StatusOr<double> integral = IntegratePiecewise(
        [&](double tau) {
          const double v =
              std::pow(std::abs(curve.Derivative(tau)), 1.0 - alpha);
          if (!std::isfinite(v)) {
            diverged = true;
            return 0.0;
          }
          return v;
        },
        curve.breakpoints(), tol);
    if (diverged) return kInf;
    if (!integral.ok()) return integral.status();
    log_integral = std::log(*integral);
  }
  return LogSumExp({log_base, log_integral}) / order.minus_one();
}

absl::StatusOr<double> FDivergenceFromTradeoff(
    const TradeoffCurve& curve, absl::FunctionRef<double(double)> f,
    const Tolerance& tol) {
  auto integrand = [&](double slope) {
    const double s = std::max(std::abs(slope),
                              std::numeric_limits<double>::min());
    return s * f(1.0 / s);
  };
  if (curve.has_probit_slope()) {
    std::vector<double> knots;
    for (double z = -kProbitFixedHalfWidth; z <= kProbitFixedHalfWidth;
         z += kProbitSeedStep) {
      knots.push_back(z);
    }
    absl::StatusOr<QuadratureResult> result = IntegrateAdaptive(
        [&](double z) {
          const double s = std::exp(curve.LogAbsSlopeAtProbit(z));
          return integrand(s) * std::exp(NormalLogPdf(z));
        },
        knots, tol);
    if (!result.ok()) return result.status();
    return result->value;
  }
  return IntegratePiecewise(
      [&](double tau) { return integrand(curve.Derivative(tau)); },
      curve.breakpoints(), tol);
}

}  // namespace dpconv
