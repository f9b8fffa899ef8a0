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

#include "dpconv/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dpconv/accountant.h"
#include "dpconv/conversion.h"
#include "dpconv/divergences.h"
#include "dpconv/numerics.h"
#include "dpconv/tradeoff.h"
#include "json.hpp"

namespace dpconv {
namespace {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::monostate, double, int64_t, std::string>;

// Output of one command: a header and rows. A record is a single row that is
// emitted as one JSON object instead of an array.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool record = false;
};

// Everything a command needs besides its own flags.
struct Context {
  Tolerance tol;
  Json params = Json::object();
  std::vector<std::string> notes;
};

std::string FormatDouble(double v) { return absl::StrFormat("%.12g", v); }

std::string CsvCell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return FormatDouble(*d);
  if (const int64_t* i = std::get_if<int64_t>(&cell)) {
    return absl::StrFormat("%d", *i);
  }
  if (const std::string* s = std::get_if<std::string>(&cell)) return *s;
  return "";
}

Json JsonCell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) return FormatDouble(*d);
    // Round through the CSV representation so both formats agree.
    double rounded = 0.0;
    (void)absl::SimpleAtod(FormatDouble(*d), &rounded);
    return rounded;
  }
  if (const int64_t* i = std::get_if<int64_t>(&cell)) return *i;
  if (const std::string* s = std::get_if<std::string>(&cell)) return *s;
  return nullptr;
}

std::string RenderCsv(const Table& table) {
  std::string out = absl::StrJoin(table.columns, ",") + "\n";
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    for (const Cell& cell : row) cells.push_back(CsvCell(cell));
    out += absl::StrJoin(cells, ",") + "\n";
  }
  return out;
}

std::string RenderJson(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (size_t i = 0; i < table.columns.size(); ++i) {
      obj[table.columns[i]] = JsonCell(row[i]);
    }
    rows.push_back(std::move(obj));
  }
  if (table.record && rows.size() == 1) return rows[0].dump(2) + "\n";
  return rows.dump(2) + "\n";
}

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return kExitUsage;
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return kExitPrecondition;
    default:
      return kExitNumericFailure;
  }
}

// Comma-separated list of strings, lower-cased and trimmed.
std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  for (absl::string_view piece : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    out.push_back(absl::AsciiStrToLower(absl::StripAsciiWhitespace(piece)));
  }
  return out;
}

absl::StatusOr<std::vector<double>> ParseDoubleList(const std::string& text,
                                                    const char* name) {
  std::vector<double> out;
  for (const std::string& piece : SplitList(text)) {
    double v;
    if (!absl::SimpleAtod(piece, &v)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("--%s: cannot parse '%s'", name, piece));
    }
    out.push_back(v);
  }
  if (out.empty()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("--%s must list at least one value", name));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

absl::StatusOr<RenyiOrder> OrderFromFlag(double alpha) {
  return RenyiOrder::Create(alpha);
}

// Adds `key=value` lines from the config file as flags, unless the same flag
// is already on the command line.
absl::StatusOr<std::vector<std::string>> ApplyConfigFile(
    std::vector<std::string> args) {
  std::optional<std::string> path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (absl::StartsWith(args[i], "--config=")) path = args[i].substr(9);
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) {
    return absl::InvalidArgumentError(
        absl::StrFormat("cannot read config file '%s'", *path));
  }
  auto present = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || absl::StartsWith(a, flag + "=");
    });
  };
  std::vector<std::string> extra;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view.front() == '#') continue;
    const size_t eq = view.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%s:%d: expected key=value", *path, line_number));
    }
    const std::string key(absl::StripAsciiWhitespace(view.substr(0, eq)));
    const std::string value(absl::StripAsciiWhitespace(view.substr(eq + 1)));
    const std::string flag = "--" + key;
    if (key.empty() || key == "config" || present(flag)) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value != "false") {
      extra.push_back(flag + "=" + value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

// Parses "N" as N rounds or "Ne" as N epochs, i.e. round(N / q) rounds.
absl::StatusOr<int64_t> ParseRounds(const std::string& text,
                                    std::optional<double> q, Context& ctx) {
  std::string digits = text;
  const bool epochs = !digits.empty() && digits.back() == 'e';
  if (epochs) digits.pop_back();
  double count;
  if (digits.empty() || !absl::SimpleAtod(digits, &count) || !(count >= 0.0) ||
      std::isinf(count) || (!epochs && count != std::floor(count))) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "--T-max expects a nonnegative integer or an epoch count like 400e, "
        "got '%s'",
        text));
  }
  if (!epochs) return static_cast<int64_t>(count);
  if (!q) {
    return absl::InvalidArgumentError("--T-max with the epoch suffix needs --q");
  }
  if (!(*q > 0.0 && *q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must lie in (0, 1), got %g", *q));
  }
  const int64_t rounds = std::llround(count / *q);
  ctx.params["epochs"] = count;
  ctx.notes.push_back(absl::StrFormat(
      "T-max %s: %g epochs at q=%g is %d rounds", text, count, *q, rounds));
  return rounds;
}

// ---------------------------------------------------------------- convert

struct ConvertFlags {
  double alpha = 0.0;
  std::optional<double> gamma;
  std::optional<double> epsilon;
  std::optional<double> delta;
  bool exact = false;
  bool bound = false;
};

Table ConversionTable(const ConversionResult& r) {
  Table table{{"value", "minimizer_p", "method"}, {}, true};
  table.rows.push_back(
      {r.value, r.minimizer_p ? Cell(*r.minimizer_p) : Cell(),
       std::string(ConversionMethodName(r.method))});
  return table;
}

absl::StatusOr<Table> RunRdpToDp(const ConvertFlags& f, Context& ctx) {
  absl::StatusOr<RenyiOrder> order = OrderFromFlag(f.alpha);
  if (!order.ok()) return order.status();
  if (!f.gamma || f.delta.has_value() == f.epsilon.has_value()) {
    return absl::InvalidArgumentError(
        "rdp-to-dp needs --gamma and exactly one of --delta or --epsilon");
  }
  ctx.params["alpha"] = f.alpha;
  ctx.params["gamma"] = *f.gamma;
  absl::StatusOr<ConversionResult> result;
  if (f.delta) {
    ctx.params["delta"] = *f.delta;
    ctx.params["exact"] = f.exact;
    result = f.exact ? EpsilonExact(*order, *f.gamma, *f.delta, ctx.tol)
                     : EpsilonUpperBound(*order, *f.gamma, *f.delta);
  } else {
    ctx.params["epsilon"] = *f.epsilon;
    result = DeltaExact(*order, *f.gamma, *f.epsilon, ctx.tol);
  }
  if (!result.ok()) return result.status();
  return ConversionTable(*result);
}

absl::StatusOr<Table> RunDpToRdp(const ConvertFlags& f, Context& ctx) {
  absl::StatusOr<RenyiOrder> order = OrderFromFlag(f.alpha);
  if (!order.ok()) return order.status();
  if (!f.epsilon || !f.delta || f.gamma) {
    return absl::InvalidArgumentError(
        "dp-to-rdp needs --epsilon and --delta (and no --gamma)");
  }
  ctx.params["alpha"] = f.alpha;
  ctx.params["epsilon"] = *f.epsilon;
  ctx.params["delta"] = *f.delta;
  ctx.params["bound"] = f.bound;
  absl::StatusOr<ConversionResult> result =
      f.bound ? GammaLowerBound(*order, *f.epsilon, *f.delta)
              : GammaExact(*order, *f.epsilon, *f.delta, ctx.tol);
  if (!result.ok()) return result.status();
  return ConversionTable(*result);
}

// ---------------------------------------------------------------- compose

struct ComposeFlags {
  double sigma = 0.0;
  std::string t_max;
  double delta = 0.0;
  std::optional<double> q;
  std::string method = "both";
  int64_t stride = 1;
  std::string alpha_domain = "admissible";
};

absl::StatusOr<Table> RunCompose(const ComposeFlags& f, Context& ctx) {
  if (f.method != "ma" && f.method != "improved" && f.method != "both") {
    return absl::InvalidArgumentError("--method must be ma, improved or both");
  }
  if (f.alpha_domain != "admissible" && f.alpha_domain != "continuous") {
    return absl::InvalidArgumentError(
        "--alpha-domain must be admissible or continuous");
  }
  if (f.stride < 1) {
    return absl::InvalidArgumentError("--stride must be >= 1");
  }
  absl::StatusOr<int64_t> t_max = ParseRounds(f.t_max, f.q, ctx);
  if (!t_max.ok()) return t_max.status();
  absl::StatusOr<GaussianMechanismSpec> gaussian =
      GaussianMechanismSpec::Create(f.sigma);
  if (!gaussian.ok()) return gaussian.status();
  if (!(f.delta > 0.0 && f.delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", f.delta));
  }
  std::optional<SubsampledGaussianSpec> sgd;
  if (f.q) {
    absl::StatusOr<SubsampledGaussianSpec> spec = SubsampledSpec(*f.q, f.sigma);
    if (!spec.ok()) return spec.status();
    sgd = *spec;
    ctx.params["q"] = *f.q;
    ctx.params["rho_q"] = spec->rho_q;
    ctx.params["alpha_domain"] = f.alpha_domain;
  } else {
    ctx.params["rho"] = gaussian->rho;
  }
  ctx.params["sigma"] = f.sigma;
  ctx.params["delta"] = f.delta;
  ctx.params["T_max"] = *t_max;
  ctx.params["method"] = f.method;
  ctx.params["stride"] = f.stride;
  const OrderDomain domain = f.alpha_domain == "continuous"
                                 ? OrderDomain::kContinuous
                                 : OrderDomain::kAdmissibleIntegers;

  auto epsilon = [&](AccountingMethod method,
                     int64_t rounds) -> absl::StatusOr<double> {
    if (sgd) return SgdEpsilon(*sgd, rounds, f.delta, method, domain, ctx.tol);
    if (method == AccountingMethod::kMa) {
      return MaGaussianEpsilon(gaussian->rho, rounds, f.delta);
    }
    return ImprovedEpsilon(gaussian->rho, rounds, f.delta, ctx.tol);
  };

  Table table{{"T", "eps_ma", "eps_improved"}, {}, false};
  std::vector<int64_t> rounds_list;
  for (int64_t t = f.stride; t <= *t_max; t += f.stride) rounds_list.push_back(t);
  if (*t_max >= 1 && (rounds_list.empty() || rounds_list.front() != 1)) {
    rounds_list.insert(rounds_list.begin(), 1);
  }
  if (*t_max >= 1 && rounds_list.back() != *t_max) rounds_list.push_back(*t_max);
  for (int64_t t : rounds_list) {
    std::vector<Cell> row = {t, Cell(), Cell()};
    if (f.method != "improved") {
      absl::StatusOr<double> v = epsilon(AccountingMethod::kMa, t);
      if (!v.ok()) return v.status();
      row[1] = *v;
    }
    if (f.method != "ma") {
      absl::StatusOr<double> v = epsilon(AccountingMethod::kImproved, t);
      if (!v.ok()) return v.status();
      row[2] = *v;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// -------------------------------------------------------------- calibrate

struct CalibrateFlags {
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t rounds = 1;
  std::string method = "both";
};

absl::StatusOr<Table> RunCalibrate(const CalibrateFlags& f, Context& ctx) {
  if (f.method != "ma" && f.method != "improved" && f.method != "both") {
    return absl::InvalidArgumentError("--method must be ma, improved or both");
  }
  ctx.params["epsilon"] = f.epsilon;
  ctx.params["delta"] = f.delta;
  ctx.params["T"] = f.rounds;
  ctx.params["method"] = f.method;
  Table table{{"method", "sigma", "sigma2"}, {}, f.method != "both"};
  if (f.method != "improved") {
    absl::StatusOr<double> sigma = MaCalibrateSigma(f.epsilon, f.delta, f.rounds);
    if (!sigma.ok()) return sigma.status();
    table.rows.push_back({std::string("ma"), *sigma, *sigma * *sigma});
  }
  if (f.method != "ma") {
    absl::StatusOr<double> sigma =
        ImprovedCalibrateSigma(f.epsilon, f.delta, f.rounds);
    if (!sigma.ok()) return sigma.status();
    table.rows.push_back({std::string("improved"), *sigma, *sigma * *sigma});
  }
  return table;
}

// ----------------------------------------------------------------- region

struct RegionFlags {
  std::string mechanism = "gaussian";
  double sigma = 0.0;
  int64_t rounds = 1;
  std::optional<double> q;
  std::optional<std::string> bounds;
  int grid = 1001;
};

absl::StatusOr<Table> RunRegion(const RegionFlags& f, Context& ctx) {
  const bool gaussian = f.mechanism == "gaussian";
  if (!gaussian && f.mechanism != "sgd") {
    return absl::InvalidArgumentError("--mechanism must be gaussian or sgd");
  }
  if (f.grid < 1) return absl::InvalidArgumentError("--grid must be >= 1");
  if (f.rounds < 0) return absl::InvalidArgumentError("--T must be >= 0");
  const std::vector<std::string> bounds =
      SplitList(f.bounds.value_or(gaussian ? "exact,rdp,kl" : "rdp,fdp"));
  if (bounds.empty()) {
    return absl::InvalidArgumentError("--bounds must list at least one bound");
  }
  for (const std::string& b : bounds) {
    if (b != "exact" && b != "rdp" && b != "kl" && b != "fdp" && b != "dp") {
      return absl::InvalidArgumentError(absl::StrFormat(
          "unknown bound '%s' (expected exact, rdp, kl, fdp or dp)", b));
    }
    if (b == "exact" && !gaussian) {
      return absl::InvalidArgumentError(
          "the exact region is available only for --mechanism gaussian");
    }
  }
  ctx.params["mechanism"] = f.mechanism;
  ctx.params["sigma"] = f.sigma;
  ctx.params["T"] = f.rounds;
  ctx.params["bounds"] = bounds;
  ctx.params["grid"] = f.grid;

  absl::StatusOr<GaussianMechanismSpec> base =
      GaussianMechanismSpec::Create(f.sigma);
  if (!base.ok()) return base.status();
  const double t = static_cast<double>(f.rounds);
  std::optional<RenyiCurve> curve;
  std::vector<double> alphas;
  double kl_gamma;
  double fdp_mu;
  if (gaussian) {
    curve = RdpCompose(base->Curve(), f.rounds);
    alphas = DefaultOrderGrid();
    kl_gamma = base->rho * t;
    fdp_mu = std::sqrt(2.0 * base->rho * t);
  } else {
    if (!f.q) return absl::InvalidArgumentError("--mechanism sgd needs --q");
    absl::StatusOr<SubsampledGaussianSpec> spec = SubsampledSpec(*f.q, f.sigma);
    if (!spec.ok()) return spec.status();
    ctx.params["q"] = *f.q;
    curve = SubsampledCurve(*spec, f.rounds);
    for (const auto& point : curve->points()) alphas.push_back(point.first);
    // KL is the alpha -> 1 limit of a nondecreasing profile, so the smallest
    // admissible order bounds it.
    kl_gamma = (*curve)(alphas.front());
    fdp_mu = SgdFdpMu(*f.q, f.sigma, f.rounds);
  }

  std::vector<std::vector<ApproxDpPoint>> dp_profiles;
  if (std::find(bounds.begin(), bounds.end(), "dp") != bounds.end()) {
    const std::vector<double> eps_grid = DefaultEpsilonGrid();
    for (double alpha : alphas) {
      absl::StatusOr<std::vector<ApproxDpPoint>> profile =
          DpProfileFromRdp(*RenyiOrder::Create(alpha), (*curve)(alpha),
                           eps_grid, ctx.tol);
      if (!profile.ok()) return profile.status();
      dp_profiles.push_back(*std::move(profile));
    }
  }

  Table table;
  table.columns.push_back("tau");
  for (const std::string& b : bounds) table.columns.push_back(b);
  for (double tau : DefaultTauGrid(f.grid)) {
    std::vector<Cell> row = {tau};
    for (const std::string& b : bounds) {
      absl::StatusOr<double> beta;
      if (b == "exact" || b == "fdp") {
        beta = GaussianTradeoff(fdp_mu, tau);
      } else if (b == "rdp") {
        beta = RegionIntersectOverAlpha(*curve, alphas, tau, ctx.tol);
      } else if (b == "kl") {
        beta = KlRegionBoundary(kl_gamma, tau, ctx.tol);
      } else {
        double best = 0.0;
        for (const auto& profile : dp_profiles) {
          best = std::max(best, DpProfileBoundary(profile, tau));
        }
        beta = best;
      }
      if (!beta.ok()) return beta.status();
      row.push_back(*beta);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------- compare

struct CompareAreasFlags {
  double q = 0.0;
  std::string sigma_list;
  std::string tq_list;
};

absl::StatusOr<Table> RunCompareAreas(const CompareAreasFlags& f,
                                      Context& ctx) {
  absl::StatusOr<std::vector<double>> sigmas =
      ParseDoubleList(f.sigma_list, "sigma-list");
  if (!sigmas.ok()) return sigmas.status();
  absl::StatusOr<std::vector<double>> tqs = ParseDoubleList(f.tq_list, "Tq-list");
  if (!tqs.ok()) return tqs.status();
  if (!(f.q > 0.0 && f.q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must lie in (0, 1), got %g", f.q));
  }
  ctx.params["q"] = f.q;
  ctx.params["sigma_list"] = *sigmas;
  ctx.params["Tq_list"] = *tqs;
  Table table{{"sigma", "Tq", "T", "area_fdp", "area_rdp", "difference"},
              {},
              false};
  for (double sigma : *sigmas) {
    for (double tq : *tqs) {
      if (!(tq >= 0.0)) {
        return absl::InvalidArgumentError("--Tq-list values must be >= 0");
      }
      const int64_t rounds = std::llround(tq / f.q);
      absl::StatusOr<SgdAreaComparison> areas =
          CompareSgdAreas(f.q, sigma, rounds);
      if (!areas.ok()) return areas.status();
      table.rows.push_back({sigma, tq, rounds, areas->area_fdp,
                            areas->area_rdp, areas->difference});
    }
  }
  return table;
}

struct CompareGdpFlags {
  double q = 0.0;
  double sigma = 0.0;
  int64_t rounds = 0;
  double delta = 0.0;
  std::string alpha_domain = "continuous";
};

absl::StatusOr<Table> RunCompareGdp(const CompareGdpFlags& f, Context& ctx) {
  if (f.alpha_domain != "admissible" && f.alpha_domain != "continuous") {
    return absl::InvalidArgumentError(
        "--alpha-domain must be admissible or continuous");
  }
  absl::StatusOr<SubsampledGaussianSpec> spec = SubsampledSpec(f.q, f.sigma);
  if (!spec.ok()) return spec.status();
  ctx.params["q"] = f.q;
  ctx.params["sigma"] = f.sigma;
  ctx.params["T"] = f.rounds;
  ctx.params["delta"] = f.delta;
  ctx.params["alpha_domain"] = f.alpha_domain;
  const OrderDomain domain = f.alpha_domain == "continuous"
                                 ? OrderDomain::kContinuous
                                 : OrderDomain::kAdmissibleIntegers;
  absl::StatusOr<double> improved = SgdEpsilon(
      *spec, f.rounds, f.delta, AccountingMethod::kImproved, domain, ctx.tol);
  if (!improved.ok()) return improved.status();
  const double mu = SgdFdpMu(f.q, f.sigma, f.rounds);
  ctx.params["mu"] = mu;
  double gdp = 0.0;
  if (mu > 0.0) {
    absl::StatusOr<double> eps = GdpEpsilon(mu, f.delta, ctx.tol);
    if (!eps.ok()) return eps.status();
    gdp = *eps;
  }
  Table table{{"eps_improved", "eps_gdp"}, {}, true};
  table.rows.push_back({*improved, gdp});
  return table;
}

absl::Status WriteFile(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    return absl::InvalidArgumentError(
        absl::StrFormat("cannot open '%s' for writing", path));
  }
  file << content;
  if (!file.good()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("failed writing '%s'", path));
  }
  return absl::OkStatus();
}

}  // namespace

int RunCli(const std::vector<std::string>& raw_args, std::ostream& out,
           std::ostream& err) {
  absl::StatusOr<std::vector<std::string>> args = ApplyConfigFile(raw_args);
  if (!args.ok()) {
    err << "error: " << args.status().message() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Conversions between approximate DP, Renyi DP and "
               "hypothesis-test DP"};
  app.name("dpconv");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Context ctx;
  std::string format = "csv";
  std::string output;
  std::string config;
  app.add_option("--tol", ctx.tol.abs_tol,
                 "Absolute tolerance of the numerical solvers")
      ->envname("DPCONV_TOL");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", output, "Write results to this file");
  app.add_option("--config", config, "File of key=value lines mirroring flags");

  ConvertFlags convert;
  CLI::App* convert_cmd = app.add_subcommand("convert", "Convert one point");
  convert_cmd->require_subcommand(1);
  CLI::App* rdp_to_dp = convert_cmd->add_subcommand(
      "rdp-to-dp", "eps for a given delta, or delta for a given eps");
  CLI::App* dp_to_rdp =
      convert_cmd->add_subcommand("dp-to-rdp", "Largest gamma implying (eps, delta)-DP");
  for (CLI::App* cmd : {rdp_to_dp, dp_to_rdp}) {
    cmd->add_option("--alpha", convert.alpha, "Renyi order")->required();
    cmd->add_option("--epsilon", convert.epsilon, "eps");
    cmd->add_option("--delta", convert.delta, "delta");
  }
  rdp_to_dp->add_option("--gamma", convert.gamma, "Renyi bound");
  rdp_to_dp->add_flag("--exact", convert.exact,
                      "Exact eps instead of the closed-form bound");
  dp_to_rdp->add_option("--gamma", convert.gamma, "Not accepted here");
  dp_to_rdp->add_flag("--bound", convert.bound,
                      "Closed-form lower bound instead of the exact value");

  ComposeFlags compose;
  CLI::App* compose_cmd = app.add_subcommand("compose", "Composition sweeps");
  compose_cmd->require_subcommand(1);
  CLI::App* compose_gaussian = compose_cmd->add_subcommand(
      "gaussian", "eps after T rounds of (subsampled) Gaussian noise");
  compose_gaussian->add_option("--sigma", compose.sigma, "Noise scale")
      ->required();
  compose_gaussian
      ->add_option("--T-max", compose.t_max,
                   "Largest T, or epochs with an 'e' suffix (needs --q)")
      ->required();
  compose_gaussian->add_option("--delta", compose.delta, "delta")->required();
  compose_gaussian->add_option("--q", compose.q, "Sampling rate");
  compose_gaussian->add_option("--method", compose.method, "ma, improved or both");
  compose_gaussian->add_option("--stride", compose.stride, "Step between rows");
  compose_gaussian->add_option("--alpha-domain", compose.alpha_domain,
                               "admissible or continuous orders (with --q)");

  CalibrateFlags calibrate;
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "Noise scale for a target (eps, delta)");
  calibrate_cmd->add_option("--epsilon", calibrate.epsilon, "eps")->required();
  calibrate_cmd->add_option("--delta", calibrate.delta, "delta")->required();
  calibrate_cmd->add_option("--T", calibrate.rounds, "Rounds");
  calibrate_cmd->add_option("--method", calibrate.method, "ma, improved or both");

  RegionFlags region;
  CLI::App* region_cmd =
      app.add_subcommand("region", "Sampled privacy-region boundaries");
  region_cmd->add_option("--mechanism", region.mechanism, "gaussian or sgd");
  region_cmd->add_option("--sigma", region.sigma, "Noise scale")->required();
  region_cmd->add_option("--T", region.rounds, "Rounds");
  region_cmd->add_option("--q", region.q, "Sampling rate (sgd)");
  region_cmd->add_option("--bounds", region.bounds,
                         "Comma list of exact, rdp, kl, fdp, dp");
  region_cmd->add_option("--grid", region.grid, "Number of tau points");

  CompareAreasFlags areas;
  CompareGdpFlags gdp;
  CLI::App* compare_cmd = app.add_subcommand("compare", "Baseline comparisons");
  compare_cmd->require_subcommand(1);
  CLI::App* compare_areas =
      compare_cmd->add_subcommand("areas", "f-DP minus RDP region areas");
  compare_areas->add_option("--q", areas.q, "Sampling rate")->required();
  compare_areas->add_option("--sigma-list", areas.sigma_list, "Comma list")
      ->required();
  compare_areas->add_option("--Tq-list", areas.tq_list, "Comma list of epochs")
      ->required();
  CLI::App* compare_gdp =
      compare_cmd->add_subcommand("gdp", "Improved accountant versus GDP");
  compare_gdp->add_option("--q", gdp.q, "Sampling rate")->required();
  compare_gdp->add_option("--sigma", gdp.sigma, "Noise scale")->required();
  compare_gdp->add_option("--T", gdp.rounds, "Rounds")->required();
  compare_gdp->add_option("--delta", gdp.delta, "delta")->required();
  compare_gdp->add_option("--alpha-domain", gdp.alpha_domain,
                          "admissible or continuous orders");

  std::vector<std::string> reversed(args->rbegin(), args->rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (absl::Status s = ctx.tol.Validate(); !s.ok()) {
    err << "error: " << s.message() << "\n";
    return kExitUsage;
  }

  std::string command;
  absl::StatusOr<Table> table;
  if (rdp_to_dp->parsed()) {
    command = "convert rdp-to-dp";
    table = RunRdpToDp(convert, ctx);
  } else if (dp_to_rdp->parsed()) {
    command = "convert dp-to-rdp";
    table = RunDpToRdp(convert, ctx);
  } else if (compose_gaussian->parsed()) {
    command = "compose gaussian";
    table = RunCompose(compose, ctx);
  } else if (calibrate_cmd->parsed()) {
    command = "calibrate";
    table = RunCalibrate(calibrate, ctx);
  } else if (region_cmd->parsed()) {
    command = "region";
    table = RunRegion(region, ctx);
  } else if (compare_areas->parsed()) {
    command = "compare areas";
    table = RunCompareAreas(areas, ctx);
  } else if (compare_gdp->parsed()) {
    command = "compare gdp";
    table = RunCompareGdp(gdp, ctx);
  } else {
    err << "error: no command given\n";
    return kExitUsage;
  }
  for (const std::string& note : ctx.notes) err << "note: " << note << "\n";
  if (!table.ok()) {
    err << "error: " << table.status().message() << "\n";
    return ExitCodeFor(table.status());
  }

  const std::string content =
      format == "json" ? RenderJson(*table) : RenderCsv(*table);
  if (output.empty()) {
    out << content;
  } else if (absl::Status s = WriteFile(output, content); !s.ok()) {
    err << "error: " << s.message() << "\n";
    return kExitUsage;
  }
  if (format == "json") {
    Json meta = Json::object();
    meta["tool"] = "dpconv";
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["parameters"] = ctx.params;
    meta["tolerance"] = {{"abs_tol", ctx.tol.abs_tol},
                         {"rel_tol", ctx.tol.rel_tol},
                         {"max_iters", ctx.tol.max_iters}};
    meta["rows"] = table->rows.size();
    const std::string text = meta.dump(2) + "\n";
    if (output.empty()) {
      err << text;
    } else if (absl::Status s = WriteFile(output + ".meta.json", text);
               !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitUsage;
    }
  }
  return kExitOk;
}

}  // namespace dpconv
