#pragma once

// bellcost command line: curve | model | verify | sample | reproduce.
// Exit codes: 0 success, 1 failed check or runtime failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bellcost.hpp"

namespace bellcost::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kUsage = 2;

/// Usage problems detected after parsing (bad values, bad combinations).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decimal number, or the exact tokens sqrt2 and sq (= 2 sqrt 2), optionally negated.
inline double parse_number(const std::string& token) {
  std::string t = token;
  double sign = 1.0;
  if (!t.empty() && t[0] == '-') {
    sign = -1.0;
    t.erase(0, 1);
  }
  if (t == "sqrt2") return sign * std::sqrt(2.0);
  if (t == "sq") return sign * 2.0 * std::sqrt(2.0);
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used == token.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("not a number: '" + token + "'");
}

inline std::optional<double> parse_optional(const std::string& token) {
  if (token.empty()) return std::nullopt;
  return parse_number(token);
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// partial file. An empty path or "-" writes to `fallback`.
template <typename Writer>
void write_output(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    write(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + target.string() + ": " + ec.message());
  }
}

inline OutcomeSigns parse_signs(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "1" || item == "+1") v.push_back(1);
    else if (item == "-1") v.push_back(-1);
    else throw UsageError("--signs entries must be 1 or -1");
  }
  if (v.size() != 4) throw UsageError("--signs needs four entries s,t,u,v");
  return {v[0], v[1], v[2], v[3]};
}

inline nlohmann::json evaluation_block(const Model& m) {
  return {{"S", chsh_value(m)},
          {"I", mutual_information(m)},
          {"nonsignaling", is_nonsignaling(correlations_of(m), 1e-12)},
          {"factorized", is_factorized_per_lambda(m)}};
}

struct CurveArgs {
  std::string cls;
  std::string from = "2", to = "4";
  int points = 201;
  std::string out;
};

inline int run_curve(const CurveArgs& a, std::ostream& out) {
  const auto cls = parse_causal_class(a.cls);
  if (!cls) throw UsageError("unknown class '" + a.cls + "'");
  const auto pts = curve_sweep(*cls, parse_number(a.from), parse_number(a.to), a.points);
  write_output(a.out, out, [&](std::ostream& os) { write_sweep_csv(os, *cls, pts); });
  return kOk;
}

struct ModelArgs {
  std::string family;
  std::string p, ptilde, s, q;
  std::string branch;
  std::string bias_x = "0", bias_y = "0";
  std::string signs = "1,1,1,1";
  bool flip = false;
  std::string out;
};

inline Model build_model(const ModelArgs& a) {
  const auto p = parse_optional(a.p);
  const auto ptilde = parse_optional(a.ptilde);
  const auto s = parse_optional(a.s);
  const auto q = parse_optional(a.q);
  const Bias bias{parse_number(a.bias_x), parse_number(a.bias_y)};
  const bool biased = bias.eps_x != 0.0 || bias.eps_y != 0.0;
  const OutcomeSigns signs = parse_signs(a.signs);
  if (p && s) throw UsageError("--p and --s are mutually exclusive");

  auto need_p = [&](auto&& from_s) {
    if (p) return *p;
    if (s) return from_s(*s);
    throw UsageError("--family " + a.family + " needs --p or --s");
  };
  auto lift = [&](LiftBase base, LiftParams params) {
    return biased ? biased_lift(base, params, bias) : base_model(base, params);
  };

  if (a.family != "table2" && (ptilde || !a.branch.empty())) {
    throw UsageError("--ptilde and --branch apply to --family table2 only");
  }
  if (a.family != "extreme-bias" && q) throw UsageError("--q applies to --family extreme-bias only");

  if (a.family == "table1") {
    return lift(LiftBase::Retrocausal, {need_p([](double v) { return (4.0 - v) / 8.0; }), 0.5, signs});
  }
  if (a.family == "onesided") {
    return lift(LiftBase::OneSided, {need_p([](double v) { return (4.0 - v) / 4.0; }), 0.5, signs});
  }
  if (a.family == "table2") {
    if (ptilde && !a.branch.empty()) throw UsageError("--ptilde and --branch are mutually exclusive");
    double pp = 0.0, pt = 0.0;
    if (ptilde) {
      if (!p) throw UsageError("--ptilde needs --p");
      pp = *p;
      pt = *ptilde;
    } else if (s && a.branch.empty()) {
      const auto pair = causal_params_for(*s);  // optimal branch for this S
      pp = pair.p;
      pt = pair.p_star;
    } else {
      Table2Branch br = Table2Branch::Same;
      if (a.branch == "conjugate") br = Table2Branch::Conjugate;
      else if (!a.branch.empty() && a.branch != "same") {
        throw UsageError("--branch must be same or conjugate");
      }
      if (br == Table2Branch::Same) {
        pp = pt = need_p([](double v) { return std::sqrt((4.0 - v) / 8.0); });
      } else {
        const auto pair = s ? causal_pair(*s) : conjugate(*p);
        pp = pair.p;
        pt = pair.p_star;
      }
    }
    return lift(LiftBase::Causal, {pp, pt, signs});
  }
  if (a.family == "superdet") {
    // Reproduces the correlations of table1(p) with fully determined settings.
    const double pv = need_p([](double v) { return (4.0 - v) / 8.0; });
    const Model base = table1_model(pv, signs);
    const SettingDist settings = SettingDist::from_bias(bias.eps_x, bias.eps_y);
    return superdeterministic_model(correlations_of(base), settings)
        .relabeled("superdet p=" + format_sig12(pv));
  }
  if (a.family == "extreme-bias") {
    if (!q) throw UsageError("--family extreme-bias needs --q");
    if (p || s || biased) throw UsageError("--family extreme-bias takes only --q and --signs");
    return extreme_bias_example(*q, signs);
  }
  throw UsageError("unknown family '" + a.family + "'");
}

inline int run_model(const ModelArgs& a, std::ostream& out) {
  Model m = build_model(a);
  if (a.flip) m = flip_lift(m);
  nlohmann::json j = to_json(m);
  j["evaluation"] = evaluation_block(m);
  write_output(a.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

struct VerifyArgs {
  std::string cls = "retro";
  std::string s = "sq";
  int grid = 40;
  unsigned threads = 0;
};

inline int run_verify(const VerifyArgs& a, std::ostream& out) {
  const auto cls = parse_causal_class(a.cls);
  if (!cls) throw UsageError("unknown class '" + a.cls + "'");
  if (*cls == CausalClass::Superdeterministic) {
    throw UsageError("verify supports retro, causal, zigzag and onesided");
  }
  if (a.grid < 1) throw UsageError("--grid must be positive");
  SearchConfig cfg;
  cfg.resolution = a.grid;
  cfg.target_s = parse_number(a.s);
  cfg.cls = *cls;
  cfg.threads = a.threads;
  const auto analytic = curve_point(*cls, cfg.target_s).info;
  const auto r = brute_force_min_info(cfg);
  const auto at_achieved = curve_point(*cls, r.achieved_s).info;
  const bool below = r.best_info < at_achieved - 1e-9;
  nlohmann::json j{{"class", to_string(*cls)},
                   {"target_s", cfg.target_s},
                   {"grid", a.grid},
                   {"analytic", analytic},
                   {"brute_force", r.best_info},
                   {"gap", r.best_info - analytic},
                   {"achieved_s", r.achieved_s},
                   {"analytic_at_achieved_s", at_achieved},
                   {"below_curve", below},
                   {"witness_model", to_json(r.best_model)}};
  out << j.dump(2) << '\n';
  return below ? kFailed : kOk;
}

struct SampleArgs {
  std::string model;
  long long n = 0;
  std::uint64_t seed = 1;
  std::string order = "settings-first";
  unsigned threads = 0;
  std::string out;
  std::string stats;
};

inline int run_sample(const SampleArgs& a, std::ostream& out) {
  if (a.n < 1) throw UsageError("--n must be positive");
  SamplingOrder order;
  if (a.order == "source-first") order = SamplingOrder::SourceFirst;
  else if (a.order == "settings-first") order = SamplingOrder::SettingsFirst;
  else throw UsageError("--order must be source-first or settings-first");

  std::ifstream in(a.model);
  if (!in) throw std::runtime_error("cannot read " + a.model);
  nlohmann::json mj;
  try {
    in >> mj;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(a.model + ": " + e.what());
  }
  const Model m = model_from_json(mj);
  const auto rounds =
      sample_rounds(m, static_cast<std::size_t>(a.n), a.seed, order, worker_count(a.threads));
  const auto st = empirical_stats(rounds);
  nlohmann::json j{{"rng", CounterRng::kAlgorithm},
                   {"seed", a.seed},
                   {"order", to_string(order)},
                   {"rounds", st.rounds},
                   {"model", {{"S", chsh_value(m)}, {"I", mutual_information(m)}}},
                   {"s_hat", st.s_hat},
                   {"s_stderr", st.s_stderr},
                   {"info_hat", st.info_hat},
                   {"prediction_accuracy", st.prediction_accuracy},
                   {"setting_counts", st.setting_counts}};
  if (!a.out.empty()) {
    write_output(a.out, out, [&](std::ostream& os) { write_rounds_csv(os, rounds); });
  }
  write_output(a.stats, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

struct ReproduceRow {
  std::string name;
  double value;
  double expected;
  double tol;
  bool pass() const { return std::abs(value - expected) <= tol; }
};

inline std::vector<ReproduceRow> reproduce_rows() {
  const double sq = 2.0 * std::sqrt(2.0);
  const auto app = appendix_checks();
  return {
      {"I_R(2sqrt2)", i_R(sq), 0.0463, 1e-3},
      {"I_C(2sqrt2)", i_C(sq).info, 0.0800, 1e-3},
      {"I_OS(2sqrt2)", i_OS(sq), 0.1275, 1e-3},
      {"I_R(4)", i_R(4.0), std::log2(4.0 / 3.0), 1e-9},
      {"I_C(4)", i_C(4.0).info, 1.0, 1e-9},
      {"I_OS(4)", i_OS(4.0), 1.0, 1e-9},
      {"I_SD", i_SD(sq), 2.0, 0.0},
      {"p0", app.p0, 0.218, 5e-4},
      {"S0", app.s0, 3.620, 5e-3},
      {"slope I1'(S0)", app.slope_i1_at_s0, 1.059, 5e-3},
      {"slope I2'(S0)", app.slope_i2_at_s0, 1.059, 5e-3},
      {"|I1'-I2'| at S0", std::abs(app.slope_i1_at_s0 - app.slope_i2_at_s0), 0.0, 1e-4},
  };
}

inline int run_reproduce(std::ostream& out) {
  bool all = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %16s %12s %10s  %s\n", "quantity", "value", "expected",
                "tol", "status");
  out << line;
  for (const auto& r : reproduce_rows()) {
    all = all && r.pass();
    std::snprintf(line, sizeof line, "%-18s %16.10f %12.6f %10.1e  %s\n", r.name.c_str(), r.value,
                  r.expected, r.tol, r.pass() ? "PASS" : "FAIL");
    out << line;
  }
  return all ? kOk : kFailed;
}

/// Parses argv and runs one subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"bellcost: information cost of measurement dependence in CHSH tests"};
  app.require_subcommand(1);

  CurveArgs curve;
  auto* c = app.add_subcommand("curve", "Sweep a minimal-information curve to CSV");
  c->add_option("--class", curve.cls, "retro|causal|zigzag|onesided|superdet")->required();
  c->add_option("--from", curve.from, "first S (accepts sqrt2, sq)");
  c->add_option("--to", curve.to, "last S");
  c->add_option("--points", curve.points, "number of points")->check(CLI::PositiveNumber);
  c->add_option("--out", curve.out, "CSV file (default stdout)");

  ModelArgs model;
  auto* m = app.add_subcommand("model", "Build a model and evaluate S and I");
  m->add_option("--family", model.family, "table1|table2|onesided|superdet|extreme-bias")
      ->required();
  m->add_option("--p", model.p, "family parameter p");
  m->add_option("--s", model.s, "target S instead of --p");
  m->add_option("--ptilde", model.ptilde, "second causal parameter (table2)");
  m->add_option("--branch", model.branch, "same|conjugate (table2)");
  m->add_option("--bias-x", model.bias_x, "setting bias p(x=0)-p(x=1)");
  m->add_option("--bias-y", model.bias_y, "setting bias p(y=0)-p(y=1)");
  m->add_option("--q", model.q, "setting probability q (extreme-bias)");
  m->add_option("--signs", model.signs, "outcome signs s,t,u,v");
  m->add_flag("--flip", model.flip, "apply the outcome-flip lift");
  m->add_option("--out", model.out, "JSON file (default stdout)");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Brute-force the minimum on a grid and compare");
  v->add_option("--class", verify.cls, "retro|causal|zigzag|onesided");
  v->add_option("--s", verify.s, "target S (default sq)");
  v->add_option("--grid", verify.grid, "grid resolution N");
  v->add_option("--threads", verify.threads, "worker threads (0: all)");

  SampleArgs sample;
  auto* sm = app.add_subcommand("sample", "Sample rounds from a model JSON");
  sm->add_option("--model", sample.model, "model JSON")->required();
  sm->add_option("--n", sample.n, "number of rounds")->required();
  sm->add_option("--seed", sample.seed, "64-bit seed");
  sm->add_option("--order", sample.order, "source-first|settings-first");
  sm->add_option("--threads", sample.threads, "worker threads (0: all)");
  sm->add_option("--out", sample.out, "rounds CSV (omitted: not written)");
  sm->add_option("--stats", sample.stats, "stats JSON (default stdout)");

  auto* rp = app.add_subcommand("reproduce", "Print headline constants with PASS/FAIL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c) return run_curve(curve, out);
    if (*m) return run_model(model, out);
    if (*v) return run_verify(verify, out);
    if (*sm) return run_sample(sample, out);
    if (*rp) return run_reproduce(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const OrderUnavailable& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}

}  // namespace bellcost::cli
