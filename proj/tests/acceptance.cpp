// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bellcost.hpp"

using namespace bellcost;

namespace {

const double kSq = 2.0 * std::sqrt(2.0);

/// Collects failed sub-checks of one criterion together with a short summary.
struct Check {
  std::vector<std::string> failures;
  std::ostringstream summary;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double value, double expected, double tol, const std::string& what) {
    if (!(std::abs(value - expected) <= tol)) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "%s = %.12g, expected %.12g +- %.1e", what.c_str(), value,
                    expected, tol);
      failures.push_back(buf);
    }
  }
};

std::string fmt(double v, const char* pattern = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void headline(Check& c) {
  c.near(i_R(kSq), 0.0463, 1e-3, "i_R(2sqrt2)");
  c.near(i_C(kSq).info, 0.0800, 1e-3, "i_C(2sqrt2)");
  c.near(i_OS(kSq), 0.1275, 1e-3, "i_OS(2sqrt2)");
  c.near(i_R(4.0), std::log2(4.0 / 3.0), 1e-9, "i_R(4)");
  c.near(i_C(4.0).info, 1.0, 1e-9, "i_C(4)");
  c.near(i_OS(4.0), 1.0, 1e-9, "i_OS(4)");
  for (int k = 0; k <= 100; ++k) c.expect(i_SD(2.0 + 0.02 * k) == 2.0, "i_SD != 2");
  c.summary << "i_R=" << fmt(i_R(kSq)) << " i_C=" << fmt(i_C(kSq).info)
            << " i_OS=" << fmt(i_OS(kSq)) << " i_R(4)=" << fmt(i_R(4.0));
}

void roots(Check& c) {
  c.near(find_p0(), 0.218, 5e-4, "p0");
  c.near(s0(), 3.620, 5e-3, "S0");
  c.summary << "p0=" << fmt(find_p0(), "%.10f") << " S0=" << fmt(s0(), "%.10f");
}

void appendix(Check& c) {
  const auto r = appendix_checks(400);
  const double diff = std::abs(r.slope_i1_at_s0 - r.slope_i2_at_s0);
  c.expect(diff < 1e-4, "|I1'(S0) - I2'(S0)| = " + fmt(diff));
  const double slope = 0.5 * (r.slope_i1_at_s0 + r.slope_i2_at_s0);
  c.near(slope, r.slope_closed_form, 5e-3, "slope vs h'(p0)/(8p0)");
  c.near(slope, 1.059, 5e-3, "slope vs 1.059");
  c.expect(r.min_i1_second > 0.0, "I1'' not positive on [2,4]");
  c.expect(r.min_i2_second > 0.0, "I2'' not positive on [S0,4]");
  c.expect(r.f_ratio_monotone, "f(p)/(4-S) not monotone along I2");
  c.summary << "slope=" << fmt(slope, "%.8f") << " |dI'|=" << fmt(diff, "%.2e")
            << " minI1''=" << fmt(r.min_i1_second) << " minI2''=" << fmt(r.min_i2_second);
}

void ordering(Check& c) {
  int points = 0;
  for (int k = 1; k <= 99; ++k) {
    const double s = 2.0 + 2.0 * k / 100.0;
    const double r = i_R(s), cc = i_C(s).info, os = i_OS(s), sd = i_SD(s);
    const std::string at = " at S=" + fmt(s);
    c.expect(r < cc, "i_R < i_C" + at);
    c.expect(cc < sd, "i_C < i_SD" + at);
    c.expect(cc < os, "i_C < i_OS" + at);
    c.expect(i_Z(s).info == cc, "i_Z == i_C" + at);
    ++points;
  }
  c.expect(i_C(4.0).info <= i_OS(4.0) + 1e-12, "i_C(4) <= i_OS(4)");
  const double a = s0();
  for (int k = 0; k <= 200; ++k) {
    const double s = a + (4.0 - a) * k / 200.0;
    c.expect(i_2(s) <= i_1(s) + 1e-12, "I2 <= I1 at S=" + fmt(s));
  }
  c.summary << points << " interior points, 201 points on [S0,4]";
}

void model_curve(Check& c) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_s = 0.0, worst_i = 0.0;
  auto track = [&](double s, double s_ref, double info, double info_ref, const char* fam) {
    worst_s = std::max(worst_s, std::abs(s - s_ref));
    worst_i = std::max(worst_i, std::abs(info - info_ref));
    c.expect(std::abs(s - s_ref) < 1e-12, std::string(fam) + " S mismatch");
    c.expect(std::abs(info - info_ref) < 1e-9, std::string(fam) + " I mismatch");
  };
  for (int k = 0; k < 50; ++k) {
    const double p1 = 0.25 * u(rng);
    const Model t1 = table1_model(p1);
    track(chsh_value(t1), 4.0 - 8.0 * p1, mutual_information(t1), i_R(4.0 - 8.0 * p1), "table1");

    // Same branch for S <= S0, conjugate branch beyond: the causal optimum.
    const double s = 2.0 + 2.0 * u(rng);
    const auto pp = causal_params_for(s);
    const Model t2 = causal_table_model(pp.p, pp.p_star);
    track(chsh_value(t2), 4.0 - 8.0 * pp.p * pp.p_star, mutual_information(t2), i_C(s).info,
          "table2");

    const double ps = 0.5 * u(rng);
    const Model same = table2_model(ps, Table2Branch::Same);
    track(chsh_value(same), 4.0 - 8.0 * ps * ps, mutual_information(same),
          i_1(4.0 - 8.0 * ps * ps), "table2-same");

    const double po = 0.5 * u(rng);
    const Model os = one_sided_model(po);
    track(chsh_value(os), 4.0 - 4.0 * po, mutual_information(os), i_OS(4.0 - 4.0 * po),
          "onesided");

    const Model sd = superdeterministic_model(correlations_of(t1), SettingDist::uniform());
    track(chsh_value(sd), 4.0 - 8.0 * p1, mutual_information(sd), i_SD(4.0 - 8.0 * p1), "superdet");
  }
  c.summary << "50 draws x 5 families, max |dS|=" << fmt(worst_s, "%.1e")
            << " max |dI|=" << fmt(worst_i, "%.1e");
}

void flip(Check& c) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = 0;
  for (int k = 0; k < 20; ++k) {
    const OutcomeSigns signs{k & 1 ? -1 : 1, k & 2 ? -1 : 1, k & 4 ? -1 : 1, k & 8 ? -1 : 1};
    for (const Model& m : {table1_model(0.25 * u(rng), signs),
                           table2_model(0.5 * u(rng), Table2Branch::Same, signs),
                           one_sided_model(0.5 * u(rng), signs)}) {
      const Model f = flip_lift(m);
      c.expect(std::abs(chsh_value(f) - chsh_value(m)) <= 1e-12, "S changed by flip");
      c.expect(std::abs(mutual_information(f) - mutual_information(m)) <= 1e-12, "I changed by flip");
      const auto corr = correlations_of(f);
      c.expect(is_nonsignaling(corr, 1e-12), "flip lift signals");
      for (int x : {0, 1})
        for (int y : {0, 1}) {
          c.expect(std::abs(corr.marginal_a(1, x, y) - 0.5) <= 1e-12, "p(a|x) != 1/2");
          c.expect(std::abs(corr.marginal_b(1, x, y) - 0.5) <= 1e-12, "p(b|y) != 1/2");
        }
      ++n;
    }
  }
  c.summary << n << " models";
}

void retro_inherent(Check& c) {
  int n = 0;
  for (int k = 0; k < 250; ++k) {
    const double p = 0.25 * k / 250.0;
    c.expect(!is_factorized_per_lambda(table1_model(p)), "table1 factorized at p=" + fmt(p));
    ++n;
  }
  c.expect(is_factorized_per_lambda(table1_model(0.25)), "table1(1/4) not factorized");
  c.summary << n << " values of p in [0,1/4) non-factorized, p=1/4 factorized";
}

void biased(Check& c) {
  std::vector<double> grid;
  for (int k = 0; k < 9; ++k) grid.push_back(-0.8 + 0.2 * k);
  const std::vector<double> svals{2.0, 2.5, kSq, 3.3, 3.7, 3.9, 4.0};
  const BiasedFamily fams[] = {BiasedFamily::Retrocausal, BiasedFamily::Causal,
                               BiasedFamily::OneSided, BiasedFamily::Superdeterministic};
  const char* names[] = {"R'", "C'", "OS'", "SD'"};
  int checks = 0;
  for (int f = 0; f < 4; ++f) {
    for (double s : svals) {
      const double ref = unbiased_curve(fams[f], s);
      c.expect(std::abs(biased_info(fams[f], s, {0.0, 0.0}) - ref) <= 1e-12,
               std::string(names[f]) + " unbiased mismatch at S=" + fmt(s));
      for (double ex : grid)
        for (double ey : grid) {
          c.expect(biased_info(fams[f], s, {ex, ey}) <= ref + 1e-12,
                   std::string(names[f]) + " above curve");
          ++checks;
        }
      // Monotone decrease in |eps| along both axes, out to 0.999.
      for (int axis = 0; axis < 2; ++axis)
        for (double sign : {1.0, -1.0}) {
          auto at = [&](double e) {
            return biased_info(fams[f], s, axis == 0 ? Bias{sign * e, 0.0} : Bias{0.0, sign * e});
          };
          // Some costs do not depend on one party's bias (one-sided, or a
          // uniform conditional at the curve endpoints); those stay flat.
          const bool depends = at(0.5) < ref - 1e-15;
          double prev = ref;
          for (double e : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
            const double v = at(e);
            if (depends) c.expect(v < prev, std::string(names[f]) + " not decreasing in |eps|");
            else c.expect(std::abs(v - ref) <= 1e-15, std::string(names[f]) + " not flat");
            prev = v;
          }
        }
    }
  }
  for (double ex : {0.999, -0.999})
    for (double ey : {0.999, -0.999}) {
      const double v = biased_info(BiasedFamily::Superdeterministic, 3.0, {ex, ey});
      c.expect(v < 0.02, "SD' at |eps|=0.999 is " + fmt(v));
    }

  // Lemma: I(M') = I(M) + H_M'(L) - H_M(L) on every lifted model.
  double worst = 0.0;
  int lifted = 0;
  for (double s : {2.2, 2.6, kSq, 3.5, 3.7, 3.95}) {
    const auto cp = causal_params_for(s);
    const std::pair<LiftBase, LiftParams> bases[] = {{LiftBase::Retrocausal, {(4.0 - s) / 8.0}},
                                                     {LiftBase::Causal, {cp.p, cp.p_star}},
                                                     {LiftBase::OneSided, {(4.0 - s) / 4.0}}};
    for (const auto& [base, params] : bases) {
      const Model m = base_model(base, params);
      for (double ex : grid)
        for (double ey : grid) {
          const Model l = biased_lift(base, params, {ex, ey});
          const double d = std::abs(mutual_information(l) -
                                    (mutual_information(m) + lambda_entropy(l) - lambda_entropy(m)));
          worst = std::max(worst, d);
          ++lifted;
        }
    }
  }
  c.expect(worst <= 1e-9, "lemma residual " + fmt(worst));
  c.summary << checks << " grid checks, " << lifted << " lifted models, lemma residual "
            << fmt(worst, "%.1e") << ", SD'(0.999,0.999)="
            << fmt(biased_info(BiasedFamily::Superdeterministic, 3.0, {0.999, 0.999}));
}

void oracle(Check& c) {
  for (auto cls : {CausalClass::Retrocausal, CausalClass::Causal}) {
    SearchConfig cfg;
    cfg.resolution = 40;
    cfg.target_s = kSq;
    cfg.cls = cls;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = brute_force_min_info(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double analytic = curve_point(cls, kSq).info;
    const double gap = r.best_info - analytic;
    const double vs_achieved = r.best_info - curve_point(cls, r.achieved_s).info;
    const std::string name(to_string(cls));
    c.expect(gap <= 0.01, name + " gap " + fmt(gap));
    c.expect(gap >= -1e-9, name + " below curve at target: " + fmt(gap));
    c.expect(vs_achieved >= -1e-9, name + " below curve at achieved S: " + fmt(vs_achieved));
    c.expect(r.achieved_s >= kSq - 1e-9, name + " infeasible witness");
    c.summary << name << " gap=" << fmt(gap, "%.5f") << " (S=" << fmt(r.achieved_s, "%.4f") << ", "
              << fmt(secs, "%.1f") << "s) ";
  }
}

void simulation(Check& c) {
  const Model m = table2_model(std::sqrt((4.0 - kSq) / 8.0), Table2Branch::Same);
  int within = 0;
  bool all_predicted = true;
  std::vector<double> infos;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto st = empirical_stats(sample_rounds(m, 1000000, seed, SamplingOrder::SourceFirst, 0));
    if (std::abs(st.s_hat - kSq) <= 5.0 * st.s_stderr) ++within;
    all_predicted = all_predicted && st.prediction_accuracy == 1.0;
    infos.push_back(st.info_hat);
  }
  std::sort(infos.begin(), infos.end());
  const double med = 0.5 * (infos[4] + infos[5]);
  c.expect(within >= 9, "S within 5 s.e. in only " + std::to_string(within) + "/10 seeds");
  c.expect(all_predicted, "adversary missed an outcome");
  c.near(med, 0.080, 0.01, "median info_hat");
  c.summary << within << "/10 seeds within 5 s.e., median info_hat=" << fmt(med)
            << ", prediction accuracy " << (all_predicted ? "1.0" : "< 1");
}

void singlet(Check& c) {
  const Model m = table1_model((1.0 - 1.0 / std::sqrt(2.0)) / 2.0);
  c.near(chsh_value(m), kSq, 1e-12, "S");
  c.near(mutual_information(m), i_R(kSq), 1e-9, "I");
  c.summary << "S=" << fmt(chsh_value(m), "%.15f") << " I=" << fmt(mutual_information(m), "%.12f");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "headline constants", headline},
      {2, "root-solver constants", roots},
      {3, "tangency and convexity", appendix},
      {4, "curve ordering", ordering},
      {5, "model-curve agreement", model_curve},
      {6, "flip lift", flip},
      {7, "retrocausal inherence", retro_inherent},
      {8, "biased settings", biased},
      {9, "brute-force oracle N=40", oracle},
      {10, "simulation", simulation},
      {11, "singlet restriction", singlet},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("[%s] %2d %-24s %s\n", ok ? "PASS" : "FAIL", cr.id, cr.name, c.summary.str().c_str());
    const std::size_t shown = std::min<std::size_t>(c.failures.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) std::printf("       - %s\n", c.failures[i].c_str());
    if (c.failures.size() > shown) std::printf("       - ... %zu more\n", c.failures.size() - shown);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
