#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "bellcost.hpp"

using namespace bellcost;

namespace {

const double kSq = 2.0 * std::sqrt(2.0);

Model causal_at_tsirelson() {
  const double p = std::sqrt((4.0 - kSq) / 8.0);
  return table2_model(p, Table2Branch::Same);
}

std::vector<std::size_t> histogram(const std::vector<RoundRecord>& rounds, std::size_t n_lambda) {
  std::vector<std::size_t> h(n_lambda * 4, 0);
  for (const auto& r : rounds) ++h[r.lambda_index * 4 + setting_index(r.x, r.y)];
  return h;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(CounterRng, PureFunctionOfCounter) {
  const CounterRng a(17), b(17), c(18);
  EXPECT_EQ(a.bits(5), b.bits(5));
  EXPECT_NE(a.bits(5), c.bits(5));
  EXPECT_NE(a.bits(5), a.bits(6));
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const double u = a.uniform(k);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Sampling, UniformSettingFrequencies) {
  for (auto order : {SamplingOrder::SourceFirst, SamplingOrder::SettingsFirst}) {
    const auto rounds = sample_rounds(table1_model(0.25), 1000, 3, order);
    const auto st = empirical_stats(rounds);
    for (auto c : st.setting_counts) EXPECT_NEAR(c / 1000.0, 0.25, 0.07);
  }
}

TEST(Sampling, SourceFirstNeedsFactorization) {
  EXPECT_THROW(sample_rounds(table1_model(0.1), 10, 1, SamplingOrder::SourceFirst),
               OrderUnavailable);
  EXPECT_NO_THROW(sample_rounds(table1_model(0.1), 10, 1, SamplingOrder::SettingsFirst));
  EXPECT_THROW(sample_rounds(table1_model(0.1), 0, 1, SamplingOrder::SettingsFirst), DomainError);
}

TEST(Sampling, DeterministicAndShardInvariant) {
  const Model m = flip_lift(causal_at_tsirelson());
  for (auto order : {SamplingOrder::SourceFirst, SamplingOrder::SettingsFirst}) {
    const auto a = sample_rounds(m, 20000, 99, order, 1);
    const auto b = sample_rounds(m, 20000, 99, order, 1);
    const auto c = sample_rounds(m, 20000, 99, order, 7);
    std::ostringstream sa, sb, sc;
    write_rounds_csv(sa, a);
    write_rounds_csv(sb, b);
    write_rounds_csv(sc, c);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(sa.str(), sc.str());
    const auto d = sample_rounds(m, 20000, 100, order, 1);
    std::ostringstream sd;
    write_rounds_csv(sd, d);
    EXPECT_NE(sa.str(), sd.str());
  }
}

TEST(Sampling, CsvLayout) {
  const auto rounds = sample_rounds(table1_model(0.1), 3, 5, SamplingOrder::SettingsFirst);
  std::ostringstream os;
  write_rounds_csv(os, rounds);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "round,lambda,x,y,a,b,pred_a,pred_b");
  int n = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
    ++n;
  }
  EXPECT_EQ(n, 3);
}

TEST(Sampling, AdversaryPredictsEveryOutcome) {
  for (const Model& m : {table1_model(0.1), flip_lift(causal_at_tsirelson()),
                         superdeterministic_model(correlations_of(table1_model(0.0)),
                                                  SettingDist::from_bias(0.3, -0.2))}) {
    const auto st = empirical_stats(sample_rounds(m, 50000, 11, SamplingOrder::SettingsFirst));
    EXPECT_EQ(st.prediction_accuracy, 1.0);
  }
}

TEST(Stats, MissingSetting) {
  std::vector<RoundRecord> rounds(10);
  for (auto& r : rounds) r.x = 0, r.y = 1;
  EXPECT_THROW(empirical_stats(rounds), MissingSetting);
  EXPECT_THROW(empirical_stats({}), DomainError);
}

TEST(Stats, PlugInOnKnownCounts) {
  // Each lambda tied to one setting: I = H(X,Y) = 2 bits, all outcomes +1.
  std::vector<RoundRecord> rounds;
  for (std::uint32_t l = 0; l < 4; ++l)
    for (int k = 0; k < 5; ++k) {
      RoundRecord r;
      r.lambda_index = l;
      r.x = static_cast<std::uint8_t>(setting_x(l));
      r.y = static_cast<std::uint8_t>(setting_y(l));
      rounds.push_back(r);
    }
  const auto st = empirical_stats(rounds);
  EXPECT_NEAR(st.info_hat, 2.0, 1e-12);
  EXPECT_NEAR(st.s_hat, 2.0, 1e-12);
  EXPECT_NEAR(st.s_stderr, 0.0, 1e-12);
}

TEST(Sampling, OrdersAgreeChiSquare) {
  for (const Model& m : {causal_at_tsirelson(), flip_lift(one_sided_model(0.3)),
                         biased_lift(LiftBase::Causal, {0.2, 0.35}, {0.4, -0.3})}) {
    const std::size_t n = 100000;
    const auto h1 = histogram(sample_rounds(m, n, 2024, SamplingOrder::SourceFirst), m.size());
    const auto h2 = histogram(sample_rounds(m, n, 4048, SamplingOrder::SettingsFirst), m.size());
    double stat = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < h1.size(); ++i) {
      const double a = static_cast<double>(h1[i]), b = static_cast<double>(h2[i]);
      if (a + b == 0.0) continue;
      stat += (a - b) * (a - b) / (a + b);
      ++cells;
    }
    ASSERT_GT(cells, 1);
    const boost::math::chi_squared dist(cells - 1);
    const double p_value = 1.0 - boost::math::cdf(dist, stat);
    EXPECT_GT(p_value, 0.001) << m.label() << " stat=" << stat << " df=" << cells - 1;
  }
}

TEST(Sampling, PlugInInformationConverges) {
  const Model m = causal_at_tsirelson();
  const double exact = mutual_information(m);
  double prev = 1e9;
  for (std::size_t n : {1000u, 10000u, 100000u, 1000000u}) {
    std::vector<double> err;
    for (std::uint64_t seed = 1; seed <= 9; ++seed) {
      const auto st = empirical_stats(sample_rounds(m, n, seed, SamplingOrder::SourceFirst));
      err.push_back(std::abs(st.info_hat - exact));
    }
    const double med = median(err);
    EXPECT_LT(med, prev) << "n=" << n;
    prev = med;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Sampling, ChshEstimateAtTsirelson) {
  const auto st = empirical_stats(
      sample_rounds(causal_at_tsirelson(), 1000000, 7, SamplingOrder::SourceFirst));
  EXPECT_LT(std::abs(st.s_hat - kSq), 5.0 * st.s_stderr);
  EXPECT_NEAR(st.info_hat, 0.080, 0.01);
  EXPECT_EQ(st.prediction_accuracy, 1.0);
}
