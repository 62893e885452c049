#pragma once

// Monte-Carlo sampling of experiment rounds from a model, plug-in estimators,
// and the predicting adversary that holds the response table.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string_view>
#include <thread>
#include <vector>

#include "bellcost/errors.hpp"
#include "bellcost/evaluate.hpp"
#include "bellcost/model.hpp"
#include "bellcost/parallel.hpp"

namespace bellcost {

/// Counter-based SplitMix64: draw k of a stream is a pure function of
/// (seed, k), so any sharding of the rounds reproduces the same stream.
class CounterRng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64-counter/1";

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

enum class SamplingOrder { SourceFirst, SettingsFirst };

inline std::string_view to_string(SamplingOrder o) {
  return o == SamplingOrder::SourceFirst ? "source-first" : "settings-first";
}

struct RoundRecord {
  std::uint32_t lambda_index = 0;
  std::uint8_t x = 0, y = 0;
  std::int8_t a = 1, b = 1;
  std::int8_t predicted_a = 1, predicted_b = 1;
};

/// Knows the hidden state and every response function, hence every outcome.
class Adversary {
 public:
  explicit Adversary(const Model& m) {
    for (const auto& s : m.states()) table_.push_back(s.responses);
  }
  std::pair<int, int> predict(std::uint32_t lambda, int x, int y) const {
    return {table_[lambda].A(x), table_[lambda].B(y)};
  }

 private:
  std::vector<Responses> table_;
};

namespace detail {

/// Index of the first cumulative weight exceeding u; skips zero weights.
template <typename Weights>
std::size_t sample_index(const Weights& w, std::size_t n, double u) {
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] <= 0.0) continue;
    cum += w[i];
    last = i;
    if (u < cum) return i;
  }
  return last;
}

}  // namespace detail

/// Draws n rounds. SourceFirst: l ~ p(l), then x ~ p(x|l), y ~ p(y|l)
/// independently (needs per-state factorization). SettingsFirst:
/// (x,y) ~ p(x,y), then l ~ p(l|x,y). Both realize the same joint law.
inline std::vector<RoundRecord> sample_rounds(const Model& m, std::size_t n, std::uint64_t seed,
                                              SamplingOrder order, unsigned threads = 1) {
  if (n == 0) throw DomainError("sample_rounds: n must be positive");
  if (order == SamplingOrder::SourceFirst && !is_factorized_per_lambda(m, 1e-12)) {
    throw OrderUnavailable("source-first sampling needs p(x,y|l) = p(x|l) p(y|l) for every l");
  }
  const CounterRng rng(seed);
  const Adversary adversary(m);
  const std::size_t L = m.size();
  std::vector<double> weights(L);
  for (std::size_t l = 0; l < L; ++l) weights[l] = m[l].weight;
  const SettingDist marg = derived_marginal(m);
  std::vector<std::vector<double>> post(4, std::vector<double>(L, 0.0));
  if (order == SamplingOrder::SettingsFirst) {
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t i = 0; i < 4; ++i)
        post[i][l] = marg[i] > 0.0 ? m[l].weight * m[l].settings[i] / marg[i] : 0.0;
  }

  std::vector<RoundRecord> rounds(n);
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const std::uint64_t c = 3 * static_cast<std::uint64_t>(r);
      RoundRecord rec;
      std::size_t lam = 0;
      int x = 0, y = 0;
      if (order == SamplingOrder::SourceFirst) {
        lam = detail::sample_index(weights, L, rng.uniform(c));
        const auto& d = m[lam].settings;
        x = rng.uniform(c + 1) < d.marginal_x(0) ? 0 : 1;
        y = rng.uniform(c + 2) < d.marginal_y(0) ? 0 : 1;
      } else {
        const std::size_t xy = detail::sample_index(marg.probs(), 4, rng.uniform(c));
        x = setting_x(xy);
        y = setting_y(xy);
        lam = detail::sample_index(post[xy], L, rng.uniform(c + 1));
      }
      rec.lambda_index = static_cast<std::uint32_t>(lam);
      rec.x = static_cast<std::uint8_t>(x);
      rec.y = static_cast<std::uint8_t>(y);
      rec.a = static_cast<std::int8_t>(m[lam].responses.A(x));
      rec.b = static_cast<std::int8_t>(m[lam].responses.B(y));
      const auto [pa, pb] = adversary.predict(rec.lambda_index, x, y);
      rec.predicted_a = static_cast<std::int8_t>(pa);
      rec.predicted_b = static_cast<std::int8_t>(pb);
      rounds[r] = rec;
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(threads), n));
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 1; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    pool.emplace_back(fill, begin, std::min(n, begin + chunk));
  }
  fill(0, std::min(n, chunk));
  for (auto& t : pool) t.join();
  return rounds;
}

struct EmpiricalStats {
  double s_hat = 0.0;
  double s_stderr = 0.0;  // sqrt(sum_xy (1 - E_xy^2) / n_xy)
  double info_hat = 0.0;  // plug-in I(X,Y:L), bits
  double prediction_accuracy = 0.0;
  std::size_t rounds = 0;
  std::array<std::size_t, 4> setting_counts{};
};

inline EmpiricalStats empirical_stats(const std::vector<RoundRecord>& rounds) {
  if (rounds.empty()) throw DomainError("empirical_stats: no rounds");
  std::uint32_t n_lambda = 0;
  for (const auto& r : rounds) n_lambda = std::max(n_lambda, r.lambda_index + 1);

  EmpiricalStats st;
  st.rounds = rounds.size();
  std::array<double, 4> prod_sum{};
  std::vector<std::array<std::size_t, 4>> joint(n_lambda, std::array<std::size_t, 4>{});
  std::size_t correct = 0;
  for (const auto& r : rounds) {
    const std::size_t i = setting_index(r.x, r.y);
    ++st.setting_counts[i];
    prod_sum[i] += r.a * r.b;
    ++joint[r.lambda_index][i];
    if (r.predicted_a == r.a && r.predicted_b == r.b) ++correct;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (st.setting_counts[i] == 0) {
      throw MissingSetting("setting (x=" + std::to_string(setting_x(i)) + ",y=" +
                           std::to_string(setting_y(i)) + ") never occurs");
    }
  }
  const auto n = static_cast<double>(rounds.size());
  double var = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto ni = static_cast<double>(st.setting_counts[i]);
    const double e = prod_sum[i] / ni;
    st.s_hat += ((setting_x(i) & setting_y(i)) ? -1.0 : 1.0) * e;
    var += (1.0 - e * e) / ni;
  }
  st.s_stderr = std::sqrt(var);

  double info = 0.0;
  for (const auto& row : joint) {
    std::size_t nl = 0;
    for (auto c : row) nl += c;
    for (std::size_t i = 0; i < 4; ++i) {
      if (row[i] == 0) continue;
      const auto c = static_cast<double>(row[i]);
      info += c / n * std::log2(c * n / (static_cast<double>(nl) * st.setting_counts[i]));
    }
  }
  st.info_hat = std::max(0.0, info);
  st.prediction_accuracy = static_cast<double>(correct) / n;
  return st;
}

/// CSV header: round,lambda,x,y,a,b,pred_a,pred_b
inline void write_rounds_csv(std::ostream& os, const std::vector<RoundRecord>& rounds) {
  os << "round,lambda,x,y,a,b,pred_a,pred_b\n";
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& r = rounds[k];
    os << k << ',' << r.lambda_index << ',' << int(r.x) << ',' << int(r.y) << ',' << int(r.a)
       << ',' << int(r.b) << ',' << int(r.predicted_a) << ',' << int(r.predicted_b) << '\n';
  }
}

}  // namespace bellcost
