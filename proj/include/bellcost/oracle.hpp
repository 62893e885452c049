#pragma once

// Brute-force check of the minimal-information curves: exhaustive search over
// four equal-weight states (one per response class l_mu,nu) whose setting
// distributions lie on a probability grid, subject to an exactly uniform
// derived marginal and a CHSH value at or above the target.
//
// With uniform settings and optimal outcome signs, S = sum_l |1 - 2 d_l(pen_l)|
// and I = 2 - (1/4) sum_l H(d_l), where pen_l = (x = 1-nu, y = 1-mu). Both are
// additive over states, so the search splits the states into the pairs
// (l00, l10) and (l01, l11): the first pair is tabulated by (summed counts,
// summed S contribution) and the second pair is matched against that table.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "bellcost/curves.hpp"
#include "bellcost/entropy.hpp"
#include "bellcost/errors.hpp"
#include "bellcost/evaluate.hpp"
#include "bellcost/model.hpp"
#include "bellcost/models.hpp"
#include "bellcost/parallel.hpp"

namespace bellcost {

struct SearchConfig {
  int resolution = 40;  // probability grid step 1/N
  double target_s = 2.0;
  CausalClass cls = CausalClass::Retrocausal;
  double tolerance = 1e-9;  // slack on the S feasibility test
  unsigned threads = 0;     // 0: all available workers
};

struct BruteForceResult {
  double best_info = 0.0;
  double achieved_s = 0.0;
  Model best_model;
  std::array<std::uint32_t, 4> grid_key{};  // option ranks of l00, l10, l01, l11
};

namespace detail::grid {

using Counts = std::array<std::int64_t, 4>;

struct Option {
  Counts counts{};  // setting probabilities in units of 1/scale
  double entropy = 0.0;
};

struct OptionSet {
  std::int64_t scale = 0;
  std::vector<Option> options;  // lexicographic in the grid coordinates
};

inline OptionSet make_options(CausalClass cls, int n) {
  OptionSet set;
  auto h = [n](int i) { return binary_entropy(static_cast<double>(i) / n); };
  switch (cls) {
    case CausalClass::Retrocausal: {
      set.scale = n;
      for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b)
          for (int c = 0; a + b + c <= n; ++c) {
            const Counts k{a, b, c, n - a - b - c};
            std::array<double, 4> d{};
            for (std::size_t i = 0; i < 4; ++i) d[i] = static_cast<double>(k[i]) / n;
            set.options.push_back({k, shannon_entropy(d)});
          }
      break;
    }
    case CausalClass::Causal:
    case CausalClass::Zigzag: {
      set.scale = static_cast<std::int64_t>(n) * n;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
          const std::array<std::int64_t, 2> px{i, n - i};
          const std::array<std::int64_t, 2> py{j, n - j};
          Counts k{};
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) k[setting_index(x, y)] = px[x] * py[y];
          set.options.push_back({k, h(i) + h(j)});
        }
      break;
    }
    case CausalClass::OneSided: {
      set.scale = 2 * static_cast<std::int64_t>(n);
      for (int i = 0; i <= n; ++i) {
        const std::array<std::int64_t, 2> px{i, n - i};
        Counts k{};
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) k[setting_index(x, y)] = px[x];
        set.options.push_back({k, h(i) + 1.0});
      }
      break;
    }
    case CausalClass::Superdeterministic:
      throw DomainError("brute_force_min_info: superdeterministic class is not searched");
  }
  return set;
}

inline std::size_t pen_index(std::size_t state) {
  const auto [mu, nu] = kMuNuOrder[state];
  return setting_index(1 - nu, 1 - mu);
}

/// Contribution |scale - 2 d(pen)| of one state to scale * S.
inline std::int64_t s_units(const OptionSet& set, std::size_t state, const Option& o) {
  const std::int64_t c = o.counts[pen_index(state)];
  return std::abs(set.scale - 2 * c);
}

struct Cell {
  double entropy = -std::numeric_limits<double>::infinity();
  std::uint32_t ia = 0, ib = 0;

  bool empty() const { return !(entropy > -std::numeric_limits<double>::infinity()); }
  bool better_than(const Cell& o) const {
    if (entropy != o.entropy) return entropy > o.entropy;
    return std::tie(ia, ib) < std::tie(o.ia, o.ib);
  }
};

/// Best first-pair entropy for every (summed counts, S units >= t).
class PairTable {
 public:
  PairTable(const OptionSet& set, bool dense) : set_(set), dense_(dense), twice_(2 * set.scale) {
    if (dense_) init_dense();
    const auto& opts = set_.options;
    for (std::uint32_t ia = 0; ia < opts.size(); ++ia) {
      const std::int64_t ta = s_units(set_, 0, opts[ia]);
      for (std::uint32_t ib = 0; ib < opts.size(); ++ib) {
        const std::int64_t tb = s_units(set_, 1, opts[ib]);
        Counts v;
        for (std::size_t i = 0; i < 4; ++i) v[i] = opts[ia].counts[i] + opts[ib].counts[i];
        const Cell cand{opts[ia].entropy + opts[ib].entropy, ia, ib};
        if (dense_) {
          Cell& c = cells_[dense_slot(v, ta + tb)];
          if (cand.better_than(c)) c = cand;
        } else {
          records_.push_back({encode(v), ta + tb, cand});
        }
      }
    }
    dense_ ? finish_dense() : finish_sparse();
  }

  /// Best entry with summed counts v and S units >= need, or nullptr.
  const Cell* query(const Counts& v, std::int64_t need) const {
    need = std::max<std::int64_t>(need, 0);
    if (need > twice_) return nullptr;
    if (dense_) {
      const Cell& c = cells_[dense_slot(v, need + (need & 1))];
      return c.empty() ? nullptr : &c;
    }
    const std::uint64_t key = encode(v);
    auto lo = std::lower_bound(records_.begin(), records_.end(), key,
                               [](const Record& r, std::uint64_t k) { return r.key < k; });
    auto hi = std::upper_bound(lo, records_.end(), key,
                               [](std::uint64_t k, const Record& r) { return k < r.key; });
    // Within a key, records are sorted by decreasing t; take the last with t >= need.
    auto it = std::partition_point(lo, hi, [need](const Record& r) { return r.t >= need; });
    if (it == lo) return nullptr;
    return &std::prev(it)->best;
  }

 private:
  struct Record {
    std::uint64_t key;
    std::int64_t t;
    Cell best;
  };

  std::uint64_t encode(const Counts& v) const {
    const auto base = static_cast<std::uint64_t>(twice_ + 1);
    return (static_cast<std::uint64_t>(v[0]) * base + static_cast<std::uint64_t>(v[1])) * base +
           static_cast<std::uint64_t>(v[2]);
  }

  // Dense layout: compositions (a,b,c,d) of 2*scale ranked as row[a][b] + c,
  // times the even S-unit totals 0, 2, ..., 2*scale.
  void init_dense() {
    const auto m = static_cast<std::size_t>(twice_ + 1);
    row_.assign(m * m, 0);
    std::size_t rank = 0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; a + b < m; ++b) {
        row_[a * m + b] = rank;
        rank += m - a - b;
      }
    t_slots_ = static_cast<std::size_t>(set_.scale) + 1;
    cells_.assign(rank * t_slots_, Cell{});
  }

  std::size_t dense_slot(const Counts& v, std::int64_t t) const {
    const auto m = static_cast<std::size_t>(twice_ + 1);
    const std::size_t rank = row_[static_cast<std::size_t>(v[0]) * m + static_cast<std::size_t>(v[1])] +
                             static_cast<std::size_t>(v[2]);
    return rank * t_slots_ + static_cast<std::size_t>(t / 2);
  }

  void finish_dense() {
    for (std::size_t base = 0; base < cells_.size(); base += t_slots_) {
      for (std::size_t k = t_slots_ - 1; k-- > 0;) {
        if (cells_[base + k + 1].better_than(cells_[base + k])) cells_[base + k] = cells_[base + k + 1];
      }
    }
  }

  void finish_sparse() {
    std::sort(records_.begin(), records_.end(), [](const Record& x, const Record& y) {
      if (x.key != y.key) return x.key < y.key;
      if (x.t != y.t) return x.t > y.t;
      return x.best.better_than(y.best);
    });
    for (std::size_t k = 1; k < records_.size(); ++k) {
      if (records_[k].key == records_[k - 1].key && records_[k - 1].best.better_than(records_[k].best)) {
        records_[k].best = records_[k - 1].best;
      }
    }
  }

  const OptionSet& set_;
  bool dense_;
  std::int64_t twice_;
  std::vector<std::size_t> row_;
  std::size_t t_slots_ = 0;
  std::vector<Cell> cells_;
  std::vector<Record> records_;
};

struct Candidate {
  double info = std::numeric_limits<double>::infinity();
  std::array<std::uint32_t, 4> key{};
  bool found = false;

  bool better_than(const Candidate& o) const {
    if (!found) return false;
    if (!o.found) return true;
    if (info != o.info) return info < o.info;
    return key < o.key;
  }
};

inline Model witness_model(const OptionSet& set, const std::array<std::uint32_t, 4>& key,
                           const std::string& label) {
  std::vector<HiddenState> states;
  for (std::size_t l = 0; l < 4; ++l) {
    const auto& o = set.options[key[l]];
    std::array<double, 4> d{};
    for (std::size_t i = 0; i < 4; ++i) d[i] = static_cast<double>(o.counts[i]) / set.scale;
    const auto [mu, nu] = kMuNuOrder[l];
    Responses r = optimal_responses(mu, nu, 1);
    // A penalized weight above 1/2 favours the opposite product sign.
    if (2 * o.counts[pen_index(l)] > set.scale) r.b = {r.b[0].flipped(), r.b[1].flipped()};
    states.push_back({0.25, SettingDist::joint(d), r});
  }
  return Model(std::move(states), label);
}

}  // namespace detail::grid

inline BruteForceResult brute_force_min_info(const SearchConfig& cfg) {
  using namespace detail::grid;
  if (cfg.resolution < 4) throw DomainError("brute_force_min_info: resolution must be >= 4");
  if (!(cfg.tolerance > 0.0)) throw DomainError("brute_force_min_info: tolerance must be > 0");
  if (!(cfg.target_s <= 4.0 + 1e-12)) throw DomainError("brute_force_min_info: target above 4");

  const OptionSet set = make_options(cfg.cls, cfg.resolution);
  const std::int64_t scale = set.scale;
  const auto need_total = static_cast<std::int64_t>(
      std::ceil((cfg.target_s - cfg.tolerance) * static_cast<double>(scale) - 1e-9));
  const PairTable table(set, cfg.cls == CausalClass::Retrocausal);

  const auto& opts = set.options;
  const auto n_opts = static_cast<std::uint32_t>(opts.size());
  const unsigned workers = std::min<unsigned>(worker_count(cfg.threads), n_opts);
  std::vector<Candidate> local(workers);
  auto scan = [&](unsigned w) {
    Candidate best;
    for (std::uint32_t ic = w; ic < n_opts; ic += workers) {
      const std::int64_t tc = s_units(set, 2, opts[ic]);
      for (std::uint32_t id = 0; id < n_opts; ++id) {
        Counts rest;
        bool ok = true;
        for (std::size_t i = 0; i < 4; ++i) {
          rest[i] = scale - opts[ic].counts[i] - opts[id].counts[i];
          ok = ok && rest[i] >= 0;
        }
        if (!ok) continue;
        const std::int64_t t_cd = tc + s_units(set, 3, opts[id]);
        const Cell* cell = table.query(rest, need_total - t_cd);
        if (cell == nullptr) continue;
        Candidate cand;
        cand.found = true;
        cand.info = 2.0 - (cell->entropy + (opts[ic].entropy + opts[id].entropy)) / 4.0;
        cand.key = {cell->ia, cell->ib, ic, id};
        if (cand.better_than(best)) best = cand;
      }
    }
    local[w] = best;
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(scan, w);
  scan(0);
  for (auto& t : pool) t.join();

  Candidate best;
  for (const auto& c : local)
    if (c.better_than(best)) best = c;
  if (!best.found) {
    throw NoFeasibleModel("no grid model with N = " + std::to_string(cfg.resolution) +
                          " reaches S >= " + std::to_string(cfg.target_s));
  }
  Model witness = witness_model(set, best.key,
                                std::string("grid-") + std::string(to_string(cfg.cls)) + " N=" +
                                    std::to_string(cfg.resolution));
  BruteForceResult out{mutual_information(witness), chsh_value(witness), std::move(witness),
                       best.key};
  return out;
}

/// Bound-chain diagnostics for one model. The bounds assume uniform settings;
/// `applicable` is false otherwise and the bound flags are then informational.
struct BoundChainReport {
  struct StateClass {
    int mu = 0, nu = 0;
    double penalized = 0.0;  // p(x = 1-nu, y = 1-mu | l)
  };
  std::vector<StateClass> classes;
  bool applicable = false;   // derived marginal is uniform
  bool factorized = false;   // causal condition holds per state
  double s = 0.0;
  double tight_bound = 0.0;  // 4 sum_l p(l) |1 - 2 p(pen|l)|
  double pmin_bound = 0.0;   // 4 - 8 p_min
  double causal_bound = 0.0; // sum_l p(l) (4 - 8 pX_min pY_min), factorized only
  bool saturates_tight = false;
  bool saturates_pmin = false;
  bool saturates_causal = false;
  bool bounds_hold = false;
};

inline BoundChainReport verify_bound_chain(const Model& m, double tol = 1e-9) {
  BoundChainReport r;
  r.applicable = derived_marginal(m).approx_equal(SettingDist::uniform(), kNormTol);
  r.factorized = is_factorized_per_lambda(m);
  r.s = chsh_value(m);
  double pmin = 1.0;
  for (const auto& st : m.states()) {
    const auto [mu, nu] = st.responses.class_mu_nu();
    const double pen = st.settings(1 - nu, 1 - mu);
    r.classes.push_back({mu, nu, pen});
    r.tight_bound += 4.0 * st.weight * std::abs(1.0 - 2.0 * pen);
    for (double p : st.settings.probs()) pmin = std::min(pmin, p);
    const double px = std::min(st.settings.marginal_x(0), st.settings.marginal_x(1));
    const double py = std::min(st.settings.marginal_y(0), st.settings.marginal_y(1));
    r.causal_bound += st.weight * (4.0 - 8.0 * px * py);
  }
  r.pmin_bound = 4.0 - 8.0 * pmin;
  r.saturates_tight = std::abs(r.s - r.tight_bound) <= tol;
  r.saturates_pmin = std::abs(r.s - r.pmin_bound) <= tol;
  r.saturates_causal = r.factorized && std::abs(r.s - r.causal_bound) <= tol;
  r.bounds_hold = r.s <= r.tight_bound + tol && r.s <= r.pmin_bound + tol &&
                  (!r.factorized || r.s <= r.causal_bound + tol);
  return r;
}

}  // namespace bellcost
