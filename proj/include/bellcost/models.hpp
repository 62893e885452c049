#pragma once

// Explicit optimal models for each causal class, the outcome-flip lift, and
// the biased-settings lifts with their closed-form information costs.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bellcost/curves.hpp"
#include "bellcost/entropy.hpp"
#include "bellcost/errors.hpp"
#include "bellcost/evaluate.hpp"
#include "bellcost/model.hpp"

namespace bellcost {

/// Free outcome signs s, t, u, v of the four optimal states.
struct OutcomeSigns {
  int s = 1, t = 1, u = 1, v = 1;

  int of(int mu, int nu) const {
    const int sign = mu == 0 ? (nu == 0 ? s : u) : (nu == 0 ? t : v);
    if (sign != 1 && sign != -1) throw DomainError("OutcomeSigns entries must be +-1");
    return sign;
  }
};

/// The four optimal states are listed in the order l00, l10, l01, l11.
inline constexpr std::array<std::array<int, 2>, 4> kMuNuOrder{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

/// Responses with A_x B_y = (-1)^(mu x + nu y + mu nu).
inline Responses optimal_responses(int mu, int nu, int sign) {
  const int a0 = sign;
  const int a1 = mu ? -a0 : a0;
  const int b0 = (mu & nu) ? -sign : sign;
  const int b1 = nu ? -b0 : b0;
  return Responses::of(a0, a1, b0, b1);
}

namespace detail {

inline void check_range(const char* op, const char* name, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    throw DomainError(std::string(op) + ": " + name + " = " + std::to_string(v) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace detail

/// Minimal-information model without causal constraint, S = 4 - 8p.
inline Model table1_model(double p, OutcomeSigns signs = {}) {
  detail::check_range("table1_model", "p", p, 0.0, 0.25);
  std::vector<HiddenState> states;
  for (const auto& [mu, nu] : kMuNuOrder) {
    std::array<double, 4> d;
    d.fill((1.0 - p) / 3.0);
    d[setting_index(1 - nu, 1 - mu)] = p;
    states.push_back({0.25, SettingDist::joint(d), optimal_responses(mu, nu, signs.of(mu, nu))});
  }
  return Model(std::move(states), "table1 p=" + format_sig12(p));
}

/// Optimal causal structure with independent parameters: p(x=0|l_mu,nu) is 1-p for
/// nu = 0 and p otherwise; p(y=0|l_mu,nu) is 1-p_tilde for mu = 0 and
/// p_tilde otherwise. S = 4 - 8 p p_tilde.
inline Model causal_table_model(double p, double p_tilde, OutcomeSigns signs = {}) {
  detail::check_range("causal_table_model", "p", p, 0.0, 0.5);
  detail::check_range("causal_table_model", "p_tilde", p_tilde, 0.0, 0.5);
  std::vector<HiddenState> states;
  for (const auto& [mu, nu] : kMuNuOrder) {
    const double px0 = nu == 0 ? 1.0 - p : p;
    const double py0 = mu == 0 ? 1.0 - p_tilde : p_tilde;
    states.push_back({0.25, SettingDist::factorized(px0, py0),
                      optimal_responses(mu, nu, signs.of(mu, nu))});
  }
  return Model(std::move(states),
               "causal p=" + format_sig12(p) + " ptilde=" + format_sig12(p_tilde));
}

enum class Table2Branch { Same, Conjugate };

/// Minimal-information causal model; Conjugate pairs p with p* (needs p <= p0).
inline Model table2_model(double p, Table2Branch branch, OutcomeSigns signs = {}) {
  detail::check_range("table2_model", "p", p, 0.0, 0.5);
  if (branch == Table2Branch::Same) return causal_table_model(p, p, signs);
  return causal_table_model(p, conjugate(p).p_star, signs);
}

/// One-sided dependence: the causal table model with p_tilde = 1/2, S = 4 - 4p.
inline Model one_sided_model(double p, OutcomeSigns signs = {}) {
  detail::check_range("one_sided_model", "p", p, 0.0, 0.5);
  return causal_table_model(p, 0.5, signs).relabeled("onesided p=" + format_sig12(p));
}

/// Causal model with S = 4 and weights {q^2, q(1-q), q(1-q), (1-q)^2}, so
/// p(x=0) = p(y=0) = q and I = H(X,Y) = 2h(q).
inline Model extreme_bias_example(double q, OutcomeSigns signs = {}) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("extreme_bias_example: q must lie in (0,1)");
  const std::array<double, 4> w{q * q, q * (1.0 - q), q * (1.0 - q), (1.0 - q) * (1.0 - q)};
  std::vector<HiddenState> states;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto [mu, nu] = kMuNuOrder[i];
    states.push_back({w[i], SettingDist::factorized(nu == 0 ? 1.0 : 0.0, mu == 0 ? 1.0 : 0.0),
                      optimal_responses(mu, nu, signs.of(mu, nu))});
  }
  return Model(std::move(states), "extreme-bias q=" + format_sig12(q));
}

/// Superdeterministic model reproducing any correlations under any positive
/// setting distribution: one state per (alpha, beta, xi, zeta) carrying a
/// point mass on (xi, zeta). Responses at unrealized settings copy (alpha, beta).
inline Model superdeterministic_model(const Correlations& c, const SettingDist& settings) {
  std::vector<HiddenState> states;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(settings[i] > 0.0)) throw DomainError("superdeterministic_model: zero setting probability");
    std::array<double, 4> point{};
    point[i] = 1.0;
    const auto dist = SettingDist::joint(point);
    for (std::size_t o = 0; o < 4; ++o) {
      const double w = c.table()[i][o] * settings[i];
      if (w <= 0.0) continue;
      const int a = Correlations::outcome_a(o);
      const int b = Correlations::outcome_b(o);
      states.push_back({w, dist, Responses::of(a, a, b, b)});
    }
  }
  return Model(std::move(states), "superdet");
}

/// Equal mixture of the model and its outcome-flipped copy.
inline Model flip_lift(const Model& m) {
  std::vector<HiddenState> states;
  states.reserve(2 * m.size());
  for (const auto& s : m.states()) {
    states.push_back({s.weight / 2.0, s.settings, s.responses});
    states.push_back({s.weight / 2.0, s.settings, s.responses.flipped()});
  }
  return Model(std::move(states), m.label().empty() ? "flip" : m.label() + " +flip");
}

/// Keeps p(l|x,y) and the responses of `base` but imposes the setting
/// distribution `target`; p(l) and p(x,y|l) follow from Bayes' rule.
inline Model reweight_settings(const Model& base, const SettingDist& target) {
  const auto post = posterior(base);
  std::vector<HiddenState> states;
  states.reserve(base.size());
  for (std::size_t l = 0; l < base.size(); ++l) {
    double w = 0.0;
    for (std::size_t i = 0; i < 4; ++i) w += target[i] * post[l][i];
    if (w <= 0.0) {
      states.push_back({0.0, base[l].settings, base[l].responses});
      continue;
    }
    std::array<double, 4> d{};
    for (std::size_t i = 0; i < 4; ++i) d[i] = post[l][i] * target[i] / w;
    states.push_back({w, SettingDist::joint(d), base[l].responses});
  }
  return Model(std::move(states), base.label());
}

/// Setting biases eps = p(0) - p(1) for each party.
struct Bias {
  double eps_x = 0.0;
  double eps_y = 0.0;
};

enum class LiftBase { Retrocausal, Causal, OneSided };

struct LiftParams {
  double p = 0.0;
  double p_tilde = 0.5;  // Causal only
  OutcomeSigns signs{};
};

inline Model base_model(LiftBase base, const LiftParams& params) {
  switch (base) {
    case LiftBase::Retrocausal: return table1_model(params.p, params.signs);
    case LiftBase::Causal: return causal_table_model(params.p, params.p_tilde, params.signs);
    case LiftBase::OneSided: return one_sided_model(params.p, params.signs);
  }
  throw DomainError("base_model: unknown base");
}

/// R', C', OS': the base model's p(l|x,y) under factorized settings with the
/// given biases. For the one-sided base p(l|x,y) already equals p(l|x).
inline Model biased_lift(LiftBase base, const LiftParams& params, Bias bias) {
  if (!(std::abs(bias.eps_x) < 1.0 && std::abs(bias.eps_y) < 1.0)) {
    throw DomainError("biased_lift: |eps| must be < 1 so that every setting occurs");
  }
  const Model m = base_model(base, params);
  return reweight_settings(m, SettingDist::from_bias(bias.eps_x, bias.eps_y))
      .relabeled(m.label() + " eps=(" + format_sig12(bias.eps_x) + "," + format_sig12(bias.eps_y) +
                 ")");
}

enum class BiasedFamily { Retrocausal, Causal, OneSided, Superdeterministic };

namespace detail {

inline void check_bias(const Bias& b) {
  check_range("biased_info", "eps_x", b.eps_x, -1.0, 1.0);
  check_range("biased_info", "eps_y", b.eps_y, -1.0, 1.0);
}

}  // namespace detail

/// C' information for explicit (p, p_tilde); S = 4 - 8 p p_tilde.
inline double biased_info_causal(double p, double p_tilde, Bias bias) {
  detail::check_bias(bias);
  detail::check_range("biased_info_causal", "p", p, 0.0, 0.5);
  detail::check_range("biased_info_causal", "p_tilde", p_tilde, 0.0, 0.5);
  return binary_entropy((1.0 + bias.eps_x * (1.0 - 2.0 * p)) / 2.0) - binary_entropy(p) +
         binary_entropy((1.0 + bias.eps_y * (1.0 - 2.0 * p_tilde)) / 2.0) - binary_entropy(p_tilde);
}

/// Optimal causal parameters (p, p_tilde) reaching S.
inline ConjugatePair causal_params_for(double s) {
  s = detail::checked_s("causal_params_for", s);
  if (s <= s0()) {
    const double p = std::sqrt((4.0 - s) / 8.0);
    return {p, p};
  }
  return causal_pair(s);
}

/// Closed-form information of the biased lifts at CHSH value s.
inline double biased_info(BiasedFamily family, double s, Bias bias) {
  s = detail::checked_s("biased_info", s);
  detail::check_bias(bias);
  switch (family) {
    case BiasedFamily::Retrocausal: {
      std::array<double, 4> dist{};
      std::size_t k = 0;
      for (int sx : {1, -1})
        for (int sy : {1, -1})
          dist[k++] = (4.0 + s) / 24.0 +
                      (1.0 + sx * bias.eps_x) / 2.0 * (1.0 + sy * bias.eps_y) / 2.0 * (2.0 - s) / 6.0;
      return shannon_entropy(dist) - binary_entropy((4.0 - s) / 8.0) -
             (4.0 + s) / 8.0 * std::log2(3.0);
    }
    case BiasedFamily::Causal: {
      const auto pp = causal_params_for(s);
      return biased_info_causal(pp.p, pp.p_star, bias);
    }
    case BiasedFamily::OneSided:
      return binary_entropy((1.0 + bias.eps_x * (s / 2.0 - 1.0)) / 2.0) - binary_entropy(s / 4.0);
    case BiasedFamily::Superdeterministic:
      return binary_entropy((1.0 + bias.eps_x) / 2.0) + binary_entropy((1.0 + bias.eps_y) / 2.0);
  }
  throw DomainError("biased_info: unknown family");
}

/// Unbiased curve value matching a biased family.
inline double unbiased_curve(BiasedFamily family, double s) {
  switch (family) {
    case BiasedFamily::Retrocausal: return i_R(s);
    case BiasedFamily::Causal: return i_C(s).info;
    case BiasedFamily::OneSided: return i_OS(s);
    case BiasedFamily::Superdeterministic: return i_SD(s);
  }
  throw DomainError("unbiased_curve: unknown family");
}

}  // namespace bellcost
