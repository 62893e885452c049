#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "bellcost/entropy.hpp"
#include "bellcost/model.hpp"

namespace bellcost {

/// Mixture p(x,y) = sum_l p(l) p(x,y|l).
inline SettingDist derived_marginal(const Model& m) {
  std::array<double, 4> mix{};
  for (const auto& s : m.states())
    for (std::size_t i = 0; i < 4; ++i) mix[i] += s.weight * s.settings[i];
  return SettingDist::joint(mix);
}

namespace detail {

inline SettingDist checked_marginal(const Model& m) {
  SettingDist marg = derived_marginal(m);
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(marg[i] > 0.0)) {
      throw UndefinedCorrelator("p(x=" + std::to_string(setting_x(i)) +
                                ",y=" + std::to_string(setting_y(i)) + ") = 0");
    }
  }
  return marg;
}

}  // namespace detail

/// Retrocausal view p(l|x,y) = p(l) p(x,y|l) / p(x,y); rows are states.
inline std::vector<std::array<double, 4>> posterior(const Model& m) {
  const SettingDist marg = detail::checked_marginal(m);
  std::vector<std::array<double, 4>> post(m.size());
  for (std::size_t l = 0; l < m.size(); ++l)
    for (std::size_t i = 0; i < 4; ++i) post[l][i] = m[l].weight * m[l].settings[i] / marg[i];
  return post;
}

/// Selects one of the eight CHSH expressions by relabelling outcomes of the
/// flagged settings. The default is S = <AB>00 + <AB>01 + <AB>10 - <AB>11.
struct ChshForm {
  std::array<bool, 2> flip_a{false, false};
  std::array<bool, 2> flip_b{false, false};

  int sign(int x, int y) const {
    int s = (x & y) ? -1 : 1;
    if (flip_a[x]) s = -s;
    if (flip_b[y]) s = -s;
    return s;
  }
};

/// <AB>_xy = sum_l p(l|x,y) A_x(l) B_y(l).
inline std::array<double, 4> correlators(const Model& m) {
  const SettingDist marg = detail::checked_marginal(m);
  std::array<double, 4> e{};
  for (const auto& s : m.states()) {
    for (std::size_t i = 0; i < 4; ++i) {
      const int x = setting_x(i);
      const int y = setting_y(i);
      e[i] += s.weight * s.settings[i] / marg[i] * s.responses.A(x) * s.responses.B(y);
    }
  }
  return e;
}

inline double chsh_value(const Model& m, const ChshForm& form = {}) {
  const auto e = correlators(m);
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += form.sign(setting_x(i), setting_y(i)) * e[i];
  return s;
}

/// Entropy of p(l).
inline double lambda_entropy(const Model& m) {
  double h = 0.0;
  for (const auto& s : m.states()) h += neg_p_log2_p(s.weight);
  return h;
}

/// I(X,Y:L) = H(X,Y) - sum_l p(l) H_l(X,Y), in bits.
inline double mutual_information(const Model& m) {
  const double h_xy = derived_marginal(m).entropy();
  double cond = 0.0;
  for (const auto& s : m.states()) {
    if (s.weight > 0.0) cond += s.weight * s.settings.entropy();
  }
  // Rounding can leave a residue of order 1e-16 below zero.
  return std::max(0.0, h_xy - cond);
}

/// True iff |p00 p11 - p01 p10| <= tol for every state.
inline bool is_factorized_per_lambda(const Model& m, double tol = kStructTol) {
  return std::all_of(m.states().begin(), m.states().end(), [tol](const HiddenState& s) {
    const auto& d = s.settings;
    return std::abs(d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0)) <= tol;
  });
}

inline Correlations correlations_of(const Model& m) {
  const SettingDist marg = detail::checked_marginal(m);
  std::array<std::array<double, 4>, 4> t{};
  for (const auto& s : m.states()) {
    for (std::size_t i = 0; i < 4; ++i) {
      const int a = s.responses.A(setting_x(i));
      const int b = s.responses.B(setting_y(i));
      t[i][Correlations::outcome_index(a, b)] += s.weight * s.settings[i] / marg[i];
    }
  }
  return Correlations(t);
}

/// Checks p(a|x,y) = p(a|x) and p(b|x,y) = p(b|y) within tol.
inline bool is_nonsignaling(const Correlations& c, double tol = kStructTol) {
  for (int o : {1, -1}) {
    for (int x = 0; x < 2; ++x)
      if (std::abs(c.marginal_a(o, x, 0) - c.marginal_a(o, x, 1)) > tol) return false;
    for (int y = 0; y < 2; ++y)
      if (std::abs(c.marginal_b(o, 0, y) - c.marginal_b(o, 1, y)) > tol) return false;
  }
  return true;
}

}  // namespace bellcost
