#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bellcost/entropy.hpp"
#include "bellcost/errors.hpp"

namespace bellcost {

// Settings are bits x, y in {0,1}; joint settings are indexed 2x + y.
inline constexpr std::size_t setting_index(int x, int y) {
  return static_cast<std::size_t>(2 * x + y);
}
inline constexpr int setting_x(std::size_t idx) { return static_cast<int>(idx >> 1); }
inline constexpr int setting_y(std::size_t idx) { return static_cast<int>(idx & 1); }

/// Probability distribution over the four joint settings (x,y).
class SettingDist {
 public:
  enum class Kind { Joint, Factorized };

  SettingDist() : SettingDist(uniform()) {}

  static SettingDist joint(const std::array<double, 4>& probs) {
    SettingDist d;
    d.kind_ = Kind::Joint;
    d.probs_ = probs;
    d.validate();
    return d;
  }

  /// p(x,y) = p(x) p(y) with p(x=0) = px0 and p(y=0) = py0.
  static SettingDist factorized(double px0, double py0) {
    check_unit("px0", px0);
    check_unit("py0", py0);
    SettingDist d;
    d.kind_ = Kind::Factorized;
    d.px0_ = px0;
    d.py0_ = py0;
    const std::array<double, 2> px{px0, 1.0 - px0};
    const std::array<double, 2> py{py0, 1.0 - py0};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) d.probs_[setting_index(x, y)] = px[x] * py[y];
    d.validate();
    return d;
  }

  /// Factorized form from the biases eps = p(0) - p(1).
  static SettingDist from_bias(double eps_x, double eps_y) {
    return factorized((1.0 + eps_x) / 2.0, (1.0 + eps_y) / 2.0);
  }

  static SettingDist uniform() {
    SettingDist d(Tag{});
    d.kind_ = Kind::Factorized;
    d.px0_ = 0.5;
    d.py0_ = 0.5;
    d.probs_ = {0.25, 0.25, 0.25, 0.25};
    return d;
  }

  double operator()(int x, int y) const { return probs_[setting_index(x, y)]; }
  double operator[](std::size_t idx) const { return probs_[idx]; }
  const std::array<double, 4>& probs() const { return probs_; }

  Kind kind() const { return kind_; }
  bool is_factorized_tag() const { return kind_ == Kind::Factorized; }
  /// Only meaningful for the factorized representation.
  double px0() const { return px0_; }
  double py0() const { return py0_; }

  double marginal_x(int x) const { return (*this)(x, 0) + (*this)(x, 1); }
  double marginal_y(int y) const { return (*this)(0, y) + (*this)(1, y); }

  double entropy() const { return shannon_entropy(probs_); }

  bool approx_equal(const SettingDist& other, double tol) const {
    for (std::size_t i = 0; i < 4; ++i)
      if (std::abs(probs_[i] - other.probs_[i]) > tol) return false;
    return true;
  }

 private:
  struct Tag {};
  explicit SettingDist(Tag) {}

  static void check_unit(const char* what, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError(std::string("SettingDist: ") + what + " = " + std::to_string(p) +
                        " outside [0,1]");
    }
  }

  void validate() const {
    double sum = 0.0;
    for (double p : probs_) {
      check_unit("probability", p);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTol) {
      throw DomainError("SettingDist: probabilities sum to " + std::to_string(sum));
    }
  }

  Kind kind_ = Kind::Joint;
  std::array<double, 4> probs_{};
  double px0_ = 0.0;
  double py0_ = 0.0;
};

/// A measurement outcome, exactly -1 or +1.
class Outcome {
 public:
  constexpr Outcome() = default;
  constexpr explicit Outcome(int v) : v_(v == 1 ? 1 : -1) {
    if (v != 1 && v != -1) throw DomainError("Outcome must be -1 or +1");
  }
  constexpr int value() const { return v_; }
  constexpr Outcome flipped() const { return Outcome(-v_); }
  constexpr bool operator==(const Outcome&) const = default;

 private:
  int v_ = 1;
};

/// Deterministic response functions A_0, A_1, B_0, B_1 of one hidden state.
struct Responses {
  std::array<Outcome, 2> a{};
  std::array<Outcome, 2> b{};

  static Responses of(int a0, int a1, int b0, int b1) {
    return Responses{{Outcome(a0), Outcome(a1)}, {Outcome(b0), Outcome(b1)}};
  }
  int A(int x) const { return a[x].value(); }
  int B(int y) const { return b[y].value(); }
  Responses flipped() const {
    return Responses{{a[0].flipped(), a[1].flipped()}, {b[0].flipped(), b[1].flipped()}};
  }
  /// (mu, nu) with A_1 = (-1)^mu A_0 and B_1 = (-1)^nu B_0.
  std::pair<int, int> class_mu_nu() const {
    return {A(1) == A(0) ? 0 : 1, B(1) == B(0) ? 0 : 1};
  }
  bool operator==(const Responses&) const = default;
};

struct HiddenState {
  double weight = 0.0;
  SettingDist settings;
  Responses responses;
};

/// Finite deterministic hidden-variable model.
class Model {
 public:
  Model(std::vector<HiddenState> states, std::string label = {})
      : states_(std::move(states)), label_(std::move(label)) {
    if (states_.empty()) throw DomainError("Model: no hidden states");
    double sum = 0.0;
    for (const auto& s : states_) {
      if (!(s.weight >= 0.0)) throw DomainError("Model: negative state weight");
      sum += s.weight;
    }
    if (std::abs(sum - 1.0) > kNormTol) {
      throw DomainError("Model: weights sum to " + std::to_string(sum));
    }
    // The mixture of valid distributions is valid; this re-checks the sum.
    std::array<double, 4> mix{};
    for (const auto& s : states_)
      for (std::size_t i = 0; i < 4; ++i) mix[i] += s.weight * s.settings[i];
    (void)SettingDist::joint(mix);
  }

  const std::vector<HiddenState>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const HiddenState& operator[](std::size_t i) const { return states_[i]; }
  const std::string& label() const { return label_; }

  Model relabeled(std::string label) const { return Model(states_, std::move(label)); }

 private:
  std::vector<HiddenState> states_;
  std::string label_;
};

/// Observable statistics p(a,b|x,y), a,b in {-1,+1}.
class Correlations {
 public:
  Correlations() = default;

  /// Builds from a table indexed [setting_index(x,y)][outcome_index(a,b)].
  explicit Correlations(const std::array<std::array<double, 4>, 4>& table) : table_(table) {
    for (const auto& row : table_) {
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw DomainError("Correlations: negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kNormTol) {
        throw DomainError("Correlations: p(.,.|x,y) sums to " + std::to_string(sum));
      }
    }
  }

  static constexpr std::size_t outcome_index(int a, int b) {
    return static_cast<std::size_t>((a > 0 ? 0 : 2) + (b > 0 ? 0 : 1));
  }
  static constexpr int outcome_a(std::size_t idx) { return (idx & 2) ? -1 : 1; }
  static constexpr int outcome_b(std::size_t idx) { return (idx & 1) ? -1 : 1; }

  double operator()(int a, int b, int x, int y) const {
    return table_[setting_index(x, y)][outcome_index(a, b)];
  }
  const std::array<std::array<double, 4>, 4>& table() const { return table_; }

  double marginal_a(int a, int x, int y) const { return (*this)(a, 1, x, y) + (*this)(a, -1, x, y); }
  double marginal_b(int b, int x, int y) const { return (*this)(1, b, x, y) + (*this)(-1, b, x, y); }

  /// <AB>_xy
  double correlator(int x, int y) const {
    double e = 0.0;
    for (std::size_t o = 0; o < 4; ++o) e += outcome_a(o) * outcome_b(o) * table_[setting_index(x, y)][o];
    return e;
  }

  static Correlations white_noise() {
    std::array<std::array<double, 4>, 4> t{};
    for (auto& row : t) row = {0.25, 0.25, 0.25, 0.25};
    return Correlations(t);
  }

 private:
  std::array<std::array<double, 4>, 4> table_{};
};

enum class CausalClass { Retrocausal, Causal, Zigzag, OneSided, Superdeterministic };

inline std::string_view to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Retrocausal: return "retro";
    case CausalClass::Causal: return "causal";
    case CausalClass::Zigzag: return "zigzag";
    case CausalClass::OneSided: return "onesided";
    case CausalClass::Superdeterministic: return "superdet";
  }
  return "?";
}

inline std::optional<CausalClass> parse_causal_class(std::string_view s) {
  for (auto c : {CausalClass::Retrocausal, CausalClass::Causal, CausalClass::Zigzag,
                 CausalClass::OneSided, CausalClass::Superdeterministic}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

}  // namespace bellcost
