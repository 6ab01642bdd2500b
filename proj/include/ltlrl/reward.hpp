#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace ltlrl {

/// Map gamma -> gamma_B. `fixed(c)` ignores gamma; `power(k)` returns
/// 1 - (1-gamma)^k, for which (1-gamma)/(1-gamma_B) = (1-gamma)^(1-k) -> 0.
class GammaSchedule {
 public:
  enum class Kind { fixed, power };

  /// Throw std::invalid_argument unless the parameter lies in (0,1).
  static GammaSchedule fixed(double c);
  static GammaSchedule power(double kappa);
  /// "fixed:0.99" or "power:0.5".
  static GammaSchedule parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }
  double operator()(double gamma) const;
  std::string to_string() const;

 private:
  GammaSchedule(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

/// Reward 1-gamma_B and discount gamma_B on accepting states; reward 0 and
/// discount gamma elsewhere.
class RewardScheme {
 public:
  /// Throws std::invalid_argument unless both discounts lie in (0,1).
  RewardScheme(double gamma, double gamma_b);
  RewardScheme(double gamma, const GammaSchedule& schedule) : RewardScheme(gamma, schedule(gamma)) {}

  double gamma() const noexcept { return gamma_; }
  double gamma_b() const noexcept { return gamma_b_; }
  double reward(bool accepting) const noexcept { return accepting ? 1.0 - gamma_b_ : 0.0; }
  double discount(bool accepting) const noexcept { return accepting ? gamma_b_ : gamma_; }

  /// Smallest n with max(gamma, gamma_B)^n < eps.
  std::size_t truncation_horizon(double eps = 1e-12) const;

 private:
  double gamma_;
  double gamma_b_;
};

double reward_of(const RewardScheme& scheme, bool accepting) noexcept;
double gamma_b_schedule(const GammaSchedule& schedule, double gamma);

/// Discounted return from position 0 of a finite path given its accepting
/// flags: sum_i R(i) * prod_{j<i} Gamma(j).
double return_of(const RewardScheme& scheme, std::span<const char> accepting);

}  // namespace ltlrl
