#include "ltlrl/reward.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace ltlrl {

namespace {

void require_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(fmt::format("{} must lie in (0,1), got {}", what, v));
}

}  // namespace

GammaSchedule GammaSchedule::fixed(double c) {
  require_open_unit(c, "fixed gamma_B");
  return {Kind::fixed, c};
}

GammaSchedule GammaSchedule::power(double kappa) {
  require_open_unit(kappa, "power exponent");
  return {Kind::power, kappa};
}

GammaSchedule GammaSchedule::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument(fmt::format("schedule '{}' is not of the form name:value", text));
  }
  const std::string_view name = text.substr(0, colon);
  const std::string_view arg = text.substr(colon + 1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
  if (ec != std::errc() || ptr != arg.data() + arg.size()) {
    throw std::invalid_argument(fmt::format("bad schedule parameter '{}'", arg));
  }
  if (name == "fixed") return fixed(value);
  if (name == "power") return power(value);
  throw std::invalid_argument(fmt::format("unknown schedule '{}'", name));
}

double GammaSchedule::operator()(double gamma) const {
  require_open_unit(gamma, "gamma");
  if (kind_ == Kind::fixed) return param_;
  return 1.0 - std::pow(1.0 - gamma, param_);
}

std::string GammaSchedule::to_string() const {
  return fmt::format("{}:{}", kind_ == Kind::fixed ? "fixed" : "power", param_);
}

RewardScheme::RewardScheme(double gamma, double gamma_b) : gamma_(gamma), gamma_b_(gamma_b) {
  require_open_unit(gamma, "gamma");
  require_open_unit(gamma_b, "gamma_B");
}

std::size_t RewardScheme::truncation_horizon(double eps) const {
  const double d = std::max(gamma_, gamma_b_);
  auto n = static_cast<std::size_t>(std::ceil(std::log(eps) / std::log(d)));
  // Rounding in the logarithms can be off by one either way.
  while (std::pow(d, static_cast<double>(n)) >= eps) ++n;
  while (n > 0 && std::pow(d, static_cast<double>(n - 1)) < eps) --n;
  return n;
}

double reward_of(const RewardScheme& scheme, bool accepting) noexcept { return scheme.reward(accepting); }

double gamma_b_schedule(const GammaSchedule& schedule, double gamma) { return schedule(gamma); }

double return_of(const RewardScheme& scheme, std::span<const char> accepting) {
  double total = 0.0;
  double discount = 1.0;
  for (char flag : accepting) {
    total += discount * scheme.reward(flag != 0);
    discount *= scheme.discount(flag != 0);
  }
  return total;
}

}  // namespace ltlrl
