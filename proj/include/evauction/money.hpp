#pragma once
// Copyright 2026 The EVAuction Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace evauction {

/// Monetary amount stored as an exact count of cents.
///
/// The bidding protocol terminates on bit-exact price repetition and the
/// solver is checked for exact objective equality against an enumeration
/// oracle, so money must never pass through floating point arithmetic once
/// constructed.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }

  static constexpr Money from_dollars(std::int64_t dollars) {
    return Money(dollars * 100);
  }

  /// Rounds to the nearest cent (ties away from zero).
  static Money from_dollars(double dollars) {
    return Money(std::llround(dollars * 100.0));
  }

  constexpr std::int64_t cents() const { return cents_; }
  double dollars() const { return static_cast<double>(cents_) / 100.0; }

  constexpr bool is_zero() const { return cents_ == 0; }

  friend constexpr Money operator+(Money a, Money b) { return Money(a.cents_ + b.cents_); }
  friend constexpr Money operator-(Money a, Money b) { return Money(a.cents_ - b.cents_); }
  constexpr Money operator-() const { return Money(-cents_); }
  constexpr Money& operator+=(Money other) {
    cents_ += other.cents_;
    return *this;
  }
  constexpr Money& operator-=(Money other) {
    cents_ -= other.cents_;
    return *this;
  }

  friend constexpr auto operator<=>(Money a, Money b) = default;

  std::string to_string() const {
    std::int64_t abs_cents = cents_ < 0 ? -cents_ : cents_;
    std::string sign = cents_ < 0 ? "-$" : "$";
    std::string whole = std::to_string(abs_cents / 100);
    std::int64_t frac = abs_cents % 100;
    if (frac == 0) return sign + whole;
    std::string frac_str = std::to_string(frac);
    if (frac_str.size() == 1) frac_str = "0" + frac_str;
    return sign + whole + "." + frac_str;
  }

  friend std::ostream& operator<<(std::ostream& os, Money m) {
    return os << m.to_string();
  }

 private:
  constexpr explicit Money(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

constexpr Money kZeroMoney = Money::from_cents(0);

inline Money min(Money a, Money b) { return a < b ? a : b; }
inline Money max(Money a, Money b) { return a < b ? b : a; }

/// `rate` per hour applied over a (possibly fractional) number of hours,
/// rounded to the nearest cent. Used for the linear delay cost.
inline Money scale_by_hours(Money rate, double hours) {
  return Money::from_cents(std::llround(static_cast<double>(rate.cents()) * hours));
}

/// Ceiling division for non-negative money amounts, used by the round-bound
/// formula: the number of epsilon-increments needed to cover `gap`.
inline std::int64_t increments_to_cover(Money gap, Money epsilon) {
  if (gap.cents() <= 0) return 0;
  return (gap.cents() + epsilon.cents() - 1) / epsilon.cents();
}

}  // namespace evauction
