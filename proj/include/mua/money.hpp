#ifndef MUA_MONEY_HPP
#define MUA_MONEY_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mua {

// Raised for malformed input: bad decimals, off-grid values, broken
// preconditions on instances and profiles.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exact amount expressed as a whole number of grid steps. Bids and
// valuations are non-negative; utilities and edge weights may go negative.
class Money {
 public:
  constexpr Money() = default;
  constexpr explicit Money(std::int64_t ticks) : ticks_(ticks) {}

  constexpr std::int64_t ticks() const { return ticks_; }

  constexpr auto operator<=>(const Money&) const = default;

  constexpr Money& operator+=(Money o) { ticks_ += o.ticks_; return *this; }
  constexpr Money& operator-=(Money o) { ticks_ -= o.ticks_; return *this; }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr Money operator-(Money a, Money b) { return a -= b; }
  friend constexpr Money operator-(Money a) { return Money(-a.ticks_); }
  friend constexpr Money operator*(std::int64_t k, Money a) { return Money(k * a.ticks_); }
  friend constexpr Money operator*(Money a, std::int64_t k) { return Money(k * a.ticks_); }

 private:
  std::int64_t ticks_ = 0;
};

// The bid grid {k * step : k in N}. The step is kept as an exact decimal
// mantissa * 10^-scale so that decimal strings round-trip bit-exactly.
class Grid {
 public:
  // Parses a positive decimal step such as "0.01" or "1".
  static Grid parse(std::string_view step);

  // Grid with step 1 (integer ticks are also the printed values).
  Grid() = default;

  std::int64_t mantissa() const { return mantissa_; }
  int scale() const { return scale_; }

  // Step as a real number.
  double step() const;

  // Real value of an amount.
  double to_real(Money m) const { return static_cast<double>(m.ticks()) * step(); }

  // Parses a decimal string that must be an exact multiple of the step.
  // Throws ValidationError when it is not, or when it is negative and
  // `allow_negative` is false.
  Money parse_amount(std::string_view text, bool allow_negative = false) const;

  // Exact decimal rendering, e.g. ticks=7, step=0.05 -> "0.35".
  std::string format(Money m) const;

  // Step string as given (normalized).
  std::string step_string() const { return format(Money(1)); }

  // Largest amount on this grid not exceeding `value` (value >= 0).
  Money floor_real(double value) const;

  bool operator==(const Grid&) const = default;

 private:
  Grid(std::int64_t mantissa, int scale) : mantissa_(mantissa), scale_(scale) {}
  std::int64_t mantissa_ = 1;
  int scale_ = 0;
};

}  // namespace mua

#endif  // MUA_MONEY_HPP
