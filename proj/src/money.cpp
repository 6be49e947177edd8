#include "mua/money.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace mua {
namespace {

struct Decimal {
  __int128 digits = 0;  // value = digits * 10^-scale
  int scale = 0;
  bool negative = false;
};

constexpr int kMaxScale = 12;

Decimal parse_decimal(std::string_view text) {
  Decimal d;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    d.negative = text[i] == '-';
    ++i;
  }
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_point) throw ValidationError("malformed decimal '" + std::string(text) + "'");
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ValidationError("malformed decimal '" + std::string(text) + "'");
    }
    any_digit = true;
    d.digits = d.digits * 10 + (c - '0');
    if (d.digits > static_cast<__int128>(std::numeric_limits<std::int64_t>::max())) {
      throw ValidationError("decimal out of range '" + std::string(text) + "'");
    }
    if (seen_point) {
      if (++d.scale > kMaxScale) {
        throw ValidationError("too many fractional digits in '" + std::string(text) + "'");
      }
    }
  }
  if (!any_digit) throw ValidationError("malformed decimal '" + std::string(text) + "'");
  return d;
}

__int128 pow10(int e) {
  __int128 r = 1;
  while (e-- > 0) r *= 10;
  return r;
}

}  // namespace

Grid Grid::parse(std::string_view step) {
  Decimal d = parse_decimal(step);
  if (d.negative || d.digits == 0) {
    throw ValidationError("grid step must be positive, got '" + std::string(step) + "'");
  }
  // Strip trailing zeros so equal steps compare equal.
  while (d.scale > 0 && d.digits % 10 == 0) {
    d.digits /= 10;
    --d.scale;
  }
  return Grid(static_cast<std::int64_t>(d.digits), d.scale);
}

double Grid::step() const {
  return static_cast<double>(mantissa_) / std::pow(10.0, scale_);
}

Money Grid::parse_amount(std::string_view text, bool allow_negative) const {
  const Decimal d = parse_decimal(text);
  if (d.negative && d.digits != 0 && !allow_negative) {
    throw ValidationError("negative amount '" + std::string(text) + "'");
  }
  // value = digits * 10^-d.scale ; ticks = value / (mantissa * 10^-scale_)
  const int common = std::max(d.scale, scale_);
  const __int128 num = d.digits * pow10(common - d.scale);
  const __int128 den = static_cast<__int128>(mantissa_) * pow10(common - scale_);
  if (num % den != 0) {
    throw ValidationError("amount '" + std::string(text) + "' is not on the grid with step " +
                          step_string());
  }
  const __int128 q = num / den;
  if (q > static_cast<__int128>(std::numeric_limits<std::int64_t>::max())) {
    throw ValidationError("amount out of range '" + std::string(text) + "'");
  }
  const auto ticks = static_cast<std::int64_t>(q);
  return Money(d.negative ? -ticks : ticks);
}

std::string Grid::format(Money m) const {
  __int128 v = static_cast<__int128>(m.ticks()) * mantissa_;
  const bool negative = v < 0;
  if (negative) v = -v;
  std::string digits;
  do {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  } while (v > 0);
  if (scale_ > 0) {
    while (static_cast<int>(digits.size()) <= scale_) digits.insert(digits.begin(), '0');
    digits.insert(digits.end() - scale_, '.');
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
  }
  return negative ? "-" + digits : digits;
}

Money Grid::floor_real(double value) const {
  if (!(value >= 0.0)) return Money(0);
  // Small tolerance keeps exact multiples (e.g. 0.3 / 0.1) from dropping a tick.
  return Money(static_cast<std::int64_t>(std::floor(value / step() + 1e-9)));
}

}  // namespace mua
