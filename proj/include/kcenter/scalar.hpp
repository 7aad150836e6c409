#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "rational.hpp"

namespace kcenter {

enum class ScalarMode { exact, binary_float };

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(long long v) { return Rational(v); }
  static double to_double(const Rational& v) { return v.to_double(); }
  static std::string fraction(const Rational& v) { return v.fraction(); }
  static Rational half(const Rational& v) { return v / Rational(2); }
  // Integers or "p/q"; decimal notation is refused so exact mode never rounds.
  static std::optional<Rational> parse(const std::string& token) {
    if (token.empty() || token.find_first_not_of("+-0123456789/") != std::string::npos) {
      return std::nullopt;
    }
    try {
      return Rational::parse(token[0] == '+' ? token.substr(1) : token);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double from_int(long long v) { return static_cast<double>(v); }
  static double to_double(double v) { return v; }
  static std::string fraction(double v) {
    mpq_class q(v);
    return q.get_num().get_str() + "/" + q.get_den().get_str();
  }
  static double half(double v) { return v / 2; }
  static std::optional<double> parse(const std::string& token) {
    if (token.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) {
      if (token.find('/') != std::string::npos) {
        auto q = ScalarTraits<Rational>::parse(token);
        if (q) return q->to_double();
      }
      return std::nullopt;
    }
    return v;
  }
};

template <class S>
S midpoint(const S& a, const S& b) {
  return ScalarTraits<S>::half(a + b);
}

template <class S>
std::string decimal17(const S& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", ScalarTraits<S>::to_double(v));
  return buf;
}

// A scalar extended by two ordered infinities: finite < inf_low < inf_high.
// Single-infinity code uses inf_high only.
enum class InfLevel : std::uint8_t { finite = 0, inf_low = 1, inf_high = 2 };

template <class S>
struct Extended {
  S value{};
  InfLevel level = InfLevel::finite;

  Extended() = default;
  Extended(S v) : value(std::move(v)) {}

  static Extended inf() { return with_level(InfLevel::inf_high); }
  static Extended inf_low() { return with_level(InfLevel::inf_low); }

  bool finite() const { return level == InfLevel::finite; }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.level != b.level) return false;
    return !a.finite() || a.value == b.value;
  }
  friend std::partial_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.level != b.level) return a.level <=> b.level;
    if (!a.finite()) return std::partial_ordering::equivalent;
    if (a.value < b.value) return std::partial_ordering::less;
    if (b.value < a.value) return std::partial_ordering::greater;
    return std::partial_ordering::equivalent;
  }

  // Infinities absorb finite shifts.
  friend Extended operator+(const Extended& a, const S& d) { return a.finite() ? Extended(a.value + d) : a; }
  friend Extended operator-(const Extended& a, const S& d) { return a.finite() ? Extended(a.value - d) : a; }

 private:
  static Extended with_level(InfLevel l) {
    Extended e;
    e.level = l;
    return e;
  }
};

template <class S>
const Extended<S>& ext_min(const Extended<S>& a, const Extended<S>& b) {
  return b < a ? b : a;
}

}  // namespace kcenter
