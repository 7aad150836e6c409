#pragma once

// Exact rational number. Values whose numerator and denominator fit in 64 bits
// are kept inline and computed with 128-bit intermediates; anything larger is
// carried by a GMP mpq_class.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace kcenter {

class Rational {
 public:
  Rational() = default;
  Rational(int v) : num_(v) {}
  Rational(long v) { assign_i128(v, 1); }
  Rational(long long v) { assign_i128(v, 1); }
  Rational(std::int64_t num, std::int64_t den) { assign_i128(num, den); }
  explicit Rational(const mpq_class& q) { assign_mpq(q); }

  Rational(const Rational& o) : num_(o.num_), den_(o.den_) {
    if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
  }
  Rational(Rational&&) noexcept = default;
  Rational& operator=(const Rational& o) {
    if (this != &o) {
      num_ = o.num_;
      den_ = o.den_;
      big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
    }
    return *this;
  }
  Rational& operator=(Rational&&) noexcept = default;

  // Parses "p", "-p" or "p/q" with arbitrary-size integers.
  static Rational parse(const std::string& text) {
    mpq_class q;
    if (text.empty() || q.set_str(text, 10) != 0) {
      throw std::invalid_argument("not a rational number: " + text);
    }
    if (text.find('/') != std::string::npos && q.get_den() == 0) {
      throw std::invalid_argument("zero denominator: " + text);
    }
    q.canonicalize();
    return Rational(q);
  }

  bool is_small() const { return !big_; }

  mpq_class to_mpq() const {
    if (big_) return *big_;
    mpq_class q;
    mpz_set_si(q.get_num_mpz_t(), num_);
    mpz_set_si(q.get_den_mpz_t(), den_);
    return q;
  }

  double to_double() const {
    if (big_) return big_->get_d();
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // Lowest-terms "p/q"; integers keep the "/1".
  std::string fraction() const {
    mpq_class q = to_mpq();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
  }

  int sign() const {
    if (big_) return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
  }

  Rational operator-() const {
    if (big_) return Rational(mpq_class(-*big_));
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.big_ || b.big_) return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
    if (a.den_ == 1 && b.den_ == 1) return from_i128(I128(a.num_) + b.num_, 1);
    std::int64_t g = std::gcd(a.den_, b.den_);
    if (g == 1) {
      return from_reduced(I128(a.num_) * b.den_ + I128(b.num_) * a.den_, I128(a.den_) * b.den_);
    }
    I128 t = I128(a.num_) * (b.den_ / g) + I128(b.num_) * (a.den_ / g);
    std::int64_t g2 = gcd_i128_i64(t, g);
    return from_reduced(t / g2, I128(a.den_ / g) * (b.den_ / g2));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.big_ || b.big_) return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
    if (a.num_ == 0 || b.num_ == 0) return Rational();
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    return from_reduced(I128(a.num_ / g1) * (b.num_ / g2), I128(a.den_ / g2) * (b.den_ / g1));
  }

  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.sign() == 0) throw std::domain_error("rational division by zero");
    if (a.big_ || b.big_) return Rational(mpq_class(a.to_mpq() / b.to_mpq()));
    if (a.num_ == 0) return Rational();
    std::int64_t g1 = std::gcd(a.num_, b.num_);
    std::int64_t g2 = std::gcd(a.den_, b.den_);
    I128 num = I128(a.num_ / g1) * (b.den_ / g2);
    I128 den = I128(a.den_ / g2) * (b.num_ / g1);
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return from_reduced(num, den);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // a big value never fits the inline form
  }

  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
      if (a.den_ == b.den_) return a.num_ <=> b.num_;
      I128 l = I128(a.num_) * b.den_;
      I128 r = I128(b.num_) * a.den_;
      return l < r ? std::strong_ordering::less
                   : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.fraction(); }

 private:
  using I128 = __int128;
  using U128 = unsigned __int128;

  static U128 abs_u128(I128 v) { return v < 0 ? U128(0) - U128(v) : U128(v); }

  static U128 gcd_u128(U128 a, U128 b) {
    while (b != 0) {
      U128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static std::int64_t gcd_i128_i64(I128 t, std::int64_t g) {
    std::int64_t r = static_cast<std::int64_t>(abs_u128(t) % U128(g));
    return std::gcd(r, g);
  }

  // INT64_MIN is left out so negation and std::gcd never overflow.
  static bool fits(I128 v) { return v > I128(INT64_MIN) && v <= I128(INT64_MAX); }

  // num/den already coprime, den > 0.
  static Rational from_reduced(I128 num, I128 den) {
    Rational r;
    if (fits(num) && fits(den)) {
      r.num_ = static_cast<std::int64_t>(num);
      r.den_ = static_cast<std::int64_t>(den);
      return r;
    }
    r.set_big(num, den);
    return r;
  }

  static Rational from_i128(I128 num, I128 den) {
    Rational r;
    r.assign_i128(num, den);
    return r;
  }

  void assign_i128(I128 num, I128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    U128 g = gcd_u128(abs_u128(num), U128(den));
    if (g > 1) {
      num /= I128(g);
      den /= I128(g);
    }
    if (fits(num) && fits(den)) {
      num_ = static_cast<std::int64_t>(num);
      den_ = static_cast<std::int64_t>(den);
      big_.reset();
    } else {
      set_big(num, den);
    }
  }

  static mpz_class to_mpz(I128 v) {
    bool neg = v < 0;
    U128 u = abs_u128(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
    mpz_class z = (hi << 64) + lo;
    return neg ? mpz_class(-z) : z;
  }

  void set_big(I128 num, I128 den) {
    mpq_class q(to_mpz(num), to_mpz(den));
    q.canonicalize();
    assign_mpq(q);
  }

  void assign_mpq(const mpq_class& q) {
    if (mpz_fits_slong_p(q.get_num_mpz_t()) && mpz_fits_slong_p(q.get_den_mpz_t()) &&
        mpz_cmp_si(q.get_num_mpz_t(), INT64_MIN) != 0) {
      num_ = mpz_get_si(q.get_num_mpz_t());
      den_ = mpz_get_si(q.get_den_mpz_t());
      big_.reset();
    } else {
      num_ = 0;
      den_ = 1;
      big_ = std::make_unique<mpq_class>(q);
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

}  // namespace kcenter
