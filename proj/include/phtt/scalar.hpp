#ifndef PHTT_SCALAR_HPP
#define PHTT_SCALAR_HPP

// Exact field coefficients.  Default build: arbitrary-precision rationals
// on top of GMP, kept in lowest terms with positive denominator (mpq
// canonicalization).  Defining PHTT_FIELD_PRIME=p at compile time swaps in
// the prime field Z/p with the same interface; string forms "a/b" then
// denote a * b^{-1} mod p.

#include <cstdint>
#include <optional>
#include <string>

#include "phtt/common.hpp"

#ifndef PHTT_FIELD_PRIME
#include <gmpxx.h>
#endif

namespace phtt {

#ifndef PHTT_FIELD_PRIME

class Scalar {
 public:
  Scalar() : q_(0) {}
  Scalar(long n) : q_(n) {}
  Scalar(long num, long den) : q_(num, den) { q_.canonicalize(); }

  static std::optional<Scalar> parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    // Accept "p" and "p/q"; minus sign only at the very front, digits only.
    auto digits = [&text](std::size_t from, std::size_t to, bool allow_sign) {
      if (from < to && allow_sign && text[from] == '-') ++from;
      if (from >= to) return false;
      for (std::size_t i = from; i < to; ++i)
        if (text[i] < '0' || text[i] > '9') return false;
      return true;
    };
    std::size_t slash = text.find('/');
    if (slash == std::string::npos) {
      if (!digits(0, text.size(), true)) return std::nullopt;
      return Scalar(mpq_class(text));
    }
    if (!digits(0, slash, true) || !digits(slash + 1, text.size(), false)) return std::nullopt;
    mpq_class q(text);
    if (q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return Scalar(q);
  }

  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  bool is_zero() const { return q_ == 0; }

  Scalar operator-() const { return Scalar(mpq_class(-q_)); }
  Scalar& operator+=(const Scalar& o) { q_ += o.q_; return *this; }
  Scalar& operator-=(const Scalar& o) { q_ -= o.q_; return *this; }
  Scalar& operator*=(const Scalar& o) { q_ *= o.q_; return *this; }
  Scalar& operator/=(const Scalar& o) { q_ /= o.q_; return *this; }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return a.q_ != b.q_; }
  friend bool operator<(const Scalar& a, const Scalar& b) { return a.q_ < b.q_; }

  Scalar inverse() const { return Scalar(mpq_class(1) / q_); }

 private:
  explicit Scalar(mpq_class q) : q_(std::move(q)) {}
  mpq_class q_;
};

#else  // PHTT_FIELD_PRIME

class Scalar {
 public:
  static constexpr std::int64_t P = PHTT_FIELD_PRIME;

  Scalar() : v_(0) {}
  Scalar(long n) : v_(norm(n)) {}
  Scalar(long num, long den) : v_(norm(num)) { *this /= Scalar(den); }

  static std::optional<Scalar> parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    auto digits = [&text](std::size_t from, std::size_t to, bool allow_sign) {
      if (from < to && allow_sign && text[from] == '-') ++from;
      if (from >= to) return false;
      for (std::size_t i = from; i < to; ++i)
        if (text[i] < '0' || text[i] > '9') return false;
      return true;
    };
    std::size_t slash = text.find('/');
    try {
      if (slash == std::string::npos) {
        if (!digits(0, text.size(), true)) return std::nullopt;
        return Scalar(std::stol(text));
      }
      if (!digits(0, slash, true) || !digits(slash + 1, text.size(), false)) return std::nullopt;
      Scalar num(std::stol(text.substr(0, slash)));
      Scalar den(std::stol(text.substr(slash + 1)));
      if (den.is_zero()) return std::nullopt;
      return num / den;
    } catch (...) {
      return std::nullopt;
    }
  }

  std::string str() const { return std::to_string(v_); }
  bool is_zero() const { return v_ == 0; }

  Scalar operator-() const { return Scalar(long(norm(-v_))); }
  Scalar& operator+=(const Scalar& o) { v_ = norm(v_ + o.v_); return *this; }
  Scalar& operator-=(const Scalar& o) { v_ = norm(v_ - o.v_); return *this; }
  Scalar& operator*=(const Scalar& o) { v_ = norm(v_ * o.v_); return *this; }
  Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return a.v_ != b.v_; }
  friend bool operator<(const Scalar& a, const Scalar& b) { return a.v_ < b.v_; }

  Scalar inverse() const {
    // Fermat: v^(P-2) mod P.
    std::int64_t base = v_, acc = 1, e = P - 2;
    while (e) {
      if (e & 1) acc = acc * base % P;
      base = base * base % P;
      e >>= 1;
    }
    return Scalar(long(acc));
  }

 private:
  static std::int64_t norm(std::int64_t x) {
    x %= P;
    return x < 0 ? x + P : x;
  }
  std::int64_t v_;
};

#endif  // PHTT_FIELD_PRIME

inline Scalar koszul(bool odd_crossings) { return odd_crossings ? Scalar(-1) : Scalar(1); }

// (-1)^n for mod-2 degree bookkeeping.
inline Scalar sign_pow(long n) { return (n % 2 == 0) ? Scalar(1) : Scalar(-1); }

}  // namespace phtt

#endif  // PHTT_SCALAR_HPP
