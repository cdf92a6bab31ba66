#pragma once

// Arbitrary-precision real and complex scalars on top of MPFR.
//
// Every Real carries its own precision in bits. Binary operations produce a
// result at the larger of the operand precisions; mixing with machine scalars
// keeps the precision of the Real operand. Values created without an explicit
// precision use the calling thread's default (see ScopedPrecision).

#include <mpfr.h>

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

namespace cantorlab {

using Precision = long;

inline constexpr Precision kDefaultPrecisionBits = 256;
inline constexpr Precision kMinPrecisionBits = 53;

Precision default_precision() noexcept;
void set_default_precision(Precision bits);

/// RAII override of the thread-local default precision.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(Precision bits);
  ~ScopedPrecision();
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  Precision saved_;
};

class Real {
 public:
  Real();
  explicit Real(double v, Precision bits = default_precision());
  template <std::integral I>
  explicit Real(I v, Precision bits = default_precision()) : Real(Uninit{}, bits) {
    if constexpr (std::is_signed_v<I>) {
      mpfr_set_si(v_, static_cast<long>(v), MPFR_RNDN);
    } else {
      mpfr_set_ui(v_, static_cast<unsigned long>(v), MPFR_RNDN);
    }
  }
  /// Rounds `other` to `bits`.
  Real(const Real& other, Precision bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  static Real zero(Precision bits = default_precision());

  Precision precision() const noexcept { return mpfr_get_prec(v_); }
  mpfr_ptr raw() noexcept { return v_; }
  mpfr_srcptr raw() const noexcept { return v_; }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const noexcept { return mpfr_get_si(v_, MPFR_RNDN); }
  int sign() const noexcept { return mpfr_sgn(v_); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  /// Base-2 exponent e with 0.5 <= |x| / 2^e < 1; undefined for zero.
  long exponent2() const noexcept { return mpfr_get_exp(v_); }

  /// Shortest decimal form that round-trips at this precision.
  std::string to_string() const;
  /// Decimal form with a fixed number of significant digits.
  std::string to_string(int significant_digits) const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator+=(double o);
  Real& operator-=(double o);
  Real& operator*=(double o);
  Real& operator/=(double o);

  Real operator-() const;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator+(const Real& a, double b);
  friend Real operator-(const Real& a, double b);
  friend Real operator*(const Real& a, double b);
  friend Real operator/(const Real& a, double b);
  friend Real operator+(double a, const Real& b);
  friend Real operator-(double a, const Real& b);
  friend Real operator*(double a, const Real& b);
  friend Real operator/(double a, const Real& b);

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, double b);

 private:
  struct Uninit {};
  Real(Uninit, Precision bits);

  mpfr_t v_;
};

std::ostream& operator<<(std::ostream& os, const Real& x);

/// Parses a decimal/scientific literal or an exact ratio "p/q" at `bits`.
/// Throws DomainError on malformed input.
Real parse_real(std::string_view text, Precision bits = default_precision());

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real exp(const Real& x);
Real expm1(const Real& x);
Real pow(const Real& base, const Real& e);
Real pow(const Real& base, long e);
Real hypot(const Real& x, const Real& y);
/// Exact multiplication by 2^k.
Real ldexp(const Real& x, long k);
Real fma(const Real& a, const Real& b, const Real& c);
Real atan2(const Real& y, const Real& x);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real pi(Precision bits = default_precision());
Real ln2(Precision bits = default_precision());

/// 2^e at the given precision.
Real pow2(long e, Precision bits = default_precision());

/// Number of decimal digits needed for a lossless round trip at `bits`.
int round_trip_digits(Precision bits);

struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(Real r) : re(std::move(r)), im(Real::zero(re.precision())) {}

  Precision precision() const noexcept { return std::max(re.precision(), im.precision()); }

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator*=(const Real& s);

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator*(Complex a, const Real& s) { return a *= s; }
  friend Complex operator*(const Real& s, Complex a) { return a *= s; }
  friend Complex operator/(const Complex& a, const Complex& b);
  friend Complex operator/(const Complex& a, const Real& s);
  Complex operator-() const { return Complex(-re, -im); }
};

/// |z|^2
Real norm(const Complex& z);
Real abs(const Complex& z);
/// Exact multiplication by 2^k.
Complex ldexp(const Complex& z, long k);
Complex parse_complex(std::string_view re, std::string_view im,
                      Precision bits = default_precision());

}  // namespace cantorlab
