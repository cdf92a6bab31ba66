#include "cantorlab/bigfloat.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>

#include "cantorlab/errors.hpp"

namespace cantorlab {

namespace {

thread_local Precision tls_default_precision = kDefaultPrecisionBits;

Precision max_prec(const Real& a, const Real& b) {
  return std::max(a.precision(), b.precision());
}

std::string trim(std::string_view s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return std::string(s.substr(lo, hi - lo));
}

}  // namespace

Precision default_precision() noexcept { return tls_default_precision; }

void set_default_precision(Precision bits) {
  if (bits < kMinPrecisionBits) {
    throw DomainError("precision must be at least " + std::to_string(kMinPrecisionBits) + " bits");
  }
  tls_default_precision = bits;
}

ScopedPrecision::ScopedPrecision(Precision bits) : saved_(tls_default_precision) {
  set_default_precision(bits);
}

ScopedPrecision::~ScopedPrecision() { tls_default_precision = saved_; }

Real::Real(Uninit, Precision bits) { mpfr_init2(v_, bits); }

Real::Real() : Real(Uninit{}, default_precision()) { mpfr_set_zero(v_, 1); }

Real::Real(double v, Precision bits) : Real(Uninit{}, bits) { mpfr_set_d(v_, v, MPFR_RNDN); }

Real::Real(const Real& other, Precision bits) : Real(Uninit{}, bits) {
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(const Real& other) : Real(Uninit{}, other.precision()) {
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    if (precision() != other.precision()) mpfr_set_prec(v_, other.precision());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::zero(Precision bits) {
  Real r(Uninit{}, bits);
  mpfr_set_zero(r.v_, 1);
  return r;
}

int round_trip_digits(Precision bits) {
  return 1 + static_cast<int>(std::ceil(static_cast<double>(bits) * 0.30102999566398120));
}

std::string Real::to_string() const { return to_string(round_trip_digits(precision())); }

std::string Real::to_string(int significant_digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(v_)) return "0";
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", significant_digits - 1, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Real& Real::operator+=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator+=(double o) {
  mpfr_add_d(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(double o) {
  mpfr_sub_d(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(double o) {
  mpfr_mul_d(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(double o) {
  mpfr_div_d(v_, v_, o, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(Uninit{}, precision());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

#define CANTORLAB_BINOP(OP, FN, FN_D, FN_D_LHS)                   \
  Real operator OP(const Real& a, const Real& b) {               \
    Real r(Real::Uninit{}, max_prec(a, b));                      \
    FN(r.v_, a.v_, b.v_, MPFR_RNDN);                             \
    return r;                                                    \
  }                                                              \
  Real operator OP(const Real& a, double b) {                    \
    Real r(Real::Uninit{}, a.precision());                       \
    FN_D(r.v_, a.v_, b, MPFR_RNDN);                              \
    return r;                                                    \
  }                                                              \
  Real operator OP(double a, const Real& b) {                    \
    Real r(Real::Uninit{}, b.precision());                       \
    FN_D_LHS;                                                    \
    return r;                                                    \
  }

CANTORLAB_BINOP(+, mpfr_add, mpfr_add_d, mpfr_add_d(r.v_, b.v_, a, MPFR_RNDN))
CANTORLAB_BINOP(-, mpfr_sub, mpfr_sub_d, mpfr_d_sub(r.v_, a, b.v_, MPFR_RNDN))
CANTORLAB_BINOP(*, mpfr_mul, mpfr_mul_d, mpfr_mul_d(r.v_, b.v_, a, MPFR_RNDN))
CANTORLAB_BINOP(/, mpfr_div, mpfr_div_d, mpfr_d_div(r.v_, a, b.v_, MPFR_RNDN))

#undef CANTORLAB_BINOP

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.v_, b.v_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const Real& a, double b) {
  if (mpfr_nan_p(a.v_) || std::isnan(b)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_d(a.v_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_string(); }

Real parse_real(std::string_view text, Precision bits) {
  const std::string s = trim(text);
  if (s.empty()) throw DomainError("empty numeric literal");
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    Real num = parse_real(std::string_view(s).substr(0, slash), bits + 64);
    Real den = parse_real(std::string_view(s).substr(slash + 1), bits + 64);
    if (den.is_zero()) throw DomainError("zero denominator in '" + s + "'");
    Real r = Real::zero(bits);
    mpfr_div(r.raw(), num.raw(), den.raw(), MPFR_RNDN);
    return r;
  }
  Real r = Real::zero(bits);
  char* end = nullptr;
  if (mpfr_strtofr(r.raw(), s.c_str(), &end, 10, MPFR_RNDN), end == s.c_str() || *end != '\0') {
    throw DomainError("malformed numeric literal '" + s + "'");
  }
  return r;
}

Real abs(const Real& x) {
  Real r = Real::zero(x.precision());
  mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

#define CANTORLAB_UNARY(NAME, FN)                 \
  Real NAME(const Real& x) {                      \
    Real r = Real::zero(x.precision());           \
    FN(r.raw(), x.raw(), MPFR_RNDN);              \
    return r;                                     \
  }

CANTORLAB_UNARY(sqrt, mpfr_sqrt)
CANTORLAB_UNARY(log, mpfr_log)
CANTORLAB_UNARY(log1p, mpfr_log1p)
CANTORLAB_UNARY(exp, mpfr_exp)
CANTORLAB_UNARY(expm1, mpfr_expm1)

#undef CANTORLAB_UNARY

Real pow(const Real& base, const Real& e) {
  Real r = Real::zero(max_prec(base, e));
  mpfr_pow(r.raw(), base.raw(), e.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& base, long e) {
  Real r = Real::zero(base.precision());
  mpfr_pow_si(r.raw(), base.raw(), e, MPFR_RNDN);
  return r;
}

Real hypot(const Real& x, const Real& y) {
  Real r = Real::zero(max_prec(x, y));
  mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long k) {
  Real r = Real::zero(x.precision());
  mpfr_mul_2si(r.raw(), x.raw(), k, MPFR_RNDN);
  return r;
}

Real fma(const Real& a, const Real& b, const Real& c) {
  Real r = Real::zero(std::max({a.precision(), b.precision(), c.precision()}));
  mpfr_fma(r.raw(), a.raw(), b.raw(), c.raw(), MPFR_RNDN);
  return r;
}

Real atan2(const Real& y, const Real& x) {
  Real r = Real::zero(max_prec(x, y));
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real pi(Precision bits) {
  Real r = Real::zero(bits);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

Real ln2(Precision bits) {
  Real r = Real::zero(bits);
  mpfr_const_log2(r.raw(), MPFR_RNDN);
  return r;
}

Real pow2(long e, Precision bits) {
  Real r = Real::zero(bits);
  mpfr_set_ui_2exp(r.raw(), 1, e, MPFR_RNDN);
  return r;
}

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  Real i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex& Complex::operator*=(const Real& s) {
  re *= s;
  im *= s;
  return *this;
}

Complex operator/(const Complex& a, const Complex& b) {
  const Real d = norm(b);
  return Complex((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
}

Complex operator/(const Complex& a, const Real& s) { return Complex(a.re / s, a.im / s); }

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real abs(const Complex& z) { return hypot(z.re, z.im); }

Complex ldexp(const Complex& z, long k) { return Complex(ldexp(z.re, k), ldexp(z.im, k)); }

Complex parse_complex(std::string_view re, std::string_view im, Precision bits) {
  return Complex(parse_real(re, bits), parse_real(im, bits));
}

}  // namespace cantorlab
