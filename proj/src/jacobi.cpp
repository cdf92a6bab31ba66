#include "cantorlab/jacobi.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "cantorlab/errors.hpp"
#include "cantorlab/parallel.hpp"

namespace cantorlab {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::exact_recursion:
      return "exact-recursion";
    case Provenance::lanczos:
      return "lanczos";
    case Provenance::chebyshev_moments:
      return "chebyshev-moments";
  }
  return "exact-recursion";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "exact-recursion") return Provenance::exact_recursion;
  if (s == "lanczos") return Provenance::lanczos;
  if (s == "chebyshev-moments") return Provenance::chebyshev_moments;
  throw DomainError("unknown provenance '" + std::string(s) + "'");
}

JacobiCoeffs::JacobiCoeffs(std::vector<Real> a, std::vector<Real> b, Precision bits,
                           Provenance provenance)
    : a_(std::move(a)), b_(std::move(b)), bits_(bits), provenance_(provenance) {
  if (a_.size() != b_.size()) {
    throw LengthError("coefficient sequences differ in length (" + std::to_string(a_.size()) +
                      " vs " + std::to_string(b_.size()) + ")");
  }
  if (bits_ < kMinPrecisionBits) throw DomainError("precision below 53 bits");
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] > 0.0)) {
      throw DomainError("off-diagonal coefficient a_" + std::to_string(i + 1) +
                        " is not positive");
    }
    if (!b_[i].is_finite()) {
      throw DomainError("diagonal coefficient b_" + std::to_string(i + 1) + " is not finite");
    }
  }
}

const Real& JacobiCoeffs::a(std::size_t n) const {
  if (n == 0 || n > a_.size()) {
    throw LengthError("a_" + std::to_string(n) + " requested from " + std::to_string(a_.size()) +
                      " coefficients");
  }
  return a_[n - 1];
}

const Real& JacobiCoeffs::b(std::size_t n) const {
  if (n == 0 || n > b_.size()) {
    throw LengthError("b_" + std::to_string(n) + " requested from " + std::to_string(b_.size()) +
                      " coefficients");
  }
  return b_[n - 1];
}

JacobiCoeffs JacobiCoeffs::prefix(std::size_t n) const {
  if (n > length()) {
    throw LengthError("prefix of " + std::to_string(n) + " from " + std::to_string(length()) +
                      " coefficients");
  }
  return JacobiCoeffs(std::vector<Real>(a_.begin(), a_.begin() + static_cast<long>(n)),
                      std::vector<Real>(b_.begin(), b_.begin() + static_cast<long>(n)), bits_,
                      provenance_);
}

PolyEvalResult eval_orthonormal(const JacobiCoeffs& coeffs, const Real& x, std::size_t n) {
  if (n > coeffs.length()) {
    throw LengthError("P_" + std::to_string(n) + " needs " + std::to_string(n) +
                      " coefficients, have " + std::to_string(coeffs.length()));
  }
  const Precision p = std::max(coeffs.precision_bits(), x.precision());
  PolyEvalResult out{Real(x, p), {}, Real::zero(p)};
  out.values.reserve(n + 1);
  out.values.emplace_back(1.0, p);
  Real prev = Real::zero(p);
  Real scale(1.0, p);
  Real t = Real::zero(p);
  for (std::size_t k = 0; k < n; ++k) {
    const Real& cur = out.values[k];
    // a_{k+1} P_{k+1} = (x - b_{k+1}) P_k - a_k P_{k-1}, with a_0 P_{-1} = 0.
    Real rhs = (out.x - coeffs.b(k + 1)) * cur;
    if (k > 0) rhs -= coeffs.a(k) * prev;
    Real next = rhs / coeffs.a(k + 1);

    Real lhs_a = coeffs.a(k + 1) * next;
    Real lhs_b = coeffs.b(k + 1) * cur;
    Real lhs_c = k > 0 ? coeffs.a(k) * prev : Real::zero(p);
    Real xp = out.x * cur;
    for (const Real* term : {&lhs_a, &lhs_b, &lhs_c, &xp}) {
      mpfr_abs(t.raw(), term->raw(), MPFR_RNDN);
      if (t > scale) scale = t;
    }
    Real r = abs(lhs_a + lhs_b + lhs_c - xp) / scale;
    if (r > out.relative_residual) out.relative_residual = r;

    prev = cur;
    out.values.push_back(std::move(next));
  }
  return out;
}

Real log_monic_norm(const JacobiCoeffs& coeffs, std::size_t n) {
  if (n > coeffs.length()) {
    throw LengthError("monic norm of order " + std::to_string(n) + " needs " +
                      std::to_string(n) + " coefficients");
  }
  Real s = Real::zero(coeffs.precision_bits());
  Real t = Real::zero(coeffs.precision_bits());
  for (std::size_t k = 1; k <= n; ++k) {
    mpfr_log(t.raw(), coeffs.a(k).raw(), MPFR_RNDN);
    s += t;
  }
  return s;
}

Real monic_norm(const JacobiCoeffs& coeffs, std::size_t n) {
  if (n > 64) return exp(log_monic_norm(coeffs, n));
  if (n > coeffs.length()) {
    throw LengthError("monic norm of order " + std::to_string(n) + " needs " +
                      std::to_string(n) + " coefficients");
  }
  Real s(1.0, coeffs.precision_bits());
  for (std::size_t k = 1; k <= n; ++k) s *= coeffs.a(k);
  return s;
}

namespace {

// Sturm count in double: number of eigenvalues strictly below x.
std::size_t sturm_count_double(const std::vector<double>& d, const std::vector<double>& e2,
                               double pivmin, double x) {
  std::size_t count = 0;
  double q = d[0] - x;
  if (std::fabs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    q = d[i] - x - e2[i - 1] / q;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

struct HighPrecisionTridiag {
  std::vector<Real> d;
  std::vector<Real> e2;
  Real pivmin;
  Precision bits;

  std::size_t count(const Real& x, Real& q, Real& t) const {
    std::size_t c = 0;
    mpfr_sub(q.raw(), d[0].raw(), x.raw(), MPFR_RNDN);
    if (mpfr_cmpabs(q.raw(), pivmin.raw()) < 0) mpfr_neg(q.raw(), pivmin.raw(), MPFR_RNDN);
    if (q.sign() < 0) ++c;
    for (std::size_t i = 1; i < d.size(); ++i) {
      mpfr_div(t.raw(), e2[i - 1].raw(), q.raw(), MPFR_RNDN);
      mpfr_sub(q.raw(), d[i].raw(), x.raw(), MPFR_RNDN);
      mpfr_sub(q.raw(), q.raw(), t.raw(), MPFR_RNDN);
      if (mpfr_cmpabs(q.raw(), pivmin.raw()) < 0) mpfr_neg(q.raw(), pivmin.raw(), MPFR_RNDN);
      if (q.sign() < 0) ++c;
    }
    return c;
  }

  // Newton correction -det/det' evaluated through the LDL^T pivots, which
  // keeps every quantity bounded regardless of n.
  Real newton_step(const Real& x) const {
    Real q = Real::zero(bits), dq(-1.0, bits), s = Real::zero(bits);
    Real t = Real::zero(bits), u = Real::zero(bits);
    mpfr_sub(q.raw(), d[0].raw(), x.raw(), MPFR_RNDN);
    if (mpfr_cmpabs(q.raw(), pivmin.raw()) < 0) mpfr_set(q.raw(), pivmin.raw(), MPFR_RNDN);
    mpfr_div(s.raw(), dq.raw(), q.raw(), MPFR_RNDN);
    for (std::size_t i = 1; i < d.size(); ++i) {
      mpfr_div(t.raw(), e2[i - 1].raw(), q.raw(), MPFR_RNDN);  // t = e^2/q
      mpfr_div(u.raw(), dq.raw(), q.raw(), MPFR_RNDN);         // u = dq/q
      mpfr_mul(u.raw(), u.raw(), t.raw(), MPFR_RNDN);
      mpfr_sub_ui(dq.raw(), u.raw(), 1, MPFR_RNDN);  // dq_i = -1 + (e^2/q) dq/q
      mpfr_sub(q.raw(), d[i].raw(), x.raw(), MPFR_RNDN);
      mpfr_sub(q.raw(), q.raw(), t.raw(), MPFR_RNDN);
      if (mpfr_cmpabs(q.raw(), pivmin.raw()) < 0) mpfr_set(q.raw(), pivmin.raw(), MPFR_RNDN);
      mpfr_div(u.raw(), dq.raw(), q.raw(), MPFR_RNDN);
      mpfr_add(s.raw(), s.raw(), u.raw(), MPFR_RNDN);
    }
    Real step(-1.0, bits);
    mpfr_div(step.raw(), step.raw(), s.raw(), MPFR_RNDN);
    return step;
  }
};

constexpr int kNewtonCap = 12;
constexpr long kCertifyGuardBits = 16;
constexpr long kDuplicateGuardBits = 20;

}  // namespace

std::vector<Real> tridiagonal_eigenvalues(const std::vector<Real>& diag,
                                          const std::vector<Real>& offdiag, Precision bits) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (offdiag.size() + 1 != n) throw LengthError("off-diagonal must have n-1 entries");
  if (n == 1) return {Real(diag[0], bits)};

  HighPrecisionTridiag hp{{}, {}, Real::zero(bits), bits};
  hp.d.reserve(n);
  hp.e2.reserve(n - 1);
  for (const Real& v : diag) hp.d.emplace_back(v, bits);
  for (std::size_t i = 0; i < n - 1; ++i) {
    if (offdiag[i].is_zero()) {
      throw DomainError("zero off-diagonal entry " + std::to_string(i + 1) +
                        " makes the matrix reducible");
    }
    Real e(offdiag[i], bits);
    hp.e2.push_back(e * e);
  }

  // Gershgorin interval and a scale for absolute tolerances.
  Real lo = Real::zero(bits), hi = Real::zero(bits), scale = Real::zero(bits);
  std::vector<double> dd(n), ee2(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    Real r = Real::zero(bits);
    if (i > 0) r += abs(offdiag[i - 1]);
    if (i + 1 < n) r += abs(offdiag[i]);
    Real l = hp.d[i] - r, h = hp.d[i] + r;
    if (i == 0 || l < lo) lo = l;
    if (i == 0 || h > hi) hi = h;
    dd[i] = hp.d[i].to_double();
    if (i + 1 < n) ee2[i] = hp.e2[i].to_double();
  }
  scale = max(abs(lo), abs(hi));
  if (scale.is_zero()) scale = Real(1.0, bits);
  hp.pivmin = pow2(-bits - 8, bits) * scale;
  const Real cert_tol = pow2(-bits + kCertifyGuardBits, bits) * scale;
  const Real newton_tol = pow2(-bits + 8, bits) * scale;

  double e2max = 0.0;
  for (double v : ee2) e2max = std::max(e2max, v);
  const double dpivmin = DBL_MIN * std::max(1.0, e2max);
  const double dlo = lo.to_double() - 1e-12 * scale.to_double();
  const double dhi = hi.to_double() + 1e-12 * scale.to_double();

  std::vector<Real> out(n, Real::zero(bits));
  parallel_for(n, [&](std::size_t i) {
    // Coarse double-precision bisection for the i-th eigenvalue.
    double a = dlo, b = dhi;
    for (int it = 0; it < 200 && b - a > 4 * DBL_EPSILON * std::max(std::fabs(a), std::fabs(b));
         ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      if (sturm_count_double(dd, ee2, dpivmin, m) > i) {
        b = m;
      } else {
        a = m;
      }
    }
    Real x(0.5 * (a + b), bits);

    Real q = Real::zero(bits), t = Real::zero(bits);
    auto certified = [&](const Real& c) {
      return hp.count(c - cert_tol, q, t) == i && hp.count(c + cert_tol, q, t) == i + 1;
    };

    bool ok = false;
    {
      Real y = x;
      for (int it = 0; it < kNewtonCap; ++it) {
        Real step = hp.newton_step(y);
        if (!step.is_finite()) break;
        y += step;
        if (abs(step) <= newton_tol) break;
      }
      if (y.is_finite() && certified(y)) {
        x = std::move(y);
        ok = true;
      }
    }
    if (!ok) {
      // Fallback: full bisection at working precision.
      Real l = lo - cert_tol, h = hi + cert_tol;
      const long cap = 4 * bits + 256;
      long it = 0;
      while (h - l > cert_tol) {
        if (++it > cap) throw NumericalFailure("eigenvalue bisection did not converge", i);
        Real m = ldexp(l + h, -1);
        if (hp.count(m, q, t) > i) {
          h = std::move(m);
        } else {
          l = std::move(m);
        }
      }
      x = ldexp(l + h, -1);
    }
    out[i] = std::move(x);
  });

  const Real dup_tol = pow2(-bits + kDuplicateGuardBits, bits) * scale;
  for (std::size_t i = 1; i < n; ++i) {
    if (out[i] - out[i - 1] <= dup_tol) {
      throw NumericalFailure("eigenvalues coincide at working precision", i);
    }
  }
  return out;
}

SpectrumSample perturbed_truncation_spectrum(const JacobiCoeffs& coeffs, const Real& beta,
                                             std::size_t drop_first, std::size_t n) {
  if (drop_first > 1) throw DomainError("drop_first must be 0 or 1");
  if (n + drop_first > coeffs.length()) {
    throw LengthError("truncation of order " + std::to_string(n) + " after dropping " +
                      std::to_string(drop_first) + " rows needs " +
                      std::to_string(n + drop_first) + " coefficients, have " +
                      std::to_string(coeffs.length()));
  }
  const Precision p = std::max(coeffs.precision_bits(), beta.precision());
  SpectrumSample s;
  s.n = n;
  s.perturbation_beta = Real(beta, p);
  s.dropped_rows = drop_first;
  if (n == 0) return s;
  std::vector<Real> d, e;
  d.reserve(n);
  e.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) d.emplace_back(coeffs.b(k + drop_first), p);
  d[0] += beta;
  for (std::size_t k = 1; k < n; ++k) e.emplace_back(coeffs.a(k + drop_first), p);
  s.eigenvalues = tridiagonal_eigenvalues(d, e, p);
  return s;
}

SpectrumSample truncation_zeros(const JacobiCoeffs& coeffs, std::size_t n) {
  return perturbed_truncation_spectrum(coeffs, Real::zero(coeffs.precision_bits()), 0, n);
}

DiscreteMeasure dos_measure(const JacobiCoeffs& coeffs, std::size_t n) {
  if (n == 0) throw DomainError("density of states needs n >= 1");
  SpectrumSample s = truncation_zeros(coeffs, n);
  const Precision p = coeffs.precision_bits();
  Real w(1.0, p);
  w /= Real(static_cast<unsigned long>(n), p);
  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (Real& x : s.eigenvalues) atoms.push_back({std::move(x), w});
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure gauss_rule(const JacobiCoeffs& coeffs, std::size_t k) {
  if (k == 0) throw DomainError("a Gauss rule needs at least one node");
  SpectrumSample s = truncation_zeros(coeffs, k);
  const Precision p = coeffs.precision_bits();
  std::vector<Atom> atoms;
  atoms.reserve(k);
  for (Real& x : s.eigenvalues) {
    PolyEvalResult v = eval_orthonormal(coeffs, x, k - 1);
    Real sum = Real::zero(p);
    for (const Real& pv : v.values) sum += pv * pv;
    atoms.push_back({std::move(x), Real(1.0, p) / sum});
  }
  return DiscreteMeasure(std::move(atoms));
}

}  // namespace cantorlab
