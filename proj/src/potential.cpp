#include "cantorlab/potential.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <vector>

#include "cantorlab/coeffs.hpp"
#include "cantorlab/errors.hpp"

namespace cantorlab {

std::string_view to_string(CapacityMethod m) noexcept {
  return m == CapacityMethod::robin_recursion ? "robin-recursion" : "coefficient-extrapolation";
}

CapacityEstimate robin_capacity(const PolySequenceSpec& spec, std::size_t levels) {
  if (levels == 0) throw DomainError("robin recursion needs at least one level");
  const Precision p = spec.precision();
  if (spec.kind() == PolyFamily::quadratic_julia) {
    return {Real(1.0, p), CapacityMethod::robin_recursion, Real::zero(p), false};
  }
  Real sum = Real::zero(p);
  Real max_log = Real::zero(p);
  for (std::size_t k = 1; k <= levels; ++k) {
    const Real l = log(spec.leading_coeff(k));
    sum += ldexp(l, -static_cast<long>(k));
    max_log = max(max_log, l);
  }
  // Omitted tail: sum_{k>levels} 2^-k log lc_k lies in [0, 2^-levels max log lc].
  const Real value = exp(-sum);
  const Real tail = ldexp(max_log, -static_cast<long>(levels));
  return {value, CapacityMethod::robin_recursion, value * -expm1(-tail), false};
}

CapacityEstimate capacity_from_coeffs(const JacobiCoeffs& coeffs, std::size_t n) {
  if (n == 0) throw DomainError("capacity extrapolation needs n >= 1");
  if (n > coeffs.length()) {
    throw LengthError("capacity extrapolation over " + std::to_string(n) + " coefficients, have " +
                      std::to_string(coeffs.length()));
  }
  const Precision p = coeffs.precision_bits();
  std::vector<Real> cum(n + 1, Real::zero(p));  // cum[k] = sum_{i<=k} log a_i
  for (std::size_t k = 1; k <= n; ++k) cum[k] = cum[k - 1] + log(coeffs.a(k));
  auto mean_log = [&](std::size_t k) { return cum[k] / static_cast<double>(k); };
  // One Richardson stage for l_k = L + C/k + ...: mean of log a_i over (k/2, k].
  auto stage = [&](std::size_t k) {
    const std::size_t h = k / 2;
    return (cum[k] - cum[h]) / static_cast<double>(k - h);
  };

  CapacityEstimate est{Real::zero(p), CapacityMethod::coefficient_extrapolation, Real::zero(p),
                       false};
  if (n < 8) {
    est.value = exp(mean_log(n));
    const std::size_t h = std::max<std::size_t>(1, n / 2);
    est.uncertainty = abs(est.value - exp(mean_log(h)));
    return est;
  }
  const Real r_n = stage(n);
  const Real r_h = stage(n / 2);
  const Real r_q = stage(n / 4);
  const Real spread = max(max(r_n, r_h), r_q) - min(min(r_n, r_h), r_q);
  Real u = spread;
  const Real drift = abs(mean_log(n) - r_n);
  if (drift > 10.0 * spread) {
    u = drift;
    est.inflated = true;
  }
  est.value = exp(r_n);
  est.uncertainty = est.value * expm1(u);
  return est;
}

Real TransferMatrix::log_scale() const {
  return ln2(m11.precision()) * static_cast<double>(scale_exponent);
}

Complex TransferMatrix::determinant() const { return m11 * m22 - m12 * m21; }

Real TransferMatrix::log_spectral_norm() const {
  const Real f = norm(m11) + norm(m12) + norm(m21) + norm(m22);
  const Real d = norm(determinant());
  Real disc = f * f - 4.0 * d;
  if (disc.sign() < 0) disc = Real::zero(f.precision());
  const Real sigma2 = ldexp(f + sqrt(disc), -1);
  return log_scale() + ldexp(log(sigma2), -1);
}

namespace {

long max_exponent(const Complex& z, long current) {
  if (!z.re.is_zero()) current = std::max(current, z.re.exponent2());
  if (!z.im.is_zero()) current = std::max(current, z.im.exponent2());
  return current;
}

}  // namespace

TransferMatrix transfer_product(const JacobiCoeffs& coeffs, const Complex& z, std::size_t n) {
  if (n > coeffs.length()) {
    throw LengthError("transfer product of length " + std::to_string(n) + " needs " +
                      std::to_string(n) + " coefficients");
  }
  if (z.im.sign() < 0) throw DomainError("z must lie in the closed upper half-plane");
  const Precision p = std::max(coeffs.precision_bits(), z.precision());
  const Real zero = Real::zero(p), one(1.0, p);
  TransferMatrix m{Complex(one, zero), Complex(zero, zero), Complex(zero, zero),
                   Complex(one, zero), 0};
  Real a_prev = one;
  for (std::size_t k = 1; k <= n; ++k) {
    const Real& ak = coeffs.a(k);
    if (ak.is_zero()) throw DomainError("a_" + std::to_string(k) + " vanishes");
    Complex alpha(z.re - coeffs.b(k), Real(z.im, p));
    alpha = alpha / ak;
    const Real beta = a_prev / ak;
    Complex n11 = alpha * m.m11 - beta * m.m21;
    Complex n12 = alpha * m.m12 - beta * m.m22;
    m.m21 = std::move(m.m11);
    m.m22 = std::move(m.m12);
    m.m11 = std::move(n11);
    m.m12 = std::move(n12);
    a_prev = ak;

    long e = std::numeric_limits<long>::min();
    for (const Complex* c : {&m.m11, &m.m12, &m.m21, &m.m22}) e = max_exponent(*c, e);
    if (e != std::numeric_limits<long>::min() && (e > 16 || e < -16)) {
      for (Complex* c : {&m.m11, &m.m12, &m.m21, &m.m22}) *c = ldexp(*c, -e);
      m.scale_exponent += e;
    }
  }
  return m;
}

Real lyapunov_approx(const JacobiCoeffs& coeffs, const Complex& z, std::size_t n) {
  if (n == 0) throw DomainError("Lyapunov approximation needs n >= 1");
  return transfer_product(coeffs, z, n).log_spectral_norm() / static_cast<double>(n);
}

GreenValue green_julia(const PolySequenceSpec& spec, const Complex& z, std::size_t levels) {
  if (levels == 0) throw DomainError("green function needs at least one level");
  const Precision p = std::max(spec.precision(), z.precision());
  const Real zero = Real::zero(p);
  // w = m * e^L with |m| = 1, or m = 0 and L = 0 when w = 0.
  Complex m(Real(z.re, p), Real(z.im, p));
  Real L = zero;
  {
    const Real r = abs(m);
    if (!r.is_zero()) {
      m = m / r;
      L = log(r);
    }
  }
  for (std::size_t k = 1; k <= levels; ++k) {
    const Real e1 = exp(-L);
    const Real e2 = e1 * e1;
    Complex next = m * m * spec.leading_coeff(k);
    next += m * (spec.linear_coeff(k) * e1);
    next.re += spec.constant_coeff(k) * e2;
    L = ldexp(L, 1);
    const Real r = abs(next);
    if (r.is_zero()) {
      m = Complex(zero, zero);
      L = zero;
    } else {
      m = next / r;
      L += log(r);
    }
  }
  const RegularityWitnesses w = spec.witnesses();
  const Real radius = spec.escape_radius();
  const Real q = 1.0 - w.coeff_ratio / radius - w.coeff_ratio / (radius * radius);
  const Real delta = -log(q);  // bound on |log|f(w) / (lc w^2)|| for |w| >= radius
  const Real tail_lc = ldexp(w.log_growth, 1);
  const Real scale = pow2(-static_cast<long>(levels), p);

  GreenValue g{L * scale, zero, L >= log(radius)};
  if (g.escaped) {
    g.uncertainty = scale * (delta + tail_lc);
  } else {
    g.uncertainty = abs(g.value) + scale * (log(radius) + delta + tail_lc);
  }
  return g;
}

namespace {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Potential of the invariant measure at x, -int log|x - y| d eta(y), by
// recursion over cylinders: far cylinders use the quadrature rule, near ones
// are split until `depth` levels, where the self-energy term takes over.
double eta_potential(double x, const Rule& q, double ratio, double offset2, double energy,
                     int depth) {
  struct Node {
    double o, s, w;
    int d;
  };
  std::vector<Node> stack{{0.0, 1.0, 1.0, 0}};
  double res = 0.0;
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    const double dist = std::max({n.o - x, x - (n.o + n.s), 0.0});
    if (dist >= n.s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < q.x.size(); ++i) {
        acc -= q.w[i] * std::log(std::fabs(x - (n.o + n.s * q.x[i])));
      }
      res += n.w * acc;
    } else if (n.d >= depth) {
      res += n.w * (-std::log(n.s) + energy);
    } else {
      stack.push_back({n.o, n.s * ratio, n.w * 0.5, n.d + 1});
      stack.push_back({n.o + n.s * offset2, n.s * ratio, n.w * 0.5, n.d + 1});
    }
  }
  return res;
}

std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (a[c][c] == 0.0) throw NumericalFailure("singular energy matrix", c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

CapacitySandwich capacity_sandwich(const AffineIFS& ifs, std::size_t level,
                                   std::size_t quadrature_nodes) {
  if (ifs.size() != 2) throw DomainError("capacity sandwich expects two maps");
  const double r = ifs.maps()[0].ratio.to_double();
  const double r2 = ifs.maps()[1].ratio.to_double();
  const double o1 = ifs.maps()[0].offset.to_double();
  const double o2 = ifs.maps()[1].offset.to_double();
  if (!(r > 0 && r < 0.5) || std::fabs(r - r2) > 1e-15 || o1 != 0.0 ||
      std::fabs(o2 - (1.0 - r)) > 1e-15 ||
      std::fabs(ifs.weights()[0].to_double() - 0.5) > 1e-15) {
    throw DomainError("capacity sandwich expects x -> r x and x -> r x + 1 - r, weights 1/2");
  }
  if (level == 0) throw DomainError("sandwich level must be at least 1");

  // Quadrature for the invariant measure: Gauss rule pushed one level.
  const DiscreteMeasure base = ifs_gauss_refine(ifs, quadrature_nodes, 1);
  Rule q;
  for (const Atom& a : base.atoms()) {
    q.x.push_back(a.position.to_double());
    q.w.push_back(a.weight.to_double());
  }
  const double shift = (1.0 - r) / r;
  double e = 0.0;  // int int log|x - y - (1-r)/r|
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    for (std::size_t j = 0; j < q.x.size(); ++j) {
      e += q.w[i] * q.w[j] * std::log(std::fabs(q.x[i] - q.x[j] - shift));
    }
  }
  const double energy = -2.0 * std::log(r) - e;

  std::vector<double> offs{0.0};
  for (std::size_t l = 0; l < level; ++l) {
    std::vector<double> next;
    for (double o : offs) next.push_back(o * r);
    for (double o : offs) next.push_back(o * r + (1.0 - r));
    offs = std::move(next);
  }
  std::sort(offs.begin(), offs.end());
  const double s = std::pow(r, static_cast<double>(level));
  const std::size_t n = offs.size();
  const double self = -static_cast<double>(level) * std::log(r) + energy;

  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        a[i][j] = self;
        continue;
      }
      double acc = 0.0;
      for (std::size_t u = 0; u < q.x.size(); ++u) {
        for (std::size_t v = 0; v < q.x.size(); ++v) {
          acc -= q.w[u] * q.w[v] *
                 std::log(std::fabs(offs[i] + s * q.x[u] - offs[j] - s * q.x[v]));
        }
      }
      a[i][j] = acc;
    }
  }
  std::vector<double> c = solve_dense(a, std::vector<double>(n, 1.0));
  double csum = 0.0;
  for (double v : c) csum += v;
  const double imin = 1.0 / csum;
  for (double& v : c) v *= imin;

  // Attractor sample points: cylinder endpoints four levels deeper.
  std::vector<double> pts{0.0, 1.0};
  for (std::size_t l = 0; l < level + 4; ++l) {
    std::vector<double> next;
    for (double x : pts) next.push_back(x * r);
    for (double x : pts) next.push_back(x * r + (1.0 - r));
    pts = std::move(next);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double umin = INFINITY;
  const double log_s = -static_cast<double>(level) * std::log(r);
  for (std::size_t k = 0; k < pts.size(); k += 3) {
    double u = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      u += c[j] * (log_s + eta_potential((pts[k] - offs[j]) / s, q, r, 1.0 - r, energy, 30));
    }
    umin = std::min(umin, u);
  }
  return {std::exp(-imin), std::exp(-umin), energy, n};
}

}  // namespace cantorlab
