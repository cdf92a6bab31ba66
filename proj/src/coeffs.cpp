#include "cantorlab/coeffs.hpp"

#include <algorithm>

#include "cantorlab/errors.hpp"

namespace cantorlab {

JacobiCoeffs julia_exact_coeffs(const Real& c, std::size_t n) {
  if (!(c > 2.0)) throw DomainError("c must exceed 2");
  if (n == 0) throw DomainError("at least one coefficient must be requested");
  const Precision p = c.precision();
  std::vector<Real> sq(n + 1, Real::zero(p));  // sq[k] = a_k^2, 1-based
  sq[1] = c;
  for (std::size_t k = 2; k <= n; ++k) {
    if (k % 2 == 0) {
      mpfr_div(sq[k].raw(), sq[k / 2].raw(), sq[k - 1].raw(), MPFR_RNDN);
    } else {
      mpfr_sub(sq[k].raw(), c.raw(), sq[k - 1].raw(), MPFR_RNDN);
    }
    if (!(sq[k] > 0.0) || !(sq[k] < c)) {
      throw ConsistencyError("squared coefficient left (0, c); precision exhausted", k);
    }
  }
  std::vector<Real> a, b;
  a.reserve(n);
  b.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    a.push_back(sqrt(sq[k]));
    b.push_back(Real::zero(p));
  }
  return JacobiCoeffs(std::move(a), std::move(b), p, Provenance::exact_recursion);
}

namespace {

// Inner product sum_i w_i f_i g_i with raw MPFR calls.
void weighted_dot(const std::vector<Real>& w, const std::vector<Real>& f,
                  const std::vector<Real>& g, Real& out, Real& t) {
  mpfr_set_zero(out.raw(), 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    mpfr_mul(t.raw(), w[i].raw(), f[i].raw(), MPFR_RNDN);
    mpfr_fma(out.raw(), t.raw(), g[i].raw(), out.raw(), MPFR_RNDN);
  }
}

}  // namespace

JacobiCoeffs lanczos_from_discrete(const DiscreteMeasure& measure, std::size_t n,
                                   const LanczosOptions& options) {
  const DiscreteMeasure m = measure.coalesced();
  const std::size_t atoms = m.size();
  if (n >= atoms) {
    throw LengthError("requested " + std::to_string(n) + " coefficients from a measure with " +
                      std::to_string(atoms) + " distinct atoms");
  }
  Precision p = 0;
  for (const Atom& a : m.atoms()) {
    p = std::max({p, a.position.precision(), a.weight.precision()});
  }
  if (n == 0) return JacobiCoeffs({}, {}, p, Provenance::lanczos);

  const Real& lo = m.atoms().front().position;
  const Real& hi = m.atoms().back().position;
  const Real center(ldexp(lo + hi, -1), p);
  const Real spread = max(hi - lo, Real(1.0, p));

  bool symmetric = false;
  if (options.exploit_symmetry) {
    const Real tol = pow2(-p + 16, p) * max(spread, abs(center));
    Real wmax = Real::zero(p);
    for (const Atom& a : m.atoms()) wmax = max(wmax, a.weight);
    const Real wtol = pow2(-p + 16, p) * wmax;
    symmetric = true;
    for (std::size_t i = 0; i < atoms / 2 && symmetric; ++i) {
      const Atom& l = m[i];
      const Atom& r = m[atoms - 1 - i];
      symmetric = abs(l.position + r.position - 2.0 * center) <= tol &&
                  abs(l.weight - r.weight) <= wtol;
    }
    if (symmetric && atoms % 2 == 1) symmetric = abs(m[atoms / 2].position - center) <= tol;
  }

  std::vector<Real> y, w;
  if (symmetric) {
    const std::size_t half = (atoms + 1) / 2;
    y.reserve(half);
    w.reserve(half);
    for (std::size_t i = 0; i < atoms / 2; ++i) {
      const Atom& l = m[i];
      const Atom& r = m[atoms - 1 - i];
      y.push_back(Real(ldexp(l.position - r.position, -1), p));
      w.push_back(Real(l.weight + r.weight, p));
    }
    if (atoms % 2 == 1) {
      y.push_back(Real::zero(p));
      w.push_back(Real(m[atoms / 2].weight, p));
    }
  } else {
    y.reserve(atoms);
    w.reserve(atoms);
    for (const Atom& a : m.atoms()) {
      y.push_back(Real(a.position - center, p));
      w.push_back(Real(a.weight, p));
    }
  }
  const std::size_t len = y.size();

  std::vector<Real> wy;
  if (!symmetric) {
    wy.reserve(len);
    for (std::size_t i = 0; i < len; ++i) wy.push_back(w[i] * y[i]);
  }

  Real t = Real::zero(p), s = Real::zero(p), u = Real::zero(p);
  Real total = Real::zero(p);
  for (const Real& wi : w) total += wi;
  std::vector<Real> prev(len, Real::zero(p));
  std::vector<Real> cur(len, Real(1.0, p) / sqrt(total));
  std::vector<Real> v(len, Real::zero(p));
  std::vector<std::vector<Real>> basis;
  const bool full = options.reorthogonalization == Reorthogonalization::full;
  if (full) basis.push_back(cur);

  const Real floor = pow2(-p + 32, p) * spread;
  Real a_prev = Real::zero(p);
  std::vector<Real> a_out, b_out;
  a_out.reserve(n);
  b_out.reserve(n);

  for (std::size_t k = 0; k < n; ++k) {
    Real bk = Real::zero(p);
    if (!symmetric) {
      mpfr_set_zero(s.raw(), 1);
      for (std::size_t i = 0; i < len; ++i) {
        mpfr_mul(t.raw(), cur[i].raw(), cur[i].raw(), MPFR_RNDN);
        mpfr_fma(s.raw(), t.raw(), wy[i].raw(), s.raw(), MPFR_RNDN);
      }
      bk = s;
    }
    for (std::size_t i = 0; i < len; ++i) {
      mpfr_sub(t.raw(), y[i].raw(), bk.raw(), MPFR_RNDN);
      mpfr_fmms(v[i].raw(), t.raw(), cur[i].raw(), a_prev.raw(), prev[i].raw(), MPFR_RNDN);
    }
    if (full) {
      // Two passes of classical Gram-Schmidt; under symmetry only vectors of
      // the same parity as v can overlap it.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
          if (symmetric && (j % 2) != ((k + 1) % 2)) continue;
          weighted_dot(w, v, basis[j], s, t);
          for (std::size_t i = 0; i < len; ++i) {
            mpfr_mul(u.raw(), s.raw(), basis[j][i].raw(), MPFR_RNDN);
            mpfr_sub(v[i].raw(), v[i].raw(), u.raw(), MPFR_RNDN);
          }
        }
      }
    }
    weighted_dot(w, v, v, s, t);
    if (!(s > 0.0)) throw NumericalFailure("norm lost positivity; precision exhausted", k + 1);
    Real ak = sqrt(s);
    if (ak <= floor) throw NumericalFailure("norm collapsed below working precision", k + 1);

    Real inv = Real(1.0, p) / ak;
    std::swap(prev, cur);
    for (std::size_t i = 0; i < len; ++i) mpfr_mul(cur[i].raw(), v[i].raw(), inv.raw(), MPFR_RNDN);
    if (full) basis.push_back(cur);

    b_out.push_back(center + bk);
    a_out.push_back(ak);
    a_prev = std::move(ak);
  }
  return JacobiCoeffs(std::move(a_out), std::move(b_out), p, Provenance::lanczos);
}

JacobiCoeffs chebyshev_from_moments(const MomentVector& moments, std::size_t n) {
  if (n == 0) {
    return JacobiCoeffs({}, {}, moments.moments.empty() ? default_precision()
                                                        : moments[0].precision(),
                        Provenance::chebyshev_moments);
  }
  if (moments.moments.size() < 2 * n + 1) {
    throw LengthError(std::to_string(n) + " coefficients need moments up to order " +
                      std::to_string(2 * n) + ", have order " + std::to_string(moments.order()));
  }
  const Precision p = moments[0].precision();
  if (!(moments[0] > 0.0)) throw NumericalFailure("zeroth moment is not positive", 0);
  const std::size_t L = 2 * n + 1;
  std::vector<Real> sig_prev(L, Real::zero(p));  // sigma_{k-2, l}
  std::vector<Real> sig_cur;                      // sigma_{k-1, l}
  sig_cur.reserve(L);
  for (std::size_t l = 0; l < L; ++l) sig_cur.emplace_back(moments[l], p);

  std::vector<Real> alpha{sig_cur[1] / sig_cur[0]};
  std::vector<Real> beta{sig_cur[0]};
  std::vector<Real> a_out, b_out;
  b_out.push_back(alpha[0]);

  Real t = Real::zero(p);
  const Real rel_floor = pow2(-p + 16, p);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<Real> sig_next(L, Real::zero(p));
    for (std::size_t l = k; l + k <= 2 * n; ++l) {
      Real& out = sig_next[l];
      mpfr_mul(t.raw(), alpha[k - 1].raw(), sig_cur[l].raw(), MPFR_RNDN);
      mpfr_sub(out.raw(), sig_cur[l + 1].raw(), t.raw(), MPFR_RNDN);
      mpfr_mul(t.raw(), beta[k - 1].raw(), sig_prev[l].raw(), MPFR_RNDN);
      mpfr_sub(out.raw(), out.raw(), t.raw(), MPFR_RNDN);
    }
    if (!(sig_next[k] > 0.0)) {
      throw NumericalFailure("Hankel pivot is not positive; precision exhausted", k);
    }
    Real bk = sig_next[k] / sig_cur[k - 1];
    Real scale = max(Real(1.0, p), max(abs(alpha[k - 1]), beta[k - 1]));
    if (bk <= rel_floor * scale) {
      throw NumericalFailure("Hankel pivot vanished at working precision", k);
    }
    a_out.push_back(sqrt(bk));
    beta.push_back(std::move(bk));
    if (k < n) {
      alpha.push_back(sig_next[k + 1] / sig_next[k] - sig_cur[k] / sig_cur[k - 1]);
      b_out.push_back(alpha.back());
    }
    sig_prev = std::move(sig_cur);
    sig_cur = std::move(sig_next);
  }
  return JacobiCoeffs(std::move(a_out), std::move(b_out), p, Provenance::chebyshev_moments);
}

CrossValidationReport cross_validate(const JacobiCoeffs& lhs, const JacobiCoeffs& rhs,
                                     std::size_t n, const Real& tol) {
  if (n > lhs.length() || n > rhs.length()) {
    throw LengthError("cross-validation over " + std::to_string(n) + " entries exceeds " +
                      std::to_string(std::min(lhs.length(), rhs.length())));
  }
  const Precision p = std::max(lhs.precision_bits(), rhs.precision_bits());
  CrossValidationReport r{n, Real::zero(p), Real::zero(p), std::nullopt};
  for (std::size_t k = 1; k <= n; ++k) {
    Real da = abs(lhs.a(k) - rhs.a(k));
    Real db = abs(lhs.b(k) - rhs.b(k));
    if (!r.first_divergence_index && (da > tol || db > tol)) r.first_divergence_index = k;
    if (da > r.max_abs_dev_a) r.max_abs_dev_a = std::move(da);
    if (db > r.max_abs_dev_b) r.max_abs_dev_b = std::move(db);
  }
  return r;
}

EscalationResult chebyshev_escalated(const std::function<MomentVector(Precision)>& moments,
                                     std::size_t n, const Real& tol, const JacobiCoeffs* reference,
                                     Precision max_bits) {
  Precision bits = std::max<Precision>(256, static_cast<Precision>(8 * n));
  int attempts = 0;
  while (bits <= max_bits) {
    ++attempts;
    try {
      JacobiCoeffs c = chebyshev_from_moments(moments(bits), n);
      bool agree = false;
      if (reference != nullptr) {
        const std::size_t m = std::min(n, reference->length());
        agree = !cross_validate(c, *reference, m, tol).first_divergence_index;
      } else if (2 * bits <= max_bits) {
        JacobiCoeffs check = chebyshev_from_moments(moments(2 * bits), n);
        agree = !cross_validate(c, check, n, tol).first_divergence_index;
      }
      if (agree) return {std::move(c), bits, attempts};
    } catch (const NumericalFailure&) {
      // Pivot breakdown: retry at higher precision.
    }
    bits *= 2;
  }
  throw NumericalFailure("moment route did not stabilize below " + std::to_string(max_bits) +
                             " bits",
                         n);
}

std::size_t trusted_prefix(std::size_t atoms) noexcept { return atoms / 64; }

std::size_t stabilized_prefix(const JacobiCoeffs& coarse, const JacobiCoeffs& fine,
                              const Real& tol) {
  const std::size_t n = std::min(coarse.length(), fine.length());
  for (std::size_t k = 1; k <= n; ++k) {
    if (abs(coarse.a(k) - fine.a(k)) > tol || abs(coarse.b(k) - fine.b(k)) > tol) return k - 1;
  }
  return n;
}

DiscreteMeasure ifs_gauss_refine(const AffineIFS& ifs, std::size_t nodes, std::size_t levels,
                                 std::size_t atom_cap) {
  if (nodes == 0) throw DomainError("at least one base node is required");
  const Precision p = ifs.precision();
  const Precision hp = p + static_cast<Precision>(8 * nodes) + 64;
  std::vector<AffineMap> maps;
  std::vector<Real> weights;
  for (std::size_t j = 0; j < ifs.size(); ++j) {
    maps.push_back({Real(ifs.maps()[j].ratio, hp), Real(ifs.maps()[j].offset, hp)});
    weights.emplace_back(ifs.weights()[j], hp);
  }
  const AffineIFS wide(std::move(maps), std::move(weights));
  const JacobiCoeffs jc = chebyshev_from_moments(ifs_moments(wide, 2 * nodes), nodes);
  const DiscreteMeasure rule = gauss_rule(jc, nodes);
  std::vector<Atom> base;
  base.reserve(nodes);
  for (const Atom& a : rule.atoms()) base.push_back({Real(a.position, p), Real(a.weight, p)});
  return ifs_pushforward(ifs, DiscreteMeasure(std::move(base)), levels, atom_cap);
}

}  // namespace cantorlab
