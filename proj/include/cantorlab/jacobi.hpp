#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cantorlab/bigfloat.hpp"
#include "cantorlab/measure.hpp"

namespace cantorlab {

enum class Provenance { exact_recursion, lanczos, chebyshev_moments };

std::string_view to_string(Provenance p) noexcept;
/// Accepts "exact-recursion", "lanczos", "chebyshev-moments".
Provenance parse_provenance(std::string_view s);

/// Prefix (a_1..a_N, b_1..b_N) of three-term recurrence coefficients.
/// Indices are 1-based to match the recurrence
///   x P_n = a_{n+1} P_{n+1} + b_{n+1} P_n + a_n P_{n-1}.
class JacobiCoeffs {
 public:
  JacobiCoeffs() = default;
  /// Validates a_n > 0, equal lengths and bits >= 53. Values are stored as
  /// given; `bits` is the precision the caller vouches for.
  JacobiCoeffs(std::vector<Real> a, std::vector<Real> b, Precision bits, Provenance provenance);

  std::size_t length() const noexcept { return a_.size(); }
  Precision precision_bits() const noexcept { return bits_; }
  Provenance provenance() const noexcept { return provenance_; }

  const Real& a(std::size_t n) const;
  const Real& b(std::size_t n) const;
  const std::vector<Real>& a_values() const noexcept { return a_; }
  const std::vector<Real>& b_values() const noexcept { return b_; }

  JacobiCoeffs prefix(std::size_t n) const;

 private:
  std::vector<Real> a_;
  std::vector<Real> b_;
  Precision bits_ = kDefaultPrecisionBits;
  Provenance provenance_ = Provenance::exact_recursion;
};

struct PolyEvalResult {
  Real x;
  /// P_0(x), ..., P_n(x).
  std::vector<Real> values;
  /// Largest |a_{k+1}P_{k+1} + b_{k+1}P_k + a_k P_{k-1} - x P_k| divided by
  /// the running max magnitude, over all evaluated steps.
  Real relative_residual;
};

PolyEvalResult eval_orthonormal(const JacobiCoeffs& coeffs, const Real& x, std::size_t n);

/// a_1 * ... * a_n, the L2 norm of the monic polynomial p_n.
Real monic_norm(const JacobiCoeffs& coeffs, std::size_t n);
/// log(a_1 * ... * a_n).
Real log_monic_norm(const JacobiCoeffs& coeffs, std::size_t n);

struct SpectrumSample {
  std::vector<Real> eigenvalues;
  std::size_t n = 0;
  Real perturbation_beta;
  std::size_t dropped_rows = 0;
};

/// Eigenvalues of a symmetric tridiagonal matrix with the given diagonal and
/// off-diagonal (size n-1, all nonzero), ascending, each certified by Sturm
/// counts to lie within 2^(-p+16) * scale of a true eigenvalue.
std::vector<Real> tridiagonal_eigenvalues(const std::vector<Real>& diag,
                                          const std::vector<Real>& offdiag, Precision bits);

/// Zeros of p_n: eigenvalues of the top-left n x n truncation.
SpectrumSample truncation_zeros(const JacobiCoeffs& coeffs, std::size_t n);

/// Normalized zero-counting measure of p_n.
DiscreteMeasure dos_measure(const JacobiCoeffs& coeffs, std::size_t n);

/// Truncation of order n after deleting the first `drop_first` rows and
/// columns, with `beta` added to the new (1,1) entry.
SpectrumSample perturbed_truncation_spectrum(const JacobiCoeffs& coeffs, const Real& beta,
                                             std::size_t drop_first, std::size_t n);

/// k-point Gauss rule of the measure behind `coeffs` (nodes = zeros of p_k,
/// Christoffel weights).
DiscreteMeasure gauss_rule(const JacobiCoeffs& coeffs, std::size_t k);

}  // namespace cantorlab
