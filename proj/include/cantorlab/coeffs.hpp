#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "cantorlab/bigfloat.hpp"
#include "cantorlab/ifs.hpp"
#include "cantorlab/jacobi.hpp"
#include "cantorlab/measure.hpp"

namespace cantorlab {

/// Recurrence coefficients of the balanced measure of z^2 - c, from the
/// squared-domain recursion s_1 = c, s_2n = s_n / s_{2n-1}, s_2n+1 = c - s_2n,
/// with a_n = sqrt(s_n) and b_n = 0. Precision is that of `c`.
JacobiCoeffs julia_exact_coeffs(const Real& c, std::size_t n);

enum class Reorthogonalization { full, none };

struct LanczosOptions {
  Reorthogonalization reorthogonalization = Reorthogonalization::full;
  /// Detect measures symmetric about their midpoint and run on half of the
  /// atoms with b_n pinned to the midpoint.
  bool exploit_symmetry = true;
};

/// First n coefficients of a discrete measure by the Stieltjes/Lanczos sweep
/// on the atom values. Equal positions are merged first; n must be smaller
/// than the number of distinct atoms.
JacobiCoeffs lanczos_from_discrete(const DiscreteMeasure& measure, std::size_t n,
                                   const LanczosOptions& options = {});

/// Chebyshev algorithm on moments m_0..m_2n at the moments' precision.
JacobiCoeffs chebyshev_from_moments(const MomentVector& moments, std::size_t n);

struct EscalationResult {
  JacobiCoeffs coeffs;
  Precision bits_used = 0;
  int attempts = 0;
};

/// Runs the Chebyshev algorithm at max(256, 8n) bits and accepts the result
/// once it agrees within `tol` with `reference` (if given) or with a run at
/// twice the precision. Doubles the precision on disagreement, up to
/// `max_bits`, then throws NumericalFailure.
EscalationResult chebyshev_escalated(const std::function<MomentVector(Precision)>& moments,
                                     std::size_t n, const Real& tol,
                                     const JacobiCoeffs* reference = nullptr,
                                     Precision max_bits = 1 << 16);

struct CrossValidationReport {
  std::size_t n_compared = 0;
  Real max_abs_dev_a;
  Real max_abs_dev_b;
  /// First 1-based n where either deviation exceeds the tolerance.
  std::optional<std::size_t> first_divergence_index;
};

CrossValidationReport cross_validate(const JacobiCoeffs& lhs, const JacobiCoeffs& rhs,
                                     std::size_t n, const Real& tol);

/// Default trust rule for discrete approximants: atoms / 64.
std::size_t trusted_prefix(std::size_t atoms) noexcept;

/// Length of the leading run on which two coefficient sets (typically from
/// successive refinement levels) agree within `tol`.
std::size_t stabilized_prefix(const JacobiCoeffs& coarse, const JacobiCoeffs& fine,
                              const Real& tol);

/// Discrete approximant of an IFS invariant measure: a `nodes`-point Gauss
/// rule of the invariant measure (from its exact moments) pushed through all
/// words of length `levels`. With nodes == 1 this is the barycenter point mass.
DiscreteMeasure ifs_gauss_refine(const AffineIFS& ifs, std::size_t nodes, std::size_t levels,
                                 std::size_t atom_cap = kDefaultAtomCap);

}  // namespace cantorlab
