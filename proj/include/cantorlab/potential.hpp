#pragma once

#include <cstddef>
#include <string_view>

#include "cantorlab/bigfloat.hpp"
#include "cantorlab/ifs.hpp"
#include "cantorlab/jacobi.hpp"
#include "cantorlab/julia.hpp"

namespace cantorlab {

enum class CapacityMethod { robin_recursion, coefficient_extrapolation };

std::string_view to_string(CapacityMethod m) noexcept;

struct CapacityEstimate {
  Real value;
  CapacityMethod method = CapacityMethod::robin_recursion;
  Real uncertainty;
  /// Set when the tail of the input did not follow the extrapolation model and
  /// the uncertainty was widened.
  bool inflated = false;
};

/// exp(-sum_{k<=levels} 2^-k log lc_k). For the gamma family the uncertainty
/// bounds the omitted tail; for z^2 - c the value is exactly 1.
CapacityEstimate robin_capacity(const PolySequenceSpec& spec, std::size_t levels);

/// Richardson extrapolation of the geometric means (a_1...a_n)^(1/n):
/// estimate exp(2 l_N - l_{N/2}) with l_n = (1/n) sum log a_k; uncertainty is
/// the spread of that stage over N/4, N/2, N.
CapacityEstimate capacity_from_coeffs(const JacobiCoeffs& coeffs, std::size_t n);

/// 2x2 complex matrix times 2^scale_exponent.
struct TransferMatrix {
  Complex m11, m12, m21, m22;
  long scale_exponent = 0;

  /// Natural log of the accumulated power-of-two scale.
  Real log_scale() const;
  /// Determinant of the stored (unscaled) matrix.
  Complex determinant() const;
  /// Log of the spectral norm of the full product, scale included.
  Real log_spectral_norm() const;
};

/// M_n(z) ... M_1(z) with M_k = [[(z - b_k)/a_k, -a_{k-1}/a_k], [1, 0]] and a_0 = 1.
TransferMatrix transfer_product(const JacobiCoeffs& coeffs, const Complex& z, std::size_t n);

/// (1/n) log ||M^(n)(z)|| with the spectral norm.
Real lyapunov_approx(const JacobiCoeffs& coeffs, const Complex& z, std::size_t n);

struct GreenValue {
  Real value;
  Real uncertainty;
  /// False when |F_levels(z)| stayed below the escape radius; the uncertainty
  /// is then a coarse upper bound.
  bool escaped = false;
};

/// 2^-levels log|F_levels(z)|, composed exactly in a (mantissa, log-modulus)
/// representation so that no intermediate overflows.
GreenValue green_julia(const PolySequenceSpec& spec, const Complex& z, std::size_t levels);

struct CapacitySandwich {
  double lower = 0;
  double upper = 0;
  /// Self-energy of the invariant measure.
  double energy = 0;
  std::size_t cylinders = 0;
};

/// Two-sided estimate of the capacity of the attractor of a two-map IFS with
/// equal ratios r and the maps x r and x r + (1 - r) on [0,1] (Cantor-type).
/// Lower: exp(-I(nu)) for the energy-optimal combination nu of rescaled copies
/// of the invariant measure on the level-`level` cylinders. Upper:
/// exp(-min U^nu) over sampled attractor points. Both use quadrature and are
/// cross-checks, not proofs.
CapacitySandwich capacity_sandwich(const AffineIFS& ifs, std::size_t level,
                                   std::size_t quadrature_nodes = 12);

}  // namespace cantorlab
