#pragma once

#include <cstddef>
#include <vector>

#include "cantorlab/bigfloat.hpp"
#include "cantorlab/measure.hpp"

namespace cantorlab {

/// x -> ratio * x + offset.
struct AffineMap {
  Real ratio;
  Real offset;

  Real operator()(const Real& x) const { return fma(ratio, x, offset); }
  Real fixed_point() const { return offset / (1.0 - ratio); }
};

/// Contractive affine maps with probability weights.
class AffineIFS {
 public:
  AffineIFS(std::vector<AffineMap> maps, std::vector<Real> weights);

  /// x/3 and (x+2)/3 with weights 1/2 each, at `bits`.
  static AffineIFS cantor(Precision bits = default_precision());

  const std::vector<AffineMap>& maps() const noexcept { return maps_; }
  const std::vector<Real>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return maps_.size(); }
  Precision precision() const;

  /// Conjugate system phi o w_j o phi^-1 for phi(x) = alpha*x + beta. Its
  /// invariant measure is the image of this system's under phi.
  AffineIFS conjugated(const Real& alpha, const Real& beta) const;

  /// Largest |ratio|.
  Real contraction() const;

 private:
  std::vector<AffineMap> maps_;
  std::vector<Real> weights_;
};

/// Moments m_0..m_order of a measure.
struct MomentVector {
  std::vector<Real> moments;

  std::size_t order() const noexcept { return moments.empty() ? 0 : moments.size() - 1; }
  const Real& operator[](std::size_t k) const { return moments[k]; }

  /// Largest n such that the (n+1)x(n+1) Hankel matrix (m_{i+j}) passes a
  /// Cholesky factorization with positive pivots, capped by the available
  /// order.
  std::size_t hankel_positive_order() const;
};

/// Default cap on the number of atoms any refinement may create.
inline constexpr std::size_t kDefaultAtomCap = std::size_t{1} << 24;

/// Pushforward of the point mass at the first map's fixed point through all
/// words of length `level`: K^level atoms.
DiscreteMeasure ifs_refine(const AffineIFS& ifs, std::size_t level,
                           std::size_t atom_cap = kDefaultAtomCap);

/// Pushforward of an arbitrary base measure through all words of length
/// `levels`: |base| * K^levels atoms.
DiscreteMeasure ifs_pushforward(const AffineIFS& ifs, const DiscreteMeasure& base,
                                std::size_t levels, std::size_t atom_cap = kDefaultAtomCap);

/// Moments of the invariant measure from the self-similarity relation,
/// solved by forward substitution.
MomentVector ifs_moments(const AffineIFS& ifs, std::size_t order);

/// Moments of a discrete measure (test and cross-check helper).
MomentVector discrete_moments(const DiscreteMeasure& measure, std::size_t order);

}  // namespace cantorlab
