#pragma once

#include <cstddef>
#include <vector>

#include "cantorlab/bigfloat.hpp"

namespace cantorlab {

struct Atom {
  Real position;
  Real weight;
};

/// Finitely many positive point masses, sorted by position, of unit total
/// mass. Immutable after construction.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// Sorts the atoms and validates positivity and normalization. The mass
  /// tolerance is 2^(-p+4) per atom, p the lowest weight precision.
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  /// Precision of the first atom's position (all atoms share it in practice).
  Precision precision() const;

  Real total_weight() const;
  /// Integral of t^k.
  Real moment(unsigned k) const;

  /// Same atoms with equal positions merged (weights summed).
  DiscreteMeasure coalesced() const;

  /// Image under x -> alpha*x + beta (alpha != 0).
  DiscreteMeasure affine_image(const Real& alpha, const Real& beta) const;

 private:
  struct Trusted {};
  DiscreteMeasure(Trusted, std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  std::vector<Atom> atoms_;
};

/// Sorts by position; ties keep their relative order.
void sort_atoms(std::vector<Atom>& atoms);

}  // namespace cantorlab
