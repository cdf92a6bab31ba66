#include "cantorlab/measure.hpp"

#include <algorithm>

#include "cantorlab/errors.hpp"

namespace cantorlab {

void sort_atoms(std::vector<Atom>& atoms) {
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) {
    return mpfr_less_p(l.position.raw(), r.position.raw()) != 0;
  });
}

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("a discrete measure needs at least one atom");
  Precision p = atoms_.front().weight.precision();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!a.position.is_finite()) throw DomainError("atom position is not finite");
    if (!(a.weight > 0.0)) {
      throw DomainError("atom weight must be positive (atom " + std::to_string(i) + ")");
    }
    p = std::min(p, a.weight.precision());
  }
  sort_atoms(atoms_);
  const Real total = total_weight();
  const Real tol = pow2(-p + 4, 64) * static_cast<double>(atoms_.size());
  if (abs(total - 1.0) > tol) {
    throw DomainError("atom weights sum to " + total.to_string(20) + ", not 1");
  }
}

Precision DiscreteMeasure::precision() const {
  return atoms_.empty() ? default_precision() : atoms_.front().position.precision();
}

Real DiscreteMeasure::total_weight() const {
  Real s = Real::zero(atoms_.empty() ? default_precision() : atoms_.front().weight.precision());
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

Real DiscreteMeasure::moment(unsigned k) const {
  Real s = Real::zero(precision());
  Real t = Real::zero(precision());
  for (const Atom& a : atoms_) {
    mpfr_pow_ui(t.raw(), a.position.raw(), k, MPFR_RNDN);
    mpfr_fma(s.raw(), t.raw(), a.weight.raw(), s.raw(), MPFR_RNDN);
  }
  return s;
}

DiscreteMeasure DiscreteMeasure::coalesced() const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    if (!out.empty() && out.back().position == a.position) {
      out.back().weight += a.weight;
    } else {
      out.push_back(a);
    }
  }
  return DiscreteMeasure(Trusted{}, std::move(out));
}

DiscreteMeasure DiscreteMeasure::affine_image(const Real& alpha, const Real& beta) const {
  if (alpha.is_zero()) throw DomainError("affine image needs a nonzero scale");
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) out.push_back({fma(alpha, a.position, beta), a.weight});
  if (alpha < 0.0) std::reverse(out.begin(), out.end());
  return DiscreteMeasure(Trusted{}, std::move(out));
}

}  // namespace cantorlab
