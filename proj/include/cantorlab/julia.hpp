#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cantorlab/bigfloat.hpp"
#include "cantorlab/measure.hpp"

namespace cantorlab {

enum class PolyFamily { quadratic_julia, gamma_julia };

std::string_view to_string(PolyFamily f) noexcept;

/// Constants certifying the regular-sequence conditions for every stored level:
/// |lc_k| >= min_leading, |coeff_{k,j}| <= coeff_ratio * |lc_k|,
/// log|lc_k| <= log_growth * deg_k.
struct RegularityWitnesses {
  Real min_leading;
  Real coeff_ratio;
  Real log_growth;
};

/// A sequence of real quadratics f_1, f_2, ... written f_k(z) = lc_k z^2 + l_k z + c_k.
///  - quadratic-julia: f_k(z) = z^2 - c for every k, c > 2.
///  - gamma-julia: f_1(z) = 2z(z-1)/g_1 + 1, f_k(z) = z^2/(2 g_k) + 1 - 1/(2 g_k),
///    with 0 < g_k < 1/4, given as a finite prefix.
class PolySequenceSpec {
 public:
  static PolySequenceSpec quadratic(const Real& c);
  static PolySequenceSpec gamma(std::vector<Real> gamma);

  PolyFamily kind() const noexcept { return kind_; }
  const Real& c() const;
  const std::vector<Real>& gamma_values() const noexcept { return gamma_; }
  Precision precision() const;

  /// Number of defined levels; nullopt for the autonomous quadratic family.
  std::optional<std::size_t> available_levels() const;

  std::size_t degree(std::size_t k) const;
  Real leading_coeff(std::size_t k) const;
  Real linear_coeff(std::size_t k) const;
  Real constant_coeff(std::size_t k) const;

  Real apply(std::size_t k, const Real& z) const;
  Complex apply(std::size_t k, const Complex& z) const;

  RegularityWitnesses witnesses() const;

  /// 0 for z^2 - c, 1 for the gamma family.
  Real default_anchor() const;

  /// Radius beyond which every map escapes monotonically:
  /// 2 * max(sqrt(c + 1) (or 1), positive root of t^2 - (A2 + 2/A1) t - A2).
  Real escape_radius() const;

 private:
  void check_level(std::size_t k) const;

  PolyFamily kind_ = PolyFamily::quadratic_julia;
  Real c_;
  std::vector<Real> gamma_;
};

/// All 2^level solutions of F_level(z) = anchor, F_l = f_l o ... o f_1, each with
/// weight 2^-level. Preimages are taken branchwise from f_level down to f_1.
DiscreteMeasure julia_inverse_orbit(const PolySequenceSpec& spec, std::size_t level,
                                    const Real& anchor, std::size_t atom_cap = std::size_t{1}
                                                                              << 24);
DiscreteMeasure julia_inverse_orbit(const PolySequenceSpec& spec, std::size_t level);

/// F_level(x) by forward composition.
Real forward_image(const PolySequenceSpec& spec, const Real& x, std::size_t level);

}  // namespace cantorlab
