#include "cantorlab/julia.hpp"

#include "cantorlab/errors.hpp"

namespace cantorlab {

std::string_view to_string(PolyFamily f) noexcept {
  return f == PolyFamily::quadratic_julia ? "quadratic-julia" : "gamma-julia";
}

PolySequenceSpec PolySequenceSpec::quadratic(const Real& c) {
  if (!(c > 2.0)) throw DomainError("c must exceed 2");
  PolySequenceSpec s;
  s.kind_ = PolyFamily::quadratic_julia;
  s.c_ = c;
  return s;
}

PolySequenceSpec PolySequenceSpec::gamma(std::vector<Real> gamma) {
  if (gamma.empty()) throw DomainError("gamma sequence must not be empty");
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (!(gamma[k] > 0.0) || !(gamma[k] < 0.25)) {
      throw DomainError("gamma_" + std::to_string(k + 1) + " must lie in (0, 1/4)");
    }
  }
  PolySequenceSpec s;
  s.kind_ = PolyFamily::gamma_julia;
  s.c_ = Real::zero(gamma.front().precision());
  s.gamma_ = std::move(gamma);
  return s;
}

const Real& PolySequenceSpec::c() const {
  if (kind_ != PolyFamily::quadratic_julia) throw DomainError("c is defined only for z^2 - c");
  return c_;
}

Precision PolySequenceSpec::precision() const {
  return kind_ == PolyFamily::quadratic_julia ? c_.precision() : gamma_.front().precision();
}

std::optional<std::size_t> PolySequenceSpec::available_levels() const {
  if (kind_ == PolyFamily::quadratic_julia) return std::nullopt;
  return gamma_.size();
}

void PolySequenceSpec::check_level(std::size_t k) const {
  if (k == 0) throw DomainError("levels are numbered from 1");
  if (kind_ == PolyFamily::gamma_julia && k > gamma_.size()) {
    throw LengthError("level " + std::to_string(k) + " requested but only " +
                      std::to_string(gamma_.size()) + " gamma values are given");
  }
}

std::size_t PolySequenceSpec::degree(std::size_t k) const {
  check_level(k);
  return 2;
}

Real PolySequenceSpec::leading_coeff(std::size_t k) const {
  check_level(k);
  const Precision p = precision();
  if (kind_ == PolyFamily::quadratic_julia) return Real(1.0, p);
  if (k == 1) return Real(2.0, p) / gamma_[0];
  return Real(0.5, p) / gamma_[k - 1];
}

Real PolySequenceSpec::linear_coeff(std::size_t k) const {
  check_level(k);
  const Precision p = precision();
  if (kind_ == PolyFamily::gamma_julia && k == 1) return Real(-2.0, p) / gamma_[0];
  return Real::zero(p);
}

Real PolySequenceSpec::constant_coeff(std::size_t k) const {
  check_level(k);
  const Precision p = precision();
  if (kind_ == PolyFamily::quadratic_julia) return -c_;
  if (k == 1) return Real(1.0, p);
  return Real(1.0, p) - Real(0.5, p) / gamma_[k - 1];
}

Real PolySequenceSpec::apply(std::size_t k, const Real& z) const {
  return (leading_coeff(k) * z + linear_coeff(k)) * z + constant_coeff(k);
}

Complex PolySequenceSpec::apply(std::size_t k, const Complex& z) const {
  Complex w = z;
  w *= leading_coeff(k);
  w.re += linear_coeff(k);
  w *= z;
  w.re += constant_coeff(k);
  return w;
}

RegularityWitnesses PolySequenceSpec::witnesses() const {
  const std::size_t levels = available_levels().value_or(1);
  const Precision p = precision();
  RegularityWitnesses w{Real::zero(p), Real::zero(p), Real::zero(p)};
  for (std::size_t k = 1; k <= levels; ++k) {
    const Real lc = abs(leading_coeff(k));
    const Real ratio = max(abs(linear_coeff(k)), abs(constant_coeff(k))) / lc;
    const Real growth = log(lc) / static_cast<double>(degree(k));
    if (k == 1 || lc < w.min_leading) w.min_leading = lc;
    if (ratio > w.coeff_ratio) w.coeff_ratio = ratio;
    if (growth > w.log_growth) w.log_growth = growth;
  }
  return w;
}

Real PolySequenceSpec::default_anchor() const {
  return kind_ == PolyFamily::quadratic_julia ? Real::zero(precision())
                                              : Real(1.0, precision());
}

Real PolySequenceSpec::escape_radius() const {
  const RegularityWitnesses w = witnesses();
  const Real b = w.coeff_ratio + 2.0 / w.min_leading;
  const Real root = ldexp(b + sqrt(b * b + 4.0 * w.coeff_ratio), -1);
  const Real base = kind_ == PolyFamily::quadratic_julia ? sqrt(c_ + 1.0) : Real(1.0, precision());
  return 2.0 * max(base, root);
}

DiscreteMeasure julia_inverse_orbit(const PolySequenceSpec& spec, std::size_t level,
                                    const Real& anchor, std::size_t atom_cap) {
  if (level == 0) throw DomainError("orbit level must be at least 1");
  if (level >= 63 || (std::size_t{1} << level) > atom_cap) {
    throw ResourceError("inverse orbit of level " + std::to_string(level) + " exceeds the cap of " +
                        std::to_string(atom_cap) + " atoms");
  }
  if (spec.available_levels() && *spec.available_levels() < level) {
    throw LengthError("inverse orbit of level " + std::to_string(level) + " needs " +
                      std::to_string(level) + " gamma values");
  }
  const Precision p = std::max(spec.precision(), anchor.precision());
  std::vector<Real> cur{Real(anchor, p)};
  Real s = Real::zero(p);
  for (std::size_t k = level; k >= 1; --k) {
    std::vector<Real> next;
    next.reserve(cur.size() * 2);
    const bool gamma = spec.kind() == PolyFamily::gamma_julia;
    const Real g = gamma ? Real(spec.gamma_values()[k - 1], p) : Real::zero(p);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Real& w = cur[i];
      if (gamma) {
        s = w - 1.0;  // discriminant 1 + 2 g (w - 1)
        s *= g;
        mpfr_mul_2ui(s.raw(), s.raw(), 1, MPFR_RNDN);
        s += 1.0;
      } else {
        s = w + spec.c();
      }
      if (s.sign() < 0) {
        throw DomainError("negative discriminant at level " + std::to_string(k) + ", branch " +
                          std::to_string(i) + ": anchor lies outside the admissible region");
      }
      Real r = sqrt(s);
      if (gamma && k == 1) {
        mpfr_mul_2si(r.raw(), r.raw(), -1, MPFR_RNDN);
        next.push_back(0.5 - r);
        next.push_back(0.5 + r);
      } else {
        next.push_back(-r);
        next.push_back(std::move(r));
      }
    }
    cur = std::move(next);
  }
  const Real weight = pow2(-static_cast<long>(level), p);
  std::vector<Atom> atoms;
  atoms.reserve(cur.size());
  for (Real& x : cur) atoms.push_back({std::move(x), weight});
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure julia_inverse_orbit(const PolySequenceSpec& spec, std::size_t level) {
  return julia_inverse_orbit(spec, level, spec.default_anchor());
}

Real forward_image(const PolySequenceSpec& spec, const Real& x, std::size_t level) {
  Real z = x;
  for (std::size_t k = 1; k <= level; ++k) z = spec.apply(k, z);
  return z;
}

}  // namespace cantorlab
