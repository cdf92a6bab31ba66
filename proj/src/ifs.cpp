#include "cantorlab/ifs.hpp"

#include <limits>

#include "cantorlab/errors.hpp"

namespace cantorlab {

AffineIFS::AffineIFS(std::vector<AffineMap> maps, std::vector<Real> weights)
    : maps_(std::move(maps)), weights_(std::move(weights)) {
  if (maps_.empty()) throw DomainError("an IFS needs at least one map");
  if (maps_.size() != weights_.size()) throw DomainError("one weight per map is required");
  Precision p = weights_.front().precision();
  Real total = Real::zero(p);
  for (std::size_t j = 0; j < maps_.size(); ++j) {
    if (!(abs(maps_[j].ratio) < 1.0)) {
      throw DomainError("map " + std::to_string(j + 1) + " is not a contraction");
    }
    if (!(weights_[j] > 0.0)) {
      throw DomainError("weight " + std::to_string(j + 1) + " must be positive");
    }
    p = std::min(p, weights_[j].precision());
    total += weights_[j];
  }
  if (abs(total - 1.0) > pow2(-p + 4, 64)) {
    throw DomainError("IFS weights sum to " + total.to_string(20) + ", not 1");
  }
}

AffineIFS AffineIFS::cantor(Precision bits) {
  const Real third = Real(1.0, bits) / 3.0;
  const Real half(0.5, bits);
  return AffineIFS({{third, Real::zero(bits)}, {third, Real(2.0, bits) / 3.0}}, {half, half});
}

Precision AffineIFS::precision() const { return maps_.front().ratio.precision(); }

AffineIFS AffineIFS::conjugated(const Real& alpha, const Real& beta) const {
  if (alpha.is_zero()) throw DomainError("conjugating map needs a nonzero scale");
  std::vector<AffineMap> maps;
  maps.reserve(maps_.size());
  for (const AffineMap& m : maps_) {
    maps.push_back({m.ratio, alpha * m.offset + beta * (1.0 - m.ratio)});
  }
  return AffineIFS(std::move(maps), weights_);
}

Real AffineIFS::contraction() const {
  Real r = Real::zero(precision());
  for (const AffineMap& m : maps_) r = max(r, abs(m.ratio));
  return r;
}

namespace {

void check_cap(std::size_t base, std::size_t k, std::size_t levels, std::size_t cap) {
  std::size_t count = base;
  for (std::size_t l = 0; l < levels; ++l) {
    if (count > cap / k) {
      throw ResourceError("refinement would create more than " + std::to_string(cap) +
                          " atoms");
    }
    count *= k;
  }
  if (count > cap) {
    throw ResourceError("refinement would create more than " + std::to_string(cap) + " atoms");
  }
}

std::vector<Atom> push_once(const AffineIFS& ifs, const std::vector<Atom>& cur) {
  std::vector<Atom> next;
  next.reserve(cur.size() * ifs.size());
  for (std::size_t j = 0; j < ifs.size(); ++j) {
    const AffineMap& m = ifs.maps()[j];
    const Real& pj = ifs.weights()[j];
    for (const Atom& a : cur) next.push_back({m(a.position), pj * a.weight});
  }
  return next;
}

}  // namespace

DiscreteMeasure ifs_pushforward(const AffineIFS& ifs, const DiscreteMeasure& base,
                                std::size_t levels, std::size_t atom_cap) {
  check_cap(base.size(), ifs.size(), levels, atom_cap);
  std::vector<Atom> cur = base.atoms();
  for (std::size_t l = 0; l < levels; ++l) cur = push_once(ifs, cur);
  return DiscreteMeasure(std::move(cur));
}

DiscreteMeasure ifs_refine(const AffineIFS& ifs, std::size_t level, std::size_t atom_cap) {
  if (level == 0) throw DomainError("refinement level must be at least 1");
  const Precision p = ifs.precision();
  DiscreteMeasure base({{ifs.maps().front().fixed_point(), Real(1.0, p)}});
  return ifs_pushforward(ifs, base, level, atom_cap);
}

MomentVector ifs_moments(const AffineIFS& ifs, std::size_t order) {
  const Precision p = ifs.precision();
  const std::size_t k_maps = ifs.size();
  MomentVector mv;
  mv.moments.reserve(order + 1);
  mv.moments.emplace_back(1.0, p);

  // Powers r_j^i and o_j^i, grown one degree per moment.
  std::vector<std::vector<Real>> rpow(k_maps), opow(k_maps);
  for (std::size_t j = 0; j < k_maps; ++j) {
    rpow[j].emplace_back(1.0, p);
    opow[j].emplace_back(1.0, p);
  }
  std::vector<Real> binom{Real(1.0, p)};  // row k of Pascal's triangle

  for (std::size_t k = 1; k <= order; ++k) {
    for (std::size_t j = 0; j < k_maps; ++j) {
      rpow[j].push_back(rpow[j].back() * ifs.maps()[j].ratio);
      opow[j].push_back(opow[j].back() * ifs.maps()[j].offset);
    }
    std::vector<Real> row(k + 1, Real(1.0, p));
    for (std::size_t i = 1; i < k; ++i) row[i] = binom[i - 1] + binom[i];
    binom = std::move(row);

    Real rhs = Real::zero(p);
    for (std::size_t i = 0; i < k; ++i) {
      Real inner = Real::zero(p);
      for (std::size_t j = 0; j < k_maps; ++j) {
        inner += ifs.weights()[j] * rpow[j][i] * opow[j][k - i];
      }
      rhs += binom[i] * inner * mv.moments[i];
    }
    Real diag(1.0, p);
    for (std::size_t j = 0; j < k_maps; ++j) diag -= ifs.weights()[j] * rpow[j][k];
    if (diag.is_zero()) {
      throw DomainError("self-similarity relation is singular at moment " + std::to_string(k));
    }
    mv.moments.push_back(rhs / diag);
  }
  return mv;
}

MomentVector discrete_moments(const DiscreteMeasure& measure, std::size_t order) {
  const Precision p = measure.precision();
  MomentVector mv;
  mv.moments.assign(order + 1, Real::zero(p));
  Real t = Real::zero(p);
  for (const Atom& a : measure.atoms()) {
    mpfr_set(t.raw(), a.weight.raw(), MPFR_RNDN);
    for (std::size_t k = 0; k <= order; ++k) {
      mv.moments[k] += t;
      t *= a.position;
    }
  }
  return mv;
}

std::size_t MomentVector::hankel_positive_order() const {
  if (moments.empty()) return 0;
  const std::size_t s = order() / 2 + 1;
  const Precision p = moments.front().precision();
  // LDL^T of the s x s Hankel matrix, one row at a time.
  std::vector<std::vector<Real>> l(s, std::vector<Real>(s, Real::zero(p)));
  std::vector<Real> d;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Real v(moments[i + j], p);
      for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k] * d[k];
      if (j < i) {
        l[i][j] = v / d[j];
      } else {
        if (!(v > 0.0)) return i == 0 ? 0 : i - 1;
        d.push_back(std::move(v));
        l[i][i] = Real(1.0, p);
      }
    }
  }
  return s - 1;
}

}  // namespace cantorlab
