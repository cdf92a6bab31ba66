#include <doctest.h>

#include "cantorlab/coeffs.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/jacobi.hpp"
#include "cantorlab/ifs.hpp"
#include "cantorlab/julia.hpp"
#include "cantorlab/potential.hpp"
#include "oracles.hpp"

using namespace cantorlab;

namespace {
JacobiCoeffs from_function(std::size_t n, double (*a)(std::size_t), double b = 0.0) {
  std::vector<Real> av, bv;
  for (std::size_t k = 1; k <= n; ++k) {
    av.emplace_back(a(k));
    bv.emplace_back(b);
  }
  return JacobiCoeffs(std::move(av), std::move(bv), 256, Provenance::lanczos);
}
}  // namespace

TEST_CASE("Robin recursion: unit capacity for z^2 - c and 1/8 for constant gamma 1/8") {
  const CapacityEstimate q = robin_capacity(PolySequenceSpec::quadratic(Real(3.0)), 10);
  CHECK(q.value == Real(1.0));
  CHECK(q.uncertainty.is_zero());
  CHECK(to_string(q.method) == "robin-recursion");

  const auto g = PolySequenceSpec::gamma(std::vector<Real>(64, parse_real("1/8")));
  const CapacityEstimate e = robin_capacity(g, 64);
  // The omitted tail only lowers the value, by at most the reported uncertainty.
  CHECK(e.value >= parse_real("1/8"));
  CHECK(e.value - parse_real("1/8") <= e.uncertainty);
  CHECK(e.uncertainty < Real(1e-19));
  const CapacityEstimate coarse = robin_capacity(g, 8);
  CHECK(coarse.uncertainty > e.uncertainty);
  CHECK(coarse.value - parse_real("1/8") <= coarse.uncertainty);
  CHECK_THROWS_AS(robin_capacity(g, 65), LengthError);
  CHECK_THROWS_AS(robin_capacity(g, 0), DomainError);
}

TEST_CASE("coefficient extrapolation is exact for constant sequences") {
  const JacobiCoeffs c = from_function(256, [](std::size_t) { return 0.7; });
  const CapacityEstimate e = capacity_from_coeffs(c, 256);
  CHECK(oracle::close(e.value, Real(0.7), 1e-70));
  CHECK(e.uncertainty < Real(1e-70));
  CHECK_FALSE(e.inflated);
  CHECK_THROWS_AS(capacity_from_coeffs(c, 257), LengthError);
  CHECK_THROWS_AS(capacity_from_coeffs(c, 0), DomainError);
}

TEST_CASE("coefficient extrapolation brackets the limit of a 1/n-perturbed sequence") {
  for (std::size_t n : {64u, 512u, 4096u}) {
    const JacobiCoeffs c = from_function(n, [](std::size_t k) { return 0.5 * (1.0 + 1.0 / k); });
    const CapacityEstimate e = capacity_from_coeffs(c, n);
    CHECK(abs(e.value - Real(0.5)) <= e.uncertainty);
    CHECK(e.uncertainty < Real(10.0 / n));
  }
}

TEST_CASE("Lyapunov exponent of the free recurrence is the interval Green function") {
  const JacobiCoeffs free = from_function(4096, [](std::size_t) { return 1.0; });
  for (auto [re, im] : {std::pair{3.0, 0.0}, {1.0, 1.0}, {0.0, 0.5}, {-2.5, 0.1}}) {
    const long double expect = oracle::interval_green({re, im});
    const Real got = lyapunov_approx(free, Complex(Real(re), Real(im)), 4096);
    CHECK(std::abs(got.to_double() - static_cast<double>(expect)) < 1e-3);
  }
  // At z = 3 the closed form is log((3 + sqrt 5) / 2).
  CHECK(std::abs(static_cast<double>(oracle::interval_green({3.0L, 0.0L})) -
                 std::log((3 + std::sqrt(5.0)) / 2)) < 1e-15);
  CHECK_THROWS_AS(lyapunov_approx(free, Complex(Real(0.0), Real(-1.0)), 10), DomainError);
  CHECK_THROWS_AS(lyapunov_approx(free, Complex(Real(3.0)), 0), DomainError);
  CHECK_THROWS_AS(transfer_product(free, Complex(Real(3.0)), 4097), LengthError);
}

TEST_CASE("transfer product worked examples") {
  const JacobiCoeffs one({Real(1.0)}, {Real(0.0)}, 256, Provenance::lanczos);
  const TransferMatrix m1 = transfer_product(one, Complex(Real(0.0), Real(1.0)), 1);
  CHECK(m1.scale_exponent == 0);
  CHECK((m1.m11.re.is_zero() && m1.m11.im == Real(1.0)));
  CHECK((m1.m12.re == Real(-1.0) && m1.m12.im.is_zero()));
  CHECK((m1.m21.re == Real(1.0) && m1.m22.re.is_zero()));

  const JacobiCoeffs c({Real(1.0), Real(2.0), Real(4.0)}, {Real(0.0), Real(0.0), Real(0.0)}, 256,
                       Provenance::lanczos);
  const TransferMatrix m3 = transfer_product(c, Complex(Real(0.7), Real(0.2)), 3);
  const Complex det = m3.determinant();
  CHECK(oracle::close(ldexp(det.re, 2 * m3.scale_exponent), Real(0.25), 1e-70));
  CHECK(oracle::close(det.im, Real(0.0), 1e-70));

  const TransferMatrix id = transfer_product(c, Complex(Real(5.0)), 0);
  CHECK((id.m11.re == Real(1.0) && id.m22.re == Real(1.0) && id.m12.re.is_zero()));
}

TEST_CASE("transfer determinants telescope to 1 / a_n up to entry-size rounding") {
  // det M = a_0 / a_n exactly; in floating point the entries grow like
  // e^{n gamma} and the determinant cancels, so the bound is relative to them.
  oracle::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Precision bits = 256;
    const JacobiCoeffs c = oracle::random_jacobi(rng, 300, bits);
    const Complex z(Real(rng.uniform(-4, 4)), Real(rng.uniform(0, 2)));
    const std::size_t n = 1 + rng.index(300);
    const TransferMatrix m = transfer_product(c, z, n);
    const Complex det = m.determinant();
    const Real f = norm(m.m11) + norm(m.m12) + norm(m.m21) + norm(m.m22);
    const Real target = ldexp(Real(1.0, bits) / c.a(n), -2 * m.scale_exponent);
    const Real err = hypot(det.re - target, det.im);
    CHECK(err <= pow2(-bits + 10, bits) * max(f, Real(1.0, bits)));
  }
}

TEST_CASE("Lyapunov exponents are nonnegative off the real axis") {
  oracle::Rng rng(37);
  const JacobiCoeffs c3 = julia_exact_coeffs(Real(3.0), 256);
  for (int trial = 0; trial < 30; ++trial) {
    const Complex z(Real(rng.uniform(-3, 3)), Real(rng.uniform(1e-3, 2)));
    for (std::size_t n : {64u, 128u, 256u}) CHECK(lyapunov_approx(c3, z, n) >= Real(-1e-3));
  }
}

TEST_CASE("Green function obeys g(f(z)) = 2 g(z) and grows like log|z| - log cap") {
  const auto spec = PolySequenceSpec::quadratic(Real(3.0));
  for (auto [re, im] : {std::pair{1.0, 1.0}, {0.0, 2.0}, {3.0, 0.0}, {0.5, 0.5}}) {
    const Complex z{Real(re), Real(im)};
    const GreenValue g = green_julia(spec, z, 30);
    const GreenValue gf = green_julia(spec, spec.apply(1, z), 30);
    CHECK(g.escaped);
    CHECK(g.value > 0.0);
    CHECK(abs(gf.value - 2.0 * g.value) <= gf.uncertainty + 2.0 * g.uncertainty);
  }
  const GreenValue far = green_julia(spec, Complex(Real(1e6)), 20);
  CHECK(std::abs(far.value.to_double() - std::log(1e6)) < 1e-10);

  const auto gam = PolySequenceSpec::gamma(std::vector<Real>(40, parse_real("1/8")));
  const GreenValue gg = green_julia(gam, Complex(Real(1e6)), 40);
  CHECK(std::abs(gg.value.to_double() - (std::log(1e6) + std::log(8.0))) < 1e-5);

  // Points of the Julia set do not escape; the reported interval still holds 0.
  const DiscreteMeasure orbit = julia_inverse_orbit(spec, 8);
  const GreenValue on = green_julia(spec, Complex(orbit[3].position), 8);
  CHECK_FALSE(on.escaped);
  CHECK(on.value - on.uncertainty <= 0.0);
  CHECK(on.value + on.uncertainty >= 0.0);
}

TEST_CASE("Green function is positive outside the set and grows away from it") {
  const auto spec = PolySequenceSpec::quadratic(Real(3.0));
  oracle::Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = rng.uniform(-3, 3);
    Real last = Real::zero();
    for (double y : {0.01, 0.1, 0.5, 1.0, 2.0}) {
      const GreenValue g = green_julia(spec, Complex(Real(x), Real(y)), 40);
      CHECK(g.value > last);
      last = g.value;
    }
  }
  // Approaching an orbit atom vertically, the value decreases toward 0.
  const DiscreteMeasure orbit = julia_inverse_orbit(spec, 12);
  const Real& atom = orbit[1000].position;
  Real prev(1e9);
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const GreenValue g = green_julia(spec, Complex(atom, Real(t)), 60);
    CHECK(g.value < prev);
    CHECK(g.value > 0.0);
    prev = g.value;
  }
  CHECK(prev < Real(0.02));
}

TEST_CASE("Green values at successive levels form a Cauchy sequence") {
  // Observed |g_{l+1} - g_l| * 2^l on this grid stays below C = 2.
  const auto spec = PolySequenceSpec::quadratic(Real(3.0));
  for (auto [re, im] : {std::pair{1.0, 1.0}, {0.0, 2.0}, {3.0, 0.0}, {-3.0, 0.0}, {0.5, 0.5}}) {
    const Complex z{Real(re), Real(im)};
    for (std::size_t l = 6; l <= 24; l += 3) {
      const Real d = abs(green_julia(spec, z, l + 1).value - green_julia(spec, z, l).value);
      CHECK(d <= ldexp(Real(2.0), -static_cast<long>(l)));
    }
  }
}

TEST_CASE("Robin recursion changes by one term per level") {
  const auto g = PolySequenceSpec::gamma({parse_real("1/8"), parse_real("1/5")});
  const Real l1 = log(robin_capacity(g, 1).value);
  const Real l2 = log(robin_capacity(g, 2).value);
  CHECK(oracle::close(l1 - l2, ldexp(log(g.leading_coeff(2)), -2), 1e-70));
  // Closed sum for constant gamma: 1/2 log(2/g) + sum_{k>=2} 2^-k log(1/(2g)).
  const Real gam = parse_real("1/5");
  const auto cst = PolySequenceSpec::gamma(std::vector<Real>(200, gam));
  const Real closed = exp(-(ldexp(log(2.0 / gam), -1) + ldexp(log(1.0 / (2.0 * gam)), -1)));
  const CapacityEstimate e = robin_capacity(cst, 200);
  CHECK(oracle::close(e.value, closed, 1e-55));
}

TEST_CASE("capacity sandwich brackets the Cantor capacity") {
  const CapacitySandwich s = capacity_sandwich(AffineIFS::cantor(), 5);
  CHECK(s.lower < s.upper);
  CHECK(s.lower > 0.215);
  CHECK(s.upper < 0.235);
  CHECK(s.cylinders == 32);
  const CapacitySandwich coarse = capacity_sandwich(AffineIFS::cantor(), 2);
  CHECK(coarse.upper - coarse.lower >= s.upper - s.lower);
  const AffineIFS three({{parse_real("1/5"), Real(0.0)},
                         {parse_real("1/5"), parse_real("2/5")},
                         {parse_real("1/5"), parse_real("4/5")}},
                        {parse_real("1/3"), parse_real("1/3"), parse_real("1/3")});
  CHECK_THROWS_AS(capacity_sandwich(three, 3), DomainError);
}
