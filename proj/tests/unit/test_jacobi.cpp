#include <doctest.h>

#include "cantorlab/coeffs.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/jacobi.hpp"
#include "oracles.hpp"

using namespace cantorlab;

namespace {

JacobiCoeffs constant_coeffs(double a, double b, std::size_t n, Precision bits = 256) {
  return JacobiCoeffs(std::vector<Real>(n, Real(a, bits)), std::vector<Real>(n, Real(b, bits)),
                      bits, Provenance::exact_recursion);
}

bool strictly_interlace(const std::vector<Real>& inner, const std::vector<Real>& outer) {
  if (outer.size() != inner.size() + 1) return false;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (!(outer[i] < inner[i] && inner[i] < outer[i + 1])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("coefficient records validate their input") {
  CHECK_THROWS_AS(JacobiCoeffs({Real(1.0)}, {}, 256, Provenance::lanczos), LengthError);
  CHECK_THROWS_AS(JacobiCoeffs({Real(0.0)}, {Real(0.0)}, 256, Provenance::lanczos), DomainError);
  CHECK_THROWS_AS(JacobiCoeffs({Real(-1.0)}, {Real(0.0)}, 256, Provenance::lanczos), DomainError);
  CHECK_THROWS_AS(JacobiCoeffs({Real(1.0)}, {Real(0.0)}, 32, Provenance::lanczos), DomainError);
  const JacobiCoeffs c = constant_coeffs(1, 0, 4);
  CHECK_THROWS_AS(c.a(0), LengthError);
  CHECK_THROWS_AS(c.a(5), LengthError);
  CHECK_THROWS_AS(c.prefix(5), LengthError);
  CHECK(c.prefix(2).length() == 2);
  CHECK(parse_provenance("chebyshev-moments") == Provenance::chebyshev_moments);
  CHECK(to_string(Provenance::exact_recursion) == "exact-recursion");
  CHECK_THROWS_AS(parse_provenance("magic"), DomainError);
}

TEST_CASE("monic norm is the product of the off-diagonal coefficients") {
  oracle::Rng rng(5);
  const JacobiCoeffs c = oracle::random_jacobi(rng, 200, 256);
  Real prod(1, 256);
  for (std::size_t n = 1; n <= 200; ++n) {
    prod *= c.a(n);
    CHECK(oracle::close(log_monic_norm(c, n), log(prod), 1e-60));
  }
  CHECK(oracle::close(monic_norm(c, 30), exp(log_monic_norm(c, 30)), 1e-50));
  CHECK_THROWS_AS(monic_norm(c, 201), LengthError);
}

TEST_CASE("orthonormal polynomials evaluate with a small recurrence residual") {
  const JacobiCoeffs c = constant_coeffs(0.5, 0, 40);
  // a = 1/2, b = 0: P_n(cos t) = sin((n+1)t) / sin t, up to the normalization 1.
  const Real x(0.3);
  const PolyEvalResult r = eval_orthonormal(c, x, 20);
  const long double t = std::acos(0.3L);
  for (std::size_t n = 0; n <= 20; ++n) {
    const long double expect = std::sin((n + 1) * t) / std::sin(t);
    CHECK(std::abs(r.values[n].to_double() - static_cast<double>(expect)) < 1e-12);
  }
  CHECK(r.relative_residual < Real(1e-70));
  CHECK_THROWS_AS(eval_orthonormal(c, x, 41), LengthError);
}

TEST_CASE("truncation zeros match characteristic-polynomial roots") {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    const JacobiCoeffs c = oracle::random_jacobi(rng, n, 256);
    const SpectrumSample s = truncation_zeros(c, n);
    const std::vector<Real> roots = oracle::char_poly_roots(c, n);
    REQUIRE(roots.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(oracle::close(s.eigenvalues[i], roots[i], 1e-20));
    }
  }
}

TEST_CASE("zeros of consecutive orthogonal polynomials strictly interlace") {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 6; ++trial) {
    const JacobiCoeffs c = oracle::random_jacobi(rng, 41, 128);
    std::vector<Real> prev = truncation_zeros(c, 1).eigenvalues;
    for (std::size_t n = 2; n <= 40; ++n) {
      std::vector<Real> cur = truncation_zeros(c, n).eigenvalues;
      CHECK(strictly_interlace(prev, cur));
      prev = std::move(cur);
    }
  }
}

TEST_CASE("eigenvalues of the free Jacobi matrix are 2 cos(k pi / (n+1))") {
  const std::size_t n = 64;
  const SpectrumSample s = truncation_zeros(constant_coeffs(1, 0, n), n);
  for (std::size_t k = 1; k <= n; ++k) {
    // Ascending order: the k-th smallest is 2 cos((n+1-k) pi / (n+1)).
    const long double expect = 2 * std::cos(static_cast<long double>(n + 1 - k) *
                                            3.14159265358979323846264338327950288L / (n + 1));
    CHECK(std::abs(s.eigenvalues[k - 1].to_double() - static_cast<double>(expect)) < 1e-15);
  }
}

TEST_CASE("eigenvalue solver rejects decoupled and malformed input") {
  CHECK_THROWS_AS(tridiagonal_eigenvalues({Real(0.0), Real(1.0)}, {}, 256), LengthError);
  CHECK_THROWS_AS(tridiagonal_eigenvalues({Real(0.0), Real(1.0)}, {Real(0.0)}, 256), DomainError);
  const auto one = tridiagonal_eigenvalues({Real(2.5)}, {}, 256);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Real(2.5));
}

TEST_CASE("perturbed truncations shift by rank-one updates") {
  const JacobiCoeffs c = constant_coeffs(1, 0, 20);
  const SpectrumSample plain = perturbed_truncation_spectrum(c, Real::zero(256), 0, 10);
  const SpectrumSample zeros = truncation_zeros(c, 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(plain.eigenvalues[i] == zeros.eigenvalues[i]);
  const SpectrumSample shifted = perturbed_truncation_spectrum(c, Real(0.5), 1, 9);
  CHECK(shifted.dropped_rows == 1);
  CHECK(shifted.eigenvalues.size() == 9);
  // Rank-one positive perturbation: eigenvalues interlace with the unperturbed ones.
  const SpectrumSample base = truncation_zeros(c, 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(base.eigenvalues[i] <= shifted.eigenvalues[i]);
  CHECK_THROWS_AS(perturbed_truncation_spectrum(c, Real(0.0), 2, 5), DomainError);
  CHECK_THROWS_AS(perturbed_truncation_spectrum(c, Real(0.0), 1, 20), LengthError);
}

TEST_CASE("Gauss rules integrate polynomials of degree below 2k exactly") {
  oracle::Rng rng(29);
  const DiscreteMeasure m = oracle::random_measure(rng, 60, 256);
  const JacobiCoeffs c = lanczos_from_discrete(m, 12);
  for (std::size_t k : {1u, 4u, 12u}) {
    const DiscreteMeasure g = gauss_rule(c, k);
    REQUIRE(g.size() == k);
    for (unsigned d = 0; d < 2 * k; ++d) {
      CHECK(oracle::close(g.moment(d), m.moment(d), 1e-60));
    }
  }
  CHECK_THROWS_AS(gauss_rule(c, 0), DomainError);
}

TEST_CASE("density of states has equal weights on the zeros") {
  const JacobiCoeffs c = constant_coeffs(1, 0, 16);
  const DiscreteMeasure d = dos_measure(c, 16);
  REQUIRE(d.size() == 16);
  for (const Atom& a : d.atoms()) CHECK(a.weight == Real(1.0 / 16));
  CHECK_THROWS_AS(dos_measure(c, 0), DomainError);
}
