#include <doctest.h>

#include "cantorlab/coeffs.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/ifs.hpp"
#include "cantorlab/julia.hpp"
#include "oracles.hpp"

using namespace cantorlab;

TEST_CASE("exact recursion for z^2 - 3 reproduces the hand-derived squares") {
  const JacobiCoeffs c = julia_exact_coeffs(Real(3, 256), 7);
  CHECK(c.provenance() == Provenance::exact_recursion);
  for (std::size_t k = 1; k <= 7; ++k) {
    CHECK(oracle::close(c.a(k) * c.a(k), parse_real(oracle::julia3_a_squared()[k - 1], 256),
                        1e-70));
    CHECK(c.b(k).is_zero());
  }
  CHECK(oracle::close(c.a(1), sqrt(Real(3, 256)), 1e-70));
  CHECK_THROWS_AS(julia_exact_coeffs(Real(1.5), 4), DomainError);
  CHECK_THROWS_AS(julia_exact_coeffs(Real(3.0), 0), DomainError);
}

TEST_CASE("exact coefficients stay strictly inside (0, sqrt c)") {
  for (double c : {2.1, 2.5, 3.0, 4.0, 9.0}) {
    const JacobiCoeffs j = julia_exact_coeffs(Real(c, 128), 3000);
    const Real root = sqrt(Real(c, 128));
    for (std::size_t k = 1; k <= j.length(); ++k) {
      CHECK(j.a(k) > 0.0);
      CHECK(j.a(k) <= root);
    }
  }
}

TEST_CASE("Lanczos on an inverse orbit agrees with the exact recursion") {
  const auto spec = PolySequenceSpec::quadratic(Real(3, 256));
  const DiscreteMeasure orbit = julia_inverse_orbit(spec, 10);
  const JacobiCoeffs exact = julia_exact_coeffs(Real(3, 256), 16);
  const JacobiCoeffs lz = lanczos_from_discrete(orbit, 16);
  CHECK(lz.provenance() == Provenance::lanczos);
  const CrossValidationReport r = cross_validate(exact, lz, 16, Real(1e-60));
  CHECK_FALSE(r.first_divergence_index.has_value());
  CHECK(r.max_abs_dev_a < Real(1e-60));
}

TEST_CASE("Lanczos matches a long-double Stieltjes oracle on random measures") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    const DiscreteMeasure m = oracle::random_measure(rng, 40 + rng.index(40), 256);
    std::vector<long double> x, w, a, b;
    for (const Atom& at : m.atoms()) {
      x.push_back(static_cast<long double>(at.position.to_double()));
      w.push_back(static_cast<long double>(at.weight.to_double()));
    }
    oracle::stieltjes_ld(x, w, 6, a, b);
    const JacobiCoeffs c = lanczos_from_discrete(m, 6);
    for (std::size_t k = 1; k <= 6; ++k) {
      CHECK(std::abs(c.a(k).to_double() - static_cast<double>(a[k - 1])) < 1e-12);
      CHECK(std::abs(c.b(k).to_double() - static_cast<double>(b[k - 1])) < 1e-12);
    }
  }
}

TEST_CASE("Lanczos on a Gauss rule recovers the generating coefficients") {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const JacobiCoeffs c = oracle::random_jacobi(rng, 30, 256);
    const DiscreteMeasure g = gauss_rule(c, 30);
    for (auto mode : {Reorthogonalization::full, Reorthogonalization::none}) {
      const JacobiCoeffs back = lanczos_from_discrete(g, 29, {mode, true});
      for (std::size_t k = 1; k <= 29; ++k) {
        CHECK(oracle::close(back.a(k), c.a(k), 1e-50));
        CHECK(oracle::close(back.b(k), c.b(k), 1e-50));
      }
    }
  }
}

TEST_CASE("symmetric and general Lanczos sweeps agree") {
  const auto spec = PolySequenceSpec::quadratic(Real(2.5, 256));
  const DiscreteMeasure orbit = julia_inverse_orbit(spec, 9);
  const JacobiCoeffs fast = lanczos_from_discrete(orbit, 32, {Reorthogonalization::full, true});
  const JacobiCoeffs slow = lanczos_from_discrete(orbit, 32, {Reorthogonalization::full, false});
  CHECK_FALSE(cross_validate(fast, slow, 32, Real(1e-60)).first_divergence_index.has_value());
}

TEST_CASE("Lanczos length and degenerate cases") {
  std::vector<Atom> atoms = {{Real(0.0), Real(0.25)}, {Real(0.0), Real(0.25)},
                             {Real(1.0), Real(0.5)}};
  const DiscreteMeasure m(atoms);
  CHECK(lanczos_from_discrete(m, 1).length() == 1);
  CHECK_THROWS_AS(lanczos_from_discrete(m, 2), LengthError);
  CHECK(lanczos_from_discrete(m, 0).length() == 0);
  const JacobiCoeffs one = lanczos_from_discrete(m, 1);
  CHECK(oracle::close(one.b(1), Real(0.5), 1e-70));
  CHECK(oracle::close(one.a(1), Real(0.5), 1e-70));
}

TEST_CASE("moment and Lanczos routes agree on the Cantor measure") {
  const AffineIFS cantor = AffineIFS::cantor(256);
  const std::size_t n = 6;
  const JacobiCoeffs cheb = chebyshev_from_moments(ifs_moments(cantor, 2 * n), n);
  for (std::size_t k = 1; k <= n; ++k) {
    CHECK(oracle::close(cheb.a(k) * cheb.a(k), parse_real(oracle::cantor_a_squared()[k - 1]),
                        1e-60));
    CHECK(oracle::close(cheb.b(k), Real(0.5), 1e-60));
  }
  // Gauss-base refinement with 8 nodes is exact below degree 16.
  const JacobiCoeffs lz = lanczos_from_discrete(ifs_gauss_refine(cantor, 8, 4), n);
  CHECK_FALSE(cross_validate(cheb, lz, n, Real(1e-55)).first_divergence_index.has_value());
  CHECK_THROWS_AS(chebyshev_from_moments(ifs_moments(cantor, 3), 2), LengthError);
}

TEST_CASE("escalation raises precision until two runs agree") {
  const auto moments = [](Precision bits) { return ifs_moments(AffineIFS::cantor(bits), 80); };
  const EscalationResult r = chebyshev_escalated(moments, 40, Real(1e-30));
  CHECK(r.bits_used >= 320);
  CHECK(r.attempts >= 1);
  const JacobiCoeffs lz = lanczos_from_discrete(ifs_gauss_refine(AffineIFS::cantor(256), 8, 8), 40);
  CHECK_FALSE(cross_validate(r.coeffs, lz, 40, Real(1e-30)).first_divergence_index.has_value());
  CHECK_THROWS_AS(chebyshev_escalated(moments, 40, Real(1e-30), nullptr, 128), NumericalFailure);
}

TEST_CASE("Chebyshev on 64-bit moments breaks down and reports it") {
  // At 64 bits the Hankel determinants of the Cantor measure underflow the
  // working precision well before order 40.
  CHECK_THROWS_AS(chebyshev_from_moments(ifs_moments(AffineIFS::cantor(64), 80), 40),
                  NumericalFailure);
}

TEST_CASE("cross-validation reports the first divergence") {
  const JacobiCoeffs lhs = julia_exact_coeffs(Real(3.0), 10);
  std::vector<Real> a = lhs.a_values(), b = lhs.b_values();
  a[6] += 1e-5;
  const JacobiCoeffs rhs(a, b, 256, Provenance::lanczos);
  const CrossValidationReport r = cross_validate(lhs, rhs, 10, Real(1e-8));
  REQUIRE(r.first_divergence_index.has_value());
  CHECK(*r.first_divergence_index == 7);
  CHECK(oracle::close(r.max_abs_dev_a, Real(1e-5), 1e-15));
  CHECK(r.max_abs_dev_b.is_zero());
  CHECK_THROWS_AS(cross_validate(lhs, rhs, 11, Real(1e-8)), LengthError);
  CHECK(stabilized_prefix(lhs, rhs, Real(1e-8)) == 6);
  CHECK(trusted_prefix(16384) == 256);
}
