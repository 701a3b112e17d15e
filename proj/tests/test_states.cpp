#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "tomonet/error.hpp"
#include "tomonet/states.hpp"

using namespace tomonet;
using namespace tomonet::test;

namespace {

DensityMatrix diag_state(std::size_t n, std::vector<double> d) {
  return DensityMatrix(n, ComplexMatrix::diagonal(d));
}

}  // namespace

TEST_CASE("ghz_like amplitudes") {
  auto s = ghz_like(3, 0.0);
  CHECK(s.amplitudes[0] == Complex(1.0));
  for (std::size_t i = 1; i < 8; ++i) CHECK(s.amplitudes[i] == Complex{});

  s = ghz_like(2, std::numbers::pi / 4);
  CHECK(std::abs(s.amplitudes[0] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s.amplitudes[3] - 1 / std::sqrt(2.0)) < 1e-15);

  s = ghz_like(2, std::numbers::pi / 6);
  CHECK(std::abs(s.amplitudes[0] - std::sqrt(3.0) / 2) < 1e-15);
  CHECK(std::abs(s.amplitudes[3] - 0.5) < 1e-15);
  CHECK(s.amplitudes[1] == Complex{});

  CHECK_THROWS_AS(ghz_like(0, 0.1), Error);
}

TEST_CASE("dicke amplitudes") {
  auto s = dicke(3, 0);
  CHECK(s.amplitudes[0] == Complex(1.0));

  s = dicke(2, 1);
  CHECK(std::abs(s.amplitudes[1] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s.amplitudes[2] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(s.amplitudes[0] == Complex{});
  CHECK(s.amplitudes[3] == Complex{});

  CHECK_THROWS_AS(dicke(2, 3), Error);

  // enumeration oracle: count basis strings of each weight
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t k = 0; k <= n; ++k) {
      const auto st = dicke(n, k);
      std::size_t nonzero = 0;
      double norm = 0.0;
      for (std::size_t i = 0; i < st.amplitudes.size(); ++i) {
        if (st.amplitudes[i] == Complex{}) continue;
        ++nonzero;
        CHECK(st.amplitudes[i] == st.amplitudes[(std::size_t{1} << k) - 1]);
        norm += std::norm(st.amplitudes[i]);
      }
      std::size_t expected = 0;
      for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) expected += std::popcount(i) == static_cast<int>(k);
      CHECK(nonzero == expected);
      CHECK(std::abs(norm - 1.0) <= 1e-12);
    }
  const auto s42 = dicke(4, 2);
  std::size_t nz = 0;
  for (const auto& a : s42.amplitudes)
    if (a != Complex{}) {
      ++nz;
      CHECK(std::abs(a - 1 / std::sqrt(6.0)) < 1e-15);
    }
  CHECK(nz == 6);
}

TEST_CASE("random_mixed_hs contract and determinism") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    RandomStream rng(seed);
    const auto rho = random_mixed_hs(1 + seed % 3, rng);
    CHECK(check_density(rho.matrix()).ok());
  }
  RandomStream a(42), b(42);
  CHECK(random_mixed_hs(2, a).matrix() == random_mixed_hs(2, b).matrix());
}

TEST_CASE("random_mixed_hs mean purity matches the Hilbert-Schmidt ensemble") {
  // E[tr rho^2] = 2d / (d^2 + 1) for d = 4.
  RandomStream rng(2024);
  double sum = 0.0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) sum += purity(random_mixed_hs(2, rng));
  CHECK(std::abs(sum / samples - 8.0 / 17.0) <= 0.005);
}

TEST_CASE("fidelity") {
  RandomStream rng(1);
  const auto rho = random_mixed_hs(2, rng);
  CHECK(std::abs(fidelity(rho, rho) - 1.0) <= 1e-9);

  const auto psi = ghz_like(2, 0.3), phi = dicke(2, 1);
  Complex overlap = 0;
  const auto chi = ghz_like(2, 1.1);
  for (std::size_t i = 0; i < 4; ++i) overlap += std::conj(psi.amplitudes[i]) * chi.amplitudes[i];
  CHECK(std::abs(fidelity(DensityMatrix::from_pure(psi), DensityMatrix::from_pure(chi)) - std::norm(overlap)) <= 1e-12);
  CHECK(fidelity(DensityMatrix::from_pure(psi), DensityMatrix::from_pure(phi)) <= 1e-12);

  const auto zero = DensityMatrix::from_pure(StateVector{2, {1, 0, 0, 0}});
  CHECK(std::abs(fidelity(DensityMatrix::maximally_mixed(2), zero) - 0.25) <= 1e-12);

  CHECK_THROWS_AS(fidelity(DensityMatrix::maximally_mixed(1), zero), Error);
}

TEST_CASE("fidelity is symmetric and bounded") {
  RandomStream rng(77);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + i % 3;
    const auto a = random_mixed_hs(n, rng), b = random_mixed_hs(n, rng);
    const double fab = fidelity(a, b), fba = fidelity(b, a);
    CHECK(std::abs(fab - fba) <= 1e-8);
    CHECK(fab >= 0.0);
    CHECK(fab <= 1.0);
  }
}

TEST_CASE("purity") {
  CHECK(std::abs(purity(DensityMatrix::from_pure(ghz_like(3, 0.7))) - 1.0) <= 1e-12);
  CHECK(purity(DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(purity(diag_state(2, {0.5, 0, 0, 0.5})) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("negativity") {
  CHECK(negativity(DensityMatrix::from_pure(StateVector{2, {0, 1, 0, 0}})) <= 1e-12);
  CHECK(std::abs(negativity(bell_state()) - 0.5) <= 1e-10);
  CHECK(negativity(DensityMatrix::maximally_mixed(2)) <= 1e-12);
  CHECK_THROWS_AS(negativity(DensityMatrix::maximally_mixed(2), 2), Error);
  CHECK_THROWS_AS(negativity(DensityMatrix::maximally_mixed(2), 0), Error);
}

TEST_CASE("negativity vanishes on PPT states") {
  RandomStream rng(99);
  int ppt = 0;
  for (int i = 0; i < 1000; ++i) {
    // product states are always PPT
    const auto a = random_mixed_hs(1, rng), b = random_mixed_hs(1, rng);
    const DensityMatrix prod(2, kron(a.matrix(), b.matrix()));
    CHECK(negativity(prod) <= 1e-9);

    const auto rho = random_mixed_hs(2, rng);
    if (hermitian_eig(partial_transpose(rho.matrix(), 2, 1)).eigenvalues.front() >= 0.0) {
      ++ppt;
      CHECK(negativity(rho) <= 1e-9);
    }
  }
  CHECK(ppt > 0);
}

TEST_CASE("metric_deviations") {
  RandomStream rng(3);
  const auto rho = random_mixed_hs(2, rng);
  auto d = metric_deviations(rho, rho);
  CHECK(d.purity == 0.0);
  CHECK(d.negativity == 0.0);

  d = metric_deviations(bell_state(), DensityMatrix::maximally_mixed(2));
  CHECK(std::abs(d.purity - 0.75) <= 1e-10);
  CHECK(std::abs(d.negativity - 0.5) <= 1e-10);

  d = metric_deviations(diag_state(2, {1, 0, 0, 0}), diag_state(2, {0.5, 0, 0, 0.5}));
  CHECK(std::abs(d.purity - 0.5) <= 1e-12);
  CHECK(d.negativity <= 1e-12);

  CHECK_THROWS_AS(metric_deviations(DensityMatrix::maximally_mixed(1), rho), Error);
}

TEST_CASE("DensityMatrix rejects invalid matrices") {
  CHECK_THROWS_AS(DensityMatrix(1, ComplexMatrix::identity(2)), Error);             // trace 2
  CHECK_THROWS_AS(DensityMatrix(1, ComplexMatrix{{1.5, 0}, {0, -0.5}}), Error);    // negative
  CHECK_THROWS_AS(DensityMatrix(2, ComplexMatrix{{0.5, 0}, {0, 0.5}}), Error);     // wrong size
}
