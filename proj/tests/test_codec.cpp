#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "tomonet/codec.hpp"
#include "tomonet/error.hpp"

using namespace tomonet;
using namespace tomonet::test;

namespace {

Bounds uniform_bounds(std::size_t count, double lo, double hi) {
  return Bounds{std::vector<double>(count, lo), std::vector<double>(count, hi)};
}

}  // namespace

TEST_CASE("parameter layout") {
  CHECK(param_count(1) == 4);
  CHECK(param_count(2) == 16);
  CHECK(param_count(6) == 4096);
  CHECK(lower_entry_offset(4, 1, 0) == 4);
  CHECK(lower_entry_offset(4, 2, 0) == 6);
  CHECK(lower_entry_offset(4, 2, 1) == 8);
  CHECK(lower_entry_offset(4, 3, 2) == 14);
}

TEST_CASE("state_to_params fixed cases") {
  const auto p = state_to_params(DensityMatrix::maximally_mixed(2));
  CHECK(p.alpha.size() == 16);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(p.alpha[i] - 0.5) <= 1e-12);
  for (std::size_t i = 4; i < 16; ++i) CHECK(std::abs(p.alpha[i]) <= 1e-12);

  const auto zero = state_to_params(DensityMatrix::from_pure(StateVector{2, {1, 0, 0, 0}}));
  CHECK(zero.alpha[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < 16; ++i) CHECK(std::abs(zero.alpha[i]) <= 1e-12);
}

TEST_CASE("params_to_state fixed cases") {
  ParamVector p{2, std::vector<double>(16)};
  p.alpha[0] = 1.0;
  CHECK(max_abs_diff(params_to_state(p).matrix(), DensityMatrix::from_pure(StateVector{2, {1, 0, 0, 0}}).matrix()) <=
        1e-15);

  ParamVector zeros{2, std::vector<double>(16)};
  try {
    params_to_state(zeros);
    FAIL("expected ZeroTrace");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroTrace);
  }
  CHECK_THROWS_AS(params_to_state(ParamVector{2, std::vector<double>(15, 1.0)}), Error);
}

TEST_CASE("state -> params -> state round trip") {
  RandomStream rng(41);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (int i = 0; i < 1000; ++i) {
      const auto rho = i % 3 == 0 ? DensityMatrix::from_pure(ghz_like(n, rng.uniform(0, 1.5)))
                                  : random_mixed_hs(n, rng);
      worst = std::max(worst, max_abs_diff(params_to_state(state_to_params(rho)).matrix(), rho.matrix()));
    }
  CHECK(worst <= 1e-8);
}

TEST_CASE("params -> state -> params round trip on canonical factors") {
  // Factors with positive diagonal are recovered exactly.
  RandomStream rng(43);
  for (int i = 0; i < 500; ++i) {
    ParamVector p{2, std::vector<double>(16)};
    for (std::size_t k = 0; k < 4; ++k) p.alpha[k] = rng.uniform(0.1, 1.0);
    for (std::size_t k = 4; k < 16; ++k) p.alpha[k] = rng.normal();
    const auto back = state_to_params(params_to_state(p));
    const auto r = params_to_cholesky(p);
    const double scale = std::sqrt((r * r.adjoint()).trace().real());
    for (std::size_t k = 0; k < 16; ++k) CHECK(std::abs(back.alpha[k] - p.alpha[k] / scale) <= 1e-9);
  }
}

TEST_CASE("params_to_state is scale invariant and always valid") {
  RandomStream rng(47);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + i % 3;
    ParamVector p{n, std::vector<double>(param_count(n))};
    const double magnitude = std::pow(10.0, rng.uniform(-6, 6));
    for (auto& a : p.alpha) a = rng.normal() * magnitude;
    const auto rho = params_to_state(p);
    CHECK(check_density(rho.matrix()).ok());
    ParamVector scaled = p;
    const double c = rng.uniform(1e-3, 1e3);
    for (auto& a : scaled.alpha) a *= c;
    CHECK(max_abs_diff(params_to_state(scaled).matrix(), rho.matrix()) <= 1e-12);
  }
  ParamVector extreme{1, {1e6, -1e6, 1e6, -1e6}};
  CHECK(check_density(params_to_state(extreme).matrix()).ok());
  ParamVector nan{1, {std::numeric_limits<double>::quiet_NaN(), 0, 0, 0}};
  CHECK_THROWS_AS(params_to_state(nan), Error);
}

TEST_CASE("estimate_bounds") {
  std::vector<ParamVector> ps{{1, {-1.0, 0.0, 2.0, 3.0}}, {1, {1.0, 0.0, 2.0, 5.0}}};
  const auto b = estimate_bounds(ps, 0.05);
  CHECK(b.lo[0] == doctest::Approx(-1.1));
  CHECK(b.hi[0] == doctest::Approx(1.1));
  CHECK(b.lo[1] == doctest::Approx(-1e-6));
  CHECK(b.hi[1] == doctest::Approx(1e-6));
  CHECK(b.lo[2] == doctest::Approx(2.0 - 1e-6));
  CHECK(b.hi[3] == doctest::Approx(5.1));
  CHECK_THROWS_AS(estimate_bounds(std::vector<ParamVector>{}), Error);
}

TEST_CASE("onehot_encode fixed cases") {
  const auto b = uniform_bounds(1, -1.0, 1.0);
  auto y = onehot_encode(ParamVector{0, {-0.7}}, b, 4);
  CHECK(y.values.size() == 5);
  CHECK(y.values[0] == doctest::Approx(0.6));
  CHECK(y.values[1] == doctest::Approx(0.4));
  CHECK(y.values[2] == 0.0);

  y = onehot_encode(ParamVector{0, {-1.0}}, b, 4);
  CHECK(y.values[0] == 0.0);
  CHECK(y.values[1] == 1.0);

  y = onehot_encode(ParamVector{0, {1.0}}, b, 4);
  CHECK(y.values[3] == doctest::Approx(1.0));
  CHECK(y.values[4] == doctest::Approx(0.0));

  y = onehot_encode(ParamVector{0, {5.0}}, b, 4);  // clamped
  CHECK(y.values[3] + y.values[4] == doctest::Approx(1.0));
}

TEST_CASE("onehot blocks are simplex vectors with two adjacent nonzeros") {
  RandomStream rng(53);
  const auto b = uniform_bounds(16, -1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    ParamVector p{2, std::vector<double>(16)};
    for (auto& a : p.alpha) a = rng.uniform(-1, 1);
    const auto y = onehot_encode(p, b);
    CHECK(y.block_count() == 16);
    for (std::size_t k = 0; k < 16; ++k) {
      const auto blk = y.block(k);
      double sum = 0.0;
      std::size_t first = blk.size(), last = 0;
      for (std::size_t j = 0; j < blk.size(); ++j) {
        CHECK(blk[j] >= 0.0);
        sum += blk[j];
        if (blk[j] != 0.0) {
          first = std::min(first, j);
          last = j;
        }
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      CHECK(last - first <= 1);
    }
  }
}

TEST_CASE("onehot round trip") {
  RandomStream rng(59);
  for (std::size_t n_sec : {4u, 20u, 50u}) {
    Bounds b{std::vector<double>(16), std::vector<double>(16)};
    for (std::size_t k = 0; k < 16; ++k) {
      b.lo[k] = rng.uniform(-2, 0);
      b.hi[k] = b.lo[k] + rng.uniform(0.1, 3);
    }
    const double width = *std::max_element(b.hi.begin(), b.hi.end()) - *std::min_element(b.lo.begin(), b.lo.end());
    for (int i = 0; i < 1000; ++i) {
      ParamVector p{2, std::vector<double>(16)};
      for (std::size_t k = 0; k < 16; ++k) p.alpha[k] = rng.uniform(b.lo[k], b.hi[k]);
      const auto back = onehot_decode(onehot_encode(p, b, n_sec), b, 2);
      for (std::size_t k = 0; k < 16; ++k) CHECK(std::abs(back.alpha[k] - p.alpha[k]) <= 1e-12 * std::max(1.0, width));
    }
  }
}

TEST_CASE("onehot_decode on a flat block") {
  const auto b = uniform_bounds(1, -1.0, 1.0);
  EncodedVector y{4, std::vector<double>(5, 0.2)};
  const auto p = onehot_decode(y, b, 0);
  CHECK(p.alpha[0] == doctest::Approx(-1.0 + 0.25));
  CHECK_THROWS_AS(onehot_decode(EncodedVector{4, std::vector<double>(7, 0.2)}, b, 0), Error);
}
