#include "doctest.h"

#include <random>

#include "qtlr/quaternion.hpp"
#include "support.hpp"

using qtlr::Quaterniond;
using testsupport::random_q;

namespace {

bool near(const Quaterniond& a, const Quaterniond& b, double tol = 1e-12) {
  return qtlr::max_abs_diff(a, b) <= tol;
}

}  // namespace

TEST_CASE("hamilton relations") {
  const auto i = Quaterniond::i(), j = Quaterniond::j(), k = Quaterniond::k();
  const Quaterniond minus_one{-1, 0, 0, 0};
  CHECK(i * i == minus_one);
  CHECK(j * j == minus_one);
  CHECK(k * k == minus_one);
  CHECK(i * j * k == minus_one);
  CHECK(i * j == k);
  CHECK(j * i == -k);
}

TEST_CASE("mul examples") {
  const Quaterniond q{0.3, -1.2, 2.5, 0.7};
  CHECK(q * Quaterniond{1, 0, 0, 0} == q);
  CHECK(Quaterniond{1, 1, 0, 0} * Quaterniond{1, 0, 1, 0} == Quaterniond{1, 1, 1, 1});
}

TEST_CASE("conjugate, inverse, modulus") {
  CHECK(qtlr::conj(Quaterniond::i()) == -Quaterniond::i());
  CHECK(qtlr::modulus(Quaterniond{1, 1, 1, 1}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(near(qtlr::inverse(Quaterniond::j()), -Quaterniond::j()));
  CHECK_THROWS_AS(qtlr::inverse(Quaterniond{}), qtlr::DomainError);

  const auto r = qtlr::conj_inv_mod(Quaterniond{1, 2, 3, 4});
  CHECK(r.modulus == doctest::Approx(std::sqrt(30.0)));
  CHECK(near(r.inverse * Quaterniond{1, 2, 3, 4}, Quaterniond{1, 0, 0, 0}));
  CHECK(near(r.conjugate, Quaterniond{1, -2, -3, -4}));
}

TEST_CASE("purity predicate") {
  CHECK(Quaterniond{0, 1, 2, 3}.is_pure());
  CHECK_FALSE(Quaterniond{1e-300, 1, 2, 3}.is_pure());
}

TEST_CASE("properties on random quaternions") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_q(rng), b = random_q(rng), c = random_q(rng);
    const auto lhs = (a * b) * c, rhs = a * (b * c);
    CHECK(qtlr::max_abs_diff(lhs, rhs) <= 1e-12 * std::max(1.0, qtlr::modulus(lhs)));
    CHECK(std::abs(qtlr::modulus(a * b) - qtlr::modulus(a) * qtlr::modulus(b)) <=
          1e-12 * qtlr::modulus(a) * qtlr::modulus(b));
    const auto n = qtlr::conj(a) * a;
    CHECK(std::abs(n.w - qtlr::squared_modulus(a)) <= 1e-12 * n.w);
    CHECK(std::abs(n.x) + std::abs(n.y) + std::abs(n.z) <= 1e-12 * n.w);
  }
}
