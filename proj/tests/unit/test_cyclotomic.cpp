#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "weilbc/cyclotomic.hpp"
#include "weilbc/error.hpp"
#include "weilbc/fieldtower.hpp"
#include "weilbc/rng.hpp"

using namespace weilbc;

namespace {

CycNum random_cyc(int p, Rng& rng) {
  std::vector<std::int64_t> num(p - 1);
  for (auto& v : num) v = static_cast<std::int64_t>(rng.below(11)) - 5;
  return CycNum::from_coeffs(p, num, static_cast<std::int64_t>(rng.below(4)) + 1);
}

bool close(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) < 1e-9 * (1 + std::abs(a)); }

}  // namespace

TEST_CASE("basic identities in Q(zeta_3)") {
  const CycNum z = CycNum::zeta(3, 1);
  const CycNum a = CycNum::rational(3, 1) + z.scaled(2);
  // (1+2z)^2 = 1 + 4z + 4z^2 = 1 + 4z - 4 - 4z = -3
  CHECK(a * a == CycNum::rational(3, -3));
  CHECK(z.conj() == CycNum::zeta(3, 2));
  CHECK(z.inv() == CycNum::zeta(3, 2));
  CHECK(CycNum::zeta(5, 1).inv() == CycNum::zeta(5, 4));
  CHECK(CycNum::zeta(3, 3) == CycNum::rational(3, 1));
  CHECK_THROWS_AS(CycNum(3).inv(), DivisionByZero);
  // 1 + z + z^2 = 0
  CHECK((CycNum::rational(3, 1) + z + z * z).is_zero());
}

TEST_CASE("field axioms on random values") {
  for (int p : {3, 5, 7}) {
    Rng rng(100 + p);
    int tested = 0;
    while (tested < 1000 / (p == 3 ? 1 : 4)) {
      const CycNum a = random_cyc(p, rng);
      const CycNum b = random_cyc(p, rng);
      const CycNum c = random_cyc(p, rng);
      CHECK((a + b) * c == a * c + b * c);
      CHECK(a * b == b * a);
      CHECK(close((a * b).to_complex(), a.to_complex() * b.to_complex()));
      CHECK(a.conj().conj() == a);
      CHECK((a * b).conj() == a.conj() * b.conj());
      CHECK(close(a.conj().to_complex(), std::conj(a.to_complex())));
      if (!a.is_zero()) {
        CHECK(a * a.inv() == CycNum::rational(p, 1));
        ++tested;
      }
      CHECK((a * a.conj()).to_complex().real() >= -1e-12);
    }
  }
}

TEST_CASE("text form and complex rendering") {
  const CycNum z = CycNum::zeta(3, 1);
  CHECK(close(z.to_complex(), {-0.5, std::sqrt(3.0) / 2}));
  const CycNum g = CycNum::rational(3, 1) + z.scaled(2);
  CHECK(close(g.to_complex(), {0.0, std::sqrt(3.0)}));
  CHECK(close(CycNum::rational(3, 3).to_complex(), {3.0, 0.0}));
  CHECK(g.to_string() == "1/1,2/1");
  const CycNum h = CycNum::from_coeffs(5, {1, 2, 0, -3}, 6);
  CHECK(h.to_string() == "1/6,1/3,0/1,-1/2");
  CHECK(CycNum::parse(h.to_string()) == h);
  CHECK_THROWS_AS(CycNum::parse("1/0,2"), ParseError);
}

TEST_CASE("gauss sums") {
  auto t3 = Tower::build(3, 1, 2);
  const CycNum z3 = CycNum::zeta(3, 1);
  // direct summation over F_3: squares 0,1,1
  CHECK(gauss_sum(*t3, 1, t3->one()) == CycNum::rational(3, 1) + z3.scaled(2));
  CHECK(gauss_sum(*t3, 2, t3->one()) == CycNum::rational(3, 3));

  auto t5 = Tower::build(5, 1, 2);
  // squares in F_5: 0,1,4,4,1
  CHECK(gauss_sum(*t5, 1, t5->one()) == CycNum::rational(5, 1) + CycNum::zeta(5, 1).scaled(2) + CycNum::zeta(5, 4).scaled(2));

  for (auto [p, b, m] : {std::tuple{3, 1, 2}, std::tuple{3, 1, 4}, std::tuple{5, 1, 2}, std::tuple{7, 1, 2}, std::tuple{3, 2, 2}}) {
    auto t = Tower::build(p, b, m);
    for (const auto& a : t->level(1).elements) {
      if (a.is_zero()) continue;
      for (int d : t->registered_levels()) {
        const CycNum G = gauss_sum(*t, d, a);
        // numeric oracle
        std::complex<double> s{0, 0};
        for (const auto& x : t->level(d).elements) {
          const int e = t->psi_exponent(x * x, d, a);
          s += std::polar(1.0, 2 * std::numbers::pi * e / p);
        }
        CHECK(close(G.to_complex(), s));
        const std::int64_t qd = static_cast<std::int64_t>(t->q_pow(d));
        CHECK(G * G == CycNum::rational(p, t->quad_char(-t->one(), d) * qd));
      }
      // Hasse-Davenport: G over F_{q^2} = -(G over F_q)^2
      if (t->has_level(2)) {
        const CycNum g1 = gauss_sum(*t, 1, a);
        CHECK(gauss_sum(*t, 2, a) == -(g1 * g1));
      }
    }
  }
}

TEST_CASE("overflow is detected") {
  const CycNum big = CycNum::rational(3, std::int64_t{1} << 40);
  CHECK_THROWS_AS(big * big, ArithmeticOverflow);
}
