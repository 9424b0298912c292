#include "doctest.h"

#include <cstdio>
#include <array>
#include <cmath>
#include <filesystem>

#include "weilbc/error.hpp"
#include "weilbc/schrodinger.hpp"

using namespace weilbc;

namespace {

WeilRepresentation make_rep(int p, int b, int m, int n, int level) {
  auto t = Tower::build(p, b, m);
  return WeilRepresentation(t, n, level, t->one());
}

// ψ(x) by the trace written out as Σ x^{p^k}.
int psi_oracle(const Tower& t, const FieldElem& x, int level) {
  FieldElem s = t.zero(), y = x;
  for (int k = 0; k < t.base_degree() * level; ++k) {
    s += y;
    y = y.pow(static_cast<unsigned>(t.p()));
  }
  for (int c = 0; c < t.p(); ++c)
    if (s == t.from_int(c)) return c;
  FAIL("trace outside the prime field");
  return 0;
}

int eps_oracle(const Tower& t, const FieldElem& x, int level) {
  for (const auto& y : t.level(level).elements)
    if (y * y == x) return 1;
  return -1;
}

// Weyl operator from its defining formula, with κ computed from a directly summed Gauss sum.
WeilOperator weyl_oracle(const WeilRepresentation& rep, const Mat& c) {
  const Tower& t = rep.tower();
  const int d = rep.level();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(t.p()), 0);
  for (const auto& x : t.level(d).elements) ++counts[static_cast<std::size_t>(psi_oracle(t, x * x, d))];
  const CycNum G = CycNum::from_exponent_counts(t.p(), counts);
  CycNum k = CycNum::rational(t.p(), 1);
  for (int j = 0; j < rep.n(); ++j) k *= G.scaled(eps_oracle(t, t.from_int(2), d));
  const CycNum kappa = k.inv().scaled(eps_oracle(t, c.det(), d));
  const Mat ci = c.inverse();
  return WeilOperator::from_function(t.p(), rep.dim(), [&](std::size_t y, std::size_t x) {
    const FieldElem e = -dot(ci.apply(rep.points()[y]), rep.points()[x]);
    return kappa * CycNum::zeta(t.p(), psi_oracle(t, e, d));
  });
}

Group sp(const WeilRepresentation& rep) { return Group(GroupKind::Sp, rep.n(), rep.tower_ptr(), rep.level()); }

}  // namespace

TEST_CASE("operator arithmetic") {
  const auto I = WeilOperator::identity(3, 4);
  auto A = WeilOperator::from_function(3, 4, [](std::size_t i, std::size_t j) {
    return CycNum::zeta(3, static_cast<long>(i + 2 * j)).scaled(1, static_cast<std::int64_t>(i + 1));
  });
  CHECK(A * I == A);
  CHECK(I * A == A);
  CHECK(A.entry(1, 1) == CycNum::zeta(3, 3).scaled(1, 2));
  CHECK(A.conj_transpose().entry(2, 1) == A.entry(1, 2).conj());
  CHECK(WeilOperator::parse(3, 4, A.serialize()) == A);
  // (A·B)[0,0] by explicit summation
  const auto B = A.conj_transpose();
  CycNum s(3);
  for (std::size_t k = 0; k < 4; ++k) s += A.entry(0, k) * B.entry(k, 0);
  CHECK((A * B).entry(0, 0) == s);
  CHECK(I.is_monomial());
  CHECK_FALSE(A.is_monomial());
}

TEST_CASE("unipotent and Levi examples at q=3") {
  auto rep = make_rep(3, 1, 1, 1, 1);
  const Tower& t = rep.tower();
  const auto U = rep.op_unip(Mat::scalar(t.one(), 1));
  CHECK(U.entry(0, 0) == CycNum::rational(3, 1));
  CHECK(U.entry(1, 1) == CycNum::zeta(3, 2));
  CHECK(U.entry(2, 2) == CycNum::zeta(3, 2));
  CHECK(U.trace() == CycNum::rational(3, 1) + CycNum::zeta(3, 2).scaled(2));
  const auto L = rep.op_levi(Mat::scalar(-t.one(), 1));
  CHECK(L.trace() == CycNum::rational(3, -1));
  const auto W = rep.op_weyl(Mat::scalar(t.one(), 1));
  CHECK(W * W == L);
  CHECK_THROWS_AS(rep.op_levi(Mat::scalar(t.zero(), 1)), Singular);
  CHECK_THROWS_AS(rep.op_weyl(Mat::scalar(t.zero(), 1)), NotSymplectic);
}

TEST_CASE("generator operators match their formulas") {
  for (auto [p, b, n, d] : {std::array{3, 1, 1, 1}, {3, 2, 1, 1}, {5, 1, 1, 1}, {3, 1, 2, 1}, {7, 1, 1, 1}}) {
    CAPTURE(p);
    CAPTURE(b);
    CAPTURE(n);
    auto rep = make_rep(p, b, 1, n, d);
    const Tower& t = rep.tower();
    Group g = sp(rep);
    Rng rng(17);
    for (int trial = 0; trial < 4; ++trial) {
      const Mat c = g.random_invertible(rng);
      CHECK(rep.op_weyl(c) == weyl_oracle(rep, c));
      const Mat bs = g.random_symmetric(rng);
      const auto U = rep.op_unip(bs);
      for (std::size_t y = 0; y < rep.dim(); y += 3) {
        const Vec& v = rep.points()[y];
        const FieldElem q = dot(v, bs.apply(v)) * half(t);
        CHECK(U.entry(y, y) == CycNum::zeta(p, psi_oracle(t, q, d)));
      }
    }
    if (n == 2) {
      Mat nonsym = Mat::identity(t, 2);
      nonsym.at(0, 1) = t.one();
      CHECK_THROWS_AS(rep.op_unip(nonsym), NotSymplectic);
    }
  }
}

TEST_CASE("Siegel factorization certificates") {
  for (auto [p, b, n] : {std::array{3, 1, 1}, {3, 2, 1}, {3, 1, 2}, {5, 1, 2}}) {
    auto rep = make_rep(p, b, 1, n, 1);
    Group g = sp(rep);
    Rng rng(3);
    for (int k = 0; k < 30; ++k) {
      const Mat s = g.random(rng).s;
      CHECK(rep.siegel_factor(s).product(rep.tower(), n) == s);
    }
  }
  // singular nonzero corner
  auto rep = make_rep(3, 1, 1, 2, 1);
  const Tower& t = rep.tower();
  Mat c(t, 2, 2);
  c.at(0, 0) = t.one();
  const Mat s = siegel_lower(c);
  const auto w = rep.siegel_factor(s);
  CHECK(w.product(t, 2) == s);
  CHECK(w.gens.back().kind == Generator::Kind::Weyl);
  CHECK(w.gens.back().m == -Mat::identity(t, 2));
  CHECK_THROWS_AS(rep.siegel_factor(similitude_diag(t, 2, t.from_int(2))), NotSymplectic);
  // the standard Weyl element factors as itself
  const auto w1 = rep.siegel_factor(weyl(Mat::identity(t, 2)));
  REQUIRE(w1.gens.size() == 1);
  CHECK(w1.gens[0].kind == Generator::Kind::Weyl);
}

TEST_CASE("homomorphism on random pairs") {
  for (auto [p, b, n, pairs] : {std::array{3, 2, 1, 200}, {5, 1, 1, 200}, {3, 1, 2, 60}}) {
    CAPTURE(p);
    CAPTURE(b);
    CAPTURE(n);
    auto rep = make_rep(p, b, 1, n, 1);
    Group g = sp(rep);
    Rng rng(2024);
    for (int k = 0; k < pairs; ++k) {
      const Mat x = g.random(rng).s, y = g.random(rng).s;
      const auto rx = rep.build_rho_matrix(x), ry = rep.build_rho_matrix(y);
      REQUIRE(rx * ry == rep.build_rho_matrix(x * y));
    }
  }
}

TEST_CASE("unitarity and character absolute values") {
  auto rep = make_rep(3, 2, 1, 1, 1);
  Group g = sp(rep);
  const Tower& t = rep.tower();
  const auto I = WeilOperator::identity(3, rep.dim());
  for (std::uint64_t code : g.enumerate()) {
    const Mat s = g.decode(code).s;
    const auto R = rep.build_rho_matrix(s);
    REQUIRE(R * R.conj_transpose() == I);
    // |tr ρ(s)|² = |ker(s - 1)|
    const CycNum tr = rep.trace(from_matrix(s));
    const auto k = kernel(s - Mat::identity(t, 2));
    const std::int64_t ksize = static_cast<std::int64_t>(std::llround(std::pow(9.0, static_cast<double>(k.size()))));
    REQUIRE(tr * tr.conj() == CycNum::rational(3, ksize));
  }
}

TEST_CASE("Jacobi group relations") {
  auto rep = make_rep(3, 1, 1, 2, 1);
  Group j(GroupKind::Jacobi, 2, rep.tower_ptr(), 1);
  const Tower& t = rep.tower();
  Rng rng(99);
  for (int k = 0; k < 40; ++k) {
    const GElem x = j.random(rng), y = j.random(rng);
    REQUIRE(rep.build_rho(x) * rep.build_rho(y) == rep.build_rho(x * y));
    REQUIRE(rep.trace(x) == rep.build_rho(x).trace());
  }
  // centre acts by ψ(t)
  const HeisElem z{vec_zero(t, 4), t.one()};
  CHECK(rep.op_heis(z) == WeilOperator::identity(3, rep.dim()).scaled(CycNum::zeta(3, 1)));
  CHECK_THROWS_AS(rep.op_heis(HeisElem{vec_zero(t, 3), t.one()}), DimensionMismatch);
}

TEST_CASE("Galois operator intertwines and extended traces") {
  for (auto [p, b, m, n] : {std::array{3, 1, 2, 1}, {3, 1, 3, 1}, {3, 1, 2, 2}}) {
    CAPTURE(m);
    CAPTURE(n);
    auto rep = make_rep(p, b, m, n, m);
    const Tower& t = rep.tower();
    const auto Is = rep.op_galois(1);
    std::int64_t qn = 1;
    for (int k = 0; k < n; ++k) qn *= static_cast<std::int64_t>(t.q());
    CHECK(Is.trace() == CycNum::rational(p, qn));
    CHECK(rep.op_galois(m) == WeilOperator::identity(p, rep.dim()));
    CHECK(Is * rep.op_galois(-1) == WeilOperator::identity(p, rep.dim()));
    Group j(GroupKind::Jacobi, n, rep.tower_ptr(), m);
    Rng rng(5);
    for (int k = 0; k < 12; ++k) {
      const GElem g = j.random(rng);
      REQUIRE(Is * rep.build_rho(g) == rep.build_rho(g.frobenius(1)) * Is);
      for (int i = 0; i < m; ++i) REQUIRE(rep.extended_trace(i, g) == (rep.build_rho(g) * rep.op_galois(i)).trace());
    }
  }
}

TEST_CASE("GSp character values") {
  auto rep = make_rep(3, 1, 1, 1, 1);
  const Tower& t = rep.tower();
  // π(1) = (q-1)·q^n
  CHECK(gsp_character(rep, Mat::identity(t, 2)) == CycNum::rational(3, 6));
  CHECK(gsp_character(rep, similitude_diag(t, 1, t.from_int(2))).is_zero());
  Group g(GroupKind::GSp, 1, rep.tower_ptr(), 1);
  // class function on GSp
  Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    const Mat x = g.random(rng).s, h = g.random(rng).s;
    CHECK(gsp_character(rep, h * x * h.inverse()) == gsp_character(rep, x));
  }
  // i = 0 at the base level agrees with π
  for (int k = 0; k < 10; ++k) {
    const Mat x = g.random(rng).s;
    CHECK(extended_gsp_trace(rep, 0, x) == gsp_character(rep, x));
  }
}

TEST_CASE("operator cache round trip") {
  auto rep = make_rep(3, 2, 1, 1, 1);
  Group g = sp(rep);
  Rng rng(1);
  std::vector<Mat> xs;
  for (int k = 0; k < 5; ++k) {
    xs.push_back(g.random(rng).s);
    rep.rho_matrix_cached(xs.back());
  }
  const auto path = (std::filesystem::temp_directory_path() / "weilbc_opcache_test.txt").string();
  rep.save_cache(path);
  auto fresh = make_rep(3, 2, 1, 1, 1);
  CHECK(fresh.load_cache(path) == rep.cache_size());
  for (const auto& x : xs) CHECK(*fresh.rho_matrix_cached(x) == rep.build_rho_matrix(x));
  auto other = make_rep(3, 1, 1, 1, 1);
  CHECK(other.load_cache(path) == 0);
  std::remove(path.c_str());
}
