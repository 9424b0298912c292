#include "doctest.h"

#include <set>

#include "weilbc/error.hpp"
#include "weilbc/normmap.hpp"

using namespace weilbc;

namespace {

GElem scalar_elem(const FieldElem& x) { return from_matrix(Mat::scalar(x, 1)); }

FieldElem mat_trace(const Mat& m) {
  FieldElem s = m.tower()->zero();
  for (int i = 0; i < m.rows(); ++i) s += m.at(i, i);
  return s;
}

}  // namespace

TEST_CASE("choose_t") {
  for (int m = 1; m <= 6; ++m) CHECK(choose_t(1 % m, m).t == 1);
  const auto c34 = choose_t(3, 4);
  CHECK(c34.t == 3);
  CHECK(c34.d == 1);
  const auto c24 = choose_t(2, 4);
  CHECK(c24.t == 1);
  CHECK(c24.d == 2);
  CHECK(c24.mu == 2);
  CHECK(c24.j == 1);
  const auto c0 = choose_t(0, 3);
  CHECK(c0.d == 3);
  CHECK(c0.t == 1);
  // the defining congruence, against a direct scan
  for (int m = 2; m <= 12; ++m)
    for (int i = 1; i < m; ++i) {
      const auto c = choose_t(i, m);
      int g = 0;
      for (int k = 1; k <= m; ++k)
        if (m % k == 0 && i % k == 0) g = k;
      CHECK(c.d == g);
      CHECK((c.t * i) % m == g % m);
      for (int t = 1; t < c.t; ++t) CHECK((t * i) % m != g % m);
    }
  CHECK_THROWS_AS(choose_t(4, 4), ConfigInvalid);
  CHECK_THROWS_AS(make_config(1, 2, 4), ConfigInvalid);
  CHECK(make_config(1, 5, 4).t == 5);
}

TEST_CASE("twisted product in GL1") {
  auto t = Tower::build(3, 1, 2);
  const FieldElem z = t->primitive_element(2);
  const GElem g = scalar_elem(z);
  CHECK(twisted_product(1, g, 1).s == g.s);
  CHECK(twisted_product(1, g, 2).s == Mat::scalar(z.pow(4), 1));
  CHECK(twisted_product(1, g, 2).s == Mat::scalar(t->from_int(2), 1));
  CHECK(twisted_product(1, scalar_elem(t->one()), 2).s.is_identity());
}

TEST_CASE("Lang equation in GL1") {
  auto t = Tower::build(3, 1, 2);
  const FieldElem z = t->primitive_element(2);
  LangSolver solver(GroupKind::GL1, 1, t);
  // α² = ζ²
  const auto w = solver.solve(scalar_elem(z * z), 1);
  CHECK(w.lang_level == 2);
  const FieldElem a = w.alpha.s.at(0, 0);
  CHECK((a == z || a == -z));
  // identity target
  CHECK(solver.solve(scalar_elem(t->one()), 1).alpha.s.frobenius(1) == solver.solve(scalar_elem(t->one()), 1).alpha.s);
  // a nonsquare of F_9 needs F_81, and no witness exists in F_9
  FieldElem ns = z;
  const auto w2 = solver.solve(scalar_elem(ns), 1);
  CHECK(w2.lang_level == 4);
  const FieldElem a2 = w2.alpha.s.at(0, 0);
  CHECK(a2.pow(2) == w2.target.s.at(0, 0));
  Group gl1(GroupKind::GL1, 1, t, 2);
  CHECK_FALSE(lang_search(gl1, scalar_elem(ns), 1).has_value());
  CHECK(lang_search(gl1, scalar_elem(z * z), 1).has_value());
  LangSolver capped(GroupKind::GL1, 1, t, 2);
  CHECK_THROWS_AS(capped.solve(scalar_elem(ns), 1), AmbientCapExceeded);
}

TEST_CASE("abelian norm is the classical norm") {
  for (auto [m, i] : {std::pair{2, 1}, {3, 1}, {3, 2}, {4, 1}, {4, 2}, {4, 3}}) {
    CAPTURE(m);
    CAPTURE(i);
    auto t = Tower::build(3, 1, m);
    const auto cfg = choose_t(i, m);
    GyojaNorm norm(Group(GroupKind::GL1, 1, t, m), cfg);
    for (const auto& x : t->level(m).elements) {
      if (x.is_zero()) continue;
      const GElem nx = norm(scalar_elem(x));
      REQUIRE(nx.s.at(0, 0) == t->norm_to(x, m, cfg.d));
    }
  }
}

TEST_CASE("SL2(F_9) norms against exhaustive Lang search") {
  auto t = Tower::build(3, 1, 2);
  Group src(GroupKind::Sp, 1, t, 2);
  GyojaNorm norm(src, choose_t(1, 2));
  const auto& tc = norm.target_classes();
  CHECK(tc.num_classes() == 7);
  int searched = 0;
  for (std::uint64_t code : src.enumerate()) {
    const GElem g = src.decode(code);
    LangWitness w;
    const GElem n = norm.apply(g, &w);
    REQUIRE(n.s.in_level(1));
    // same characteristic polynomial as the μ-fold product
    REQUIRE(mat_trace(n.s) == mat_trace(twisted_product(1, g, 2).s));
    if (w.lang_level <= 2) {
      const auto a = lang_search(src, twisted_product(1, g, 1), 1);
      REQUIRE(a.has_value());
      const GElem n2 = *a * twisted_product(1, g, 2) * a->inverse();
      REQUIRE(tc.class_id(norm.target().encode(n2)) == tc.class_id(norm.target().encode(n)));
      ++searched;
    }
  }
  CHECK(searched > 0);
}

TEST_CASE("norm class is invariant under twisted conjugacy") {
  auto t = Tower::build(3, 1, 2);
  Group src(GroupKind::Sp, 1, t, 2);
  GyojaNorm norm(src, choose_t(1, 2));
  Rng rng(11);
  for (std::uint64_t code : src.enumerate()) {
    const GElem g = src.decode(code);
    const GElem h = src.random(rng);
    const GElem g2 = h * g * h.frobenius(1).inverse();
    REQUIRE(norm.norm_class(g) == norm.norm_class(g2));
  }
}

TEST_CASE("norms land in the base level for other groups") {
  SUBCASE("SL2 over F_27 and F_81") {
    for (auto [m, i] : {std::pair{3, 1}, {3, 2}, {4, 1}, {4, 2}, {4, 3}}) {
      auto t = Tower::build(3, 1, m);
      Group src(GroupKind::Sp, 1, t, m);
      GyojaNorm norm(src, choose_t(i, m));
      Rng rng(static_cast<std::uint64_t>(m * 10 + i));
      for (int k = 0; k < 25; ++k) {
        const GElem g = src.random(rng);
        const GElem n = norm(g);
        REQUIRE(n.s.in_level(norm.config().d));
        REQUIRE(mat_trace(n.s) == mat_trace(twisted_product(i, g, norm.config().mu).s));
      }
    }
  }
  SUBCASE("GL2(F_9) similitude factors") {
    auto t = Tower::build(3, 1, 2);
    Group src(GroupKind::GSp, 1, t, 2);
    GyojaNorm norm(src, choose_t(1, 2));
    Rng rng(4);
    for (int k = 0; k < 60; ++k) {
      const GElem g = src.random(rng);
      const GElem n = norm(g);
      REQUIRE(n.s.det() == t->norm_to(g.s.det(), 2, 1));
    }
  }
  SUBCASE("Sp4(F_9)") {
    auto t = Tower::build(3, 1, 2);
    Group src(GroupKind::Sp, 2, t, 2);
    GyojaNorm norm(src, choose_t(1, 2));
    Rng rng(6);
    for (int k = 0; k < 15; ++k) {
      const GElem n = norm(src.random(rng));
      REQUIRE(membership(n.s, 1).kind == Membership::Symp);
    }
  }
  SUBCASE("Jacobi group over F_9") {
    auto t = Tower::build(3, 1, 2);
    Group src(GroupKind::Jacobi, 1, t, 2);
    GyojaNorm norm(src, choose_t(1, 2));
    Rng rng(7);
    for (int k = 0; k < 40; ++k) {
      const GElem g = src.random(rng);
      LangWitness w;
      const GElem n = norm.apply(g, &w);
      REQUIRE(norm.target().contains(n));
      REQUIRE(mat_trace(n.s) == mat_trace(twisted_product(1, g, 2).s));
    }
  }
}

TEST_CASE("change of base field gives the same norm class") {
  // (i, m) = (2, 4) over F_3 against (j, μ) = (1, 2) over F_9
  auto t1 = Tower::build(3, 1, 4);
  auto t2 = Tower::build(3, 2, 2);
  const Embedding e(t1, t2);
  Group src1(GroupKind::Sp, 1, t1, 4);
  Group src2(GroupKind::Sp, 1, t2, 2);
  GyojaNorm n1(src1, choose_t(2, 4));
  GyojaNorm n2(src2, choose_t(1, 2));
  CHECK(n1.config().t == n2.config().t);
  Rng rng(21);
  for (int k = 0; k < 40; ++k) {
    const GElem g = src1.random(rng);
    const GElem a = embed(n1(g), e);
    const GElem b = n2(embed(g, e));
    REQUIRE(n2.target_classes().class_id(n2.target().encode(a)) ==
            n2.target_classes().class_id(n2.target().encode(b)));
  }
}

TEST_CASE("bijection on classes") {
  auto t = Tower::build(3, 1, 2);
  Group src(GroupKind::Sp, 1, t, 2);
  const auto r = verify_bijection(GyojaNorm(src, choose_t(1, 2)));
  CHECK(r.twisted_classes == 7);
  CHECK(r.target_classes == 7);
  CHECK(r.ok());
  CHECK(r.rows.size() == 7);
  std::uint64_t total = 0;
  for (const auto& row : r.rows) total += row.twisted_size;
  CHECK(total == 720);
  const auto r0 = verify_bijection(GyojaNorm(src, choose_t(0, 2)));
  CHECK(r0.twisted_classes == 13);
  CHECK(r0.ok());
  for (const auto& row : r0.rows) CHECK(row.twisted_rep == row.norm_rep);
  Group gl(GroupKind::GSp, 1, t, 2);
  const auto rg = verify_bijection(GyojaNorm(gl, choose_t(1, 2)));
  CHECK(rg.target_classes == 8);
  CHECK(rg.ok());
  GyojaNorm norm(src, choose_t(1, 2));
  const std::string tsv = bijection_tsv(norm, r);
  CHECK(tsv.rfind("twisted_rep\ttwisted_size\tnorm_rep\tnorm_size\n", 0) == 0);
}
