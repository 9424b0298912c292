#include <map>
#include <set>

#include "doctest.h"
#include "weilbc/error.hpp"
#include "weilbc/grouplib.hpp"

using namespace weilbc;

namespace {

// all 2x2 matrices over a level with the given determinant predicate
template <class Pred>
std::vector<Mat> brute_2x2(const Tower& t, int d, Pred pred) {
  std::vector<Mat> out;
  const auto& els = t.level(d).elements;
  for (const auto& a : els)
    for (const auto& b : els)
      for (const auto& c : els)
        for (const auto& e : els) {
          Mat m(t, 2, 2);
          m.at(0, 0) = a;
          m.at(0, 1) = b;
          m.at(1, 0) = c;
          m.at(1, 1) = e;
          if (pred(m.det())) out.push_back(m);
        }
  return out;
}

// number of conjugacy classes by direct orbit computation
std::size_t brute_class_count(const std::vector<Mat>& G) {
  std::set<Mat> done;
  std::size_t classes = 0;
  for (const auto& x : G) {
    if (done.count(x)) continue;
    ++classes;
    for (const auto& h : G) done.insert(h * x * h.inverse());
  }
  return classes;
}

}  // namespace

TEST_CASE("membership") {
  auto t = Tower::build(3, 1, 2);
  CHECK(membership(symplectic_J(*t, 1), 1).kind == Membership::Symp);
  CHECK(membership(symplectic_J(*t, 2), 1).kind == Membership::Symp);
  auto r = membership(Mat::from_rows(*t, {{2, 0}, {0, 2}}), 1);
  CHECK(r.kind == Membership::Symp);
  r = membership(Mat::from_rows(*t, {{2, 0}, {0, 1}}), 1);
  CHECK(r.kind == Membership::Similitude);
  CHECK(r.lambda == t->from_int(2));
  CHECK(membership(Mat::from_rows(*t, {{1, 1}, {1, 1}}), 1).kind == Membership::Neither);
  CHECK_THROWS_AS(membership(Mat(*t, 3, 3), 1), DimensionMismatch);
  // n = 2: symplectic iff gᵀJg = J; check the standard families
  Mat b = Mat::from_rows(*t, {{1, 2}, {2, 0}});
  CHECK(membership(siegel_unip(b), 1).kind == Membership::Symp);
  CHECK(membership(siegel_lower(b), 1).kind == Membership::Symp);
  CHECK(membership(levi(Mat::from_rows(*t, {{1, 1}, {0, 1}})), 1).kind == Membership::Symp);
  CHECK(membership(weyl(Mat::from_rows(*t, {{0, 1}, {1, 1}})), 1).kind == Membership::Symp);
  Mat nonsym = Mat::from_rows(*t, {{0, 1}, {0, 0}});
  CHECK(membership(siegel_unip(nonsym), 1).kind == Membership::Neither);
}

TEST_CASE("heisenberg law") {
  auto t = Tower::build(3, 1, 2);
  HeisElem e1 = heis_identity(*t, 1), f1 = heis_identity(*t, 1);
  e1.v[0] = t->one();
  f1.v[1] = t->one();
  const HeisElem prod = heis_mul(e1, f1);
  CHECK(prod.v[0] == t->one());
  CHECK(prod.v[1] == t->one());
  CHECK(prod.t == t->from_int(2));
  const HeisElem sq = heis_mul(e1, e1);
  CHECK(sq.v[0] == t->from_int(2));
  CHECK(sq.t.is_zero());
  CHECK(heis_mul(prod, heis_inv(prod)) == heis_identity(*t, 1));

  // center is central, associativity, full check over H(F_3)
  Group H(GroupKind::Jacobi, 1, t, 1);
  std::vector<HeisElem> all;
  for (const auto& a : t->level(1).elements)
    for (const auto& b : t->level(1).elements)
      for (const auto& c : t->level(1).elements) all.push_back({{a, b}, c});
  for (const auto& x : all) {
    for (const auto& z : t->level(1).elements) {
      HeisElem zz = heis_identity(*t, 1);
      zz.t = z;
      CHECK(heis_mul(x, zz) == heis_mul(zz, x));
    }
    for (std::size_t k = 0; k < all.size(); k += 5)
      for (std::size_t l = 0; l < all.size(); l += 7)
        CHECK(heis_mul(heis_mul(x, all[k]), all[l]) == heis_mul(x, heis_mul(all[k], all[l])));
  }
}

TEST_CASE("twisted multiplication") {
  auto t = Tower::build(3, 1, 2);
  Group G(GroupKind::Sp, 1, t, 2);
  Rng rng(3);
  const GElem one = G.identity();
  for (int k = 0; k < 30; ++k) {
    const GElem g = G.random(rng), h = G.random(rng), f = G.random(rng);
    const TwistedElem sg = twisted_mul({1, one}, {0, g}, 2);
    CHECK(sg.i == 1);
    CHECK(sg.g == g.frobenius(1));
    const TwistedElem gs = twisted_mul({0, g}, {1, one}, 2);
    CHECK(gs.g == g);
    const TwistedElem sq = twisted_mul({1, g}, {1, g}, 2);
    CHECK(sq.i == 0);
    CHECK(sq.g == g * g.frobenius(1));
    const TwistedElem a{1, g}, b{0, h}, c{1, f};
    const auto l = twisted_mul(twisted_mul(a, b, 2), c, 2);
    const auto r = twisted_mul(a, twisted_mul(b, c, 2), 2);
    CHECK(l.i == r.i);
    CHECK(l.g == r.g);
    const auto inv = twisted_mul(a, twisted_inv(a, 2), 2);
    CHECK(inv.i == 0);
    CHECK(inv.g == one);
  }
}

TEST_CASE("jacobi group axioms") {
  auto t = Tower::build(3, 1, 2);
  Group G(GroupKind::Jacobi, 1, t, 2);
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    const GElem a = G.random(rng), b = G.random(rng), c = G.random(rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * a.inverse() == G.identity());
    CHECK(a.inverse() * a == G.identity());
    CHECK(G.contains(a * b));
    CHECK((a * b).frobenius(1) == a.frobenius(1) * b.frobenius(1));
  }
}

TEST_CASE("enumeration") {
  auto t = Tower::build(3, 1, 2);
  for (int d : {1, 2}) {
    Group G(GroupKind::Sp, 1, t, d);
    const auto codes = G.enumerate();
    auto oracle = brute_2x2(*t, d, [](const FieldElem& x) { return x.is_one(); });
    CHECK(codes.size() == oracle.size());
    std::set<std::uint64_t> oc;
    for (const auto& m : oracle) oc.insert(G.encode(from_matrix(m)));
    CHECK(std::vector<std::uint64_t>(oc.begin(), oc.end()) == codes);
    for (auto c : codes) CHECK(G.encode(G.decode(c)) == c);
  }
  CHECK(Group(GroupKind::Sp, 1, t, 1).enumerate().size() == 24);
  CHECK(Group(GroupKind::Sp, 1, t, 2).enumerate().size() == 720);
  // GSp_2 = GL_2
  Group GL(GroupKind::GSp, 1, t, 1);
  CHECK(GL.enumerate().size() == brute_2x2(*t, 1, [](const FieldElem& x) { return !x.is_zero(); }).size());
  CHECK(Group(GroupKind::GSp, 1, t, 2).enumerate().size() == 5760);
  CHECK(Group(GroupKind::Jacobi, 1, t, 1).enumerate().size() == 24 * 27);

  // Sp_4(F_3): symplectic bases count (q^4-1) * q^3 * |SL_2(F_3)|
  Group sp4(GroupKind::Sp, 2, t, 1);
  CHECK(sp4.order() == 80ull * 27 * 24);
  CHECK(sp4.enumerate().size() == 51840);
  CHECK_THROWS_AS(sp4.enumerate(10000), GroupTooLarge);
  Group sp4_9(GroupKind::Sp, 2, t, 2);
  CHECK_THROWS_AS(sp4_9.enumerate(), GroupTooLarge);

  // canonical code order equals canonical matrix order
  Group G(GroupKind::Sp, 1, t, 1);
  const auto codes = G.enumerate();
  for (std::size_t k = 1; k < codes.size(); ++k) CHECK(G.decode(codes[k - 1]).s < G.decode(codes[k]).s);

  // random elements are deterministic in the seed
  Rng r1(11), r2(11);
  for (int k = 0; k < 10; ++k) CHECK(G.random(r1) == G.random(r2));
}

TEST_CASE("conjugacy classes") {
  auto t = Tower::build(3, 1, 2);
  Group G1(GroupKind::Sp, 1, t, 1), G2(GroupKind::Sp, 1, t, 2);
  const auto c1 = conjugacy_classes(G1);
  const auto c2 = conjugacy_classes(G2);
  CHECK(c1.num_classes() == brute_class_count(brute_2x2(*t, 1, [](const FieldElem& x) { return x.is_one(); })));
  CHECK(c1.num_classes() == 3 + 4);
  CHECK(c2.num_classes() == 9 + 4);
  const auto tw = twisted_classes(G2, 1);
  CHECK(tw.num_classes() == 7);
  const auto tw0 = twisted_classes(G2, 0);
  CHECK(tw0.class_of == c2.class_of);
  CHECK(tw0.reps == c2.reps);
  // reps are the least elements of their class and sizes add up
  std::uint64_t total = 0;
  for (std::size_t c = 0; c < c2.num_classes(); ++c) {
    total += c2.sizes[c];
    CHECK(c2.class_id(c2.reps[c]) == c);
  }
  CHECK(total == 720);
  for (std::size_t e = 0; e < c2.elements.size(); ++e) CHECK(c2.reps[c2.class_of[e]] <= c2.elements[e]);

  // GL_2(F_3) has q^2 - 1 = 8 classes
  CHECK(conjugacy_classes(Group(GroupKind::GSp, 1, t, 1)).num_classes() == 8);

  const std::string tsv = classes_tsv(G1, c1);
  CHECK(tsv.rfind("class_id\trepresentative\tsize\n", 0) == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 8);
}

TEST_CASE("twisted class counts match base class counts") {
  for (auto [p, m] : {std::pair{3, 2}, std::pair{3, 3}, std::pair{5, 2}, std::pair{7, 2}}) {
    auto t = Tower::build(p, 1, m);
    Group top(GroupKind::Sp, 1, t, m);
    for (int i = 1; i < m; ++i) {
      const int d = std::gcd(i, m);
      Group base(GroupKind::Sp, 1, t, d);
      CHECK(twisted_classes(top, i).num_classes() == conjugacy_classes(base).num_classes());
    }
  }
}

TEST_CASE("sl2 torus") {
  auto t = Tower::build(3, 1, 2);
  const auto T = sl2_torus(t, 1);
  CHECK(T.order() == 4);
  CHECK(T.contains(Mat::from_rows(*t, {{2, 0}, {0, 2}})));
  const Mat w = Mat::from_rows(*t, {{0, 1}, {2, 0}});
  CHECK(T.contains(w));
  CHECK(w * w == Mat::from_rows(*t, {{2, 0}, {0, 2}}));
  CHECK(!(w * w).is_identity());
  int ord = 1;
  for (Mat x = T.generator; !x.is_identity(); x = x * T.generator) ++ord;
  CHECK(ord == 4);
  for (const auto& a : T.elements) {
    CHECK(membership(a, 1).kind == Membership::Symp);
    for (const auto& b : T.elements) CHECK(a * b == b * a);
    // only ±1 is upper triangular
    if (a.at(1, 0).is_zero()) CHECK((a.is_identity() || (-a).is_identity()));
  }
  int plus = 0;
  for (const auto& a : T.elements) plus += T.omega(a) == 1;
  CHECK(plus == 2);

  const auto T2 = sl2_torus(t, 2);
  CHECK(T2.order() == 8);
  auto t3 = Tower::build(3, 1, 3);
  CHECK(sl2_torus(t3, 3).order() == 28);
  auto t5 = Tower::build(5, 1, 2);
  CHECK(sl2_torus(t5, 1).order() == 6);
  CHECK(sl2_torus(t5, 2).order() == 24);
  // norm lands in the base torus and ω' = ω ∘ N is a character
  for (const auto& x : T2.elements) {
    const Mat nx = torus_norm(x, 2, 1);
    CHECK(T.contains(nx));
  }
}
