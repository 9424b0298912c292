#include <algorithm>
#include <set>

#include "doctest.h"
#include "weilbc/error.hpp"
#include "weilbc/fieldtower.hpp"
#include "weilbc/rng.hpp"

using namespace weilbc;

namespace {

// Brute-force oracle: f is irreducible iff no monic polynomial of degree 1..D/2 divides it.
bool divides(const std::vector<int>& g, std::vector<int> f, int p) {
  const int dg = static_cast<int>(g.size()) - 1;
  for (int k = static_cast<int>(f.size()) - 1; k >= dg; --k) {
    const int c = f[k];
    for (int j = 0; j <= dg; ++j) f[k - dg + j] = ((f[k - dg + j] - c * g[j]) % p + p) % p;
  }
  for (int k = 0; k < dg; ++k)
    if (f[k]) return false;
  return true;
}

bool oracle_irreducible(const std::vector<int>& f, int p) {
  const int D = static_cast<int>(f.size()) - 1;
  for (int e = 1; e <= D / 2; ++e) {
    std::vector<int> g(e + 1, 0);
    g[e] = 1;
    for (;;) {
      if (divides(g, f, p)) return false;
      int k = 0;
      while (k < e && ++g[k] == p) g[k++] = 0;
      if (k == e) break;
    }
  }
  return true;
}

std::vector<std::uint8_t> oracle_smallest(int p, int D) {
  std::vector<int> f(D + 1, 0);
  f[D] = 1;
  for (;;) {
    if (oracle_irreducible(f, p)) return {f.begin(), f.end()};
    // c_0 most significant, so c_{D-1} advances fastest
    int k = D - 1;
    while (k >= 0 && ++f[k] == p) f[k--] = 0;
    REQUIRE(k >= 0);
  }
}

std::vector<FieldElem> all_ambient(const Tower& t) {
  std::vector<FieldElem> out;
  std::vector<int> c(t.degree(), 0);
  for (;;) {
    out.push_back(t.from_coeffs(c));
    int k = t.degree() - 1;
    while (k >= 0 && ++c[k] == t.p()) c[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

}  // namespace

TEST_CASE("modulus is the lexicographically smallest irreducible") {
  for (int p : {3, 5, 7}) {
    for (int D : {1, 2, 3, 4}) {
      auto t = Tower::build(p, 1, D);
      CHECK(t->modulus() == oracle_smallest(p, D));
    }
  }
  CHECK(Tower::build(3, 1, 6)->modulus() == oracle_smallest(3, 6));
  CHECK(Tower::build(3, 1, 2)->modulus() == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(Tower::build(3, 1, 3)->modulus() == std::vector<std::uint8_t>{1, 0, 2, 1});
  CHECK(Tower::build(3, 1, 4)->modulus() == std::vector<std::uint8_t>{1, 0, 1, 1, 1});
}

TEST_CASE("build_tower registers divisor levels and validates p") {
  auto t = Tower::build(3, 1, 4);
  CHECK(t->registered_levels() == std::vector<int>{1, 2, 4});
  CHECK(t->level(1).elements.size() == 3);
  CHECK(t->level(2).elements.size() == 9);
  CHECK(t->level(4).elements.size() == 81);
  CHECK_THROWS_AS(Tower::build(2, 1, 2), EvenCharacteristic);
  CHECK_THROWS_AS(Tower::build(9, 1, 2), NotPrime);
  CHECK_THROWS_AS(t->level(3), LevelMismatch);

  auto t9 = Tower::build(3, 2, 2);
  CHECK(t9->q() == 9);
  CHECK(t9->level(1).size == 9);
  CHECK(t9->level(2).size == 81);
}

TEST_CASE("levels are exactly the Frobenius fixed sets") {
  auto t = Tower::build(3, 1, 4);
  auto amb = all_ambient(*t);
  for (int d : {1, 2, 4}) {
    std::set<FieldElem> oracle;
    for (const auto& x : amb)
      if (x.pow(t->q_pow(d)) == x) oracle.insert(x);
    std::set<FieldElem> got(t->level(d).elements.begin(), t->level(d).elements.end());
    CHECK(got == oracle);
    CHECK(std::is_sorted(t->level(d).elements.begin(), t->level(d).elements.end()));
    for (std::uint32_t i = 0; i < t->level(d).elements.size(); ++i)
      CHECK(t->level(d).index_of(t->level(d).elements[i]) == i);
  }
}

TEST_CASE("frobenius") {
  auto t = Tower::build(3, 1, 2);
  const FieldElem u = t->generator();
  CHECK(u * u == -t->one());
  CHECK(t->frobenius(u, 1) == u * u * u);
  CHECK(t->frobenius(u, 1) == -u);
  CHECK(t->frobenius(u, -1) == -u);
  for (const auto& x : t->level(2).elements) {
    CHECK(t->frobenius(x, 2) == x);
    CHECK(t->frobenius(x, 1) == x.pow(3));
    CHECK(t->frobenius(t->frobenius(x, 1), -1) == x);
  }
  for (const auto& c : t->level(1).elements) CHECK(t->frobenius(c, 1) == c);

  // automorphism fixing exactly F_q, full check over F_81
  auto t4 = Tower::build(3, 1, 4);
  const auto& els = t4->level(4).elements;
  int fixed = 0;
  for (const auto& x : els) {
    if (t4->frobenius(x, 1) == x) ++fixed;
    for (std::size_t j = 0; j < els.size(); j += 7) {
      const auto& y = els[j];
      CHECK(t4->frobenius(x * y, 1) == t4->frobenius(x, 1) * t4->frobenius(y, 1));
      CHECK(t4->frobenius(x + y, 1) == t4->frobenius(x, 1) + t4->frobenius(y, 1));
    }
  }
  CHECK(fixed == 3);
}

TEST_CASE("field axioms and inverse") {
  auto t = Tower::build(5, 1, 2);
  for (const auto& x : t->level(2).elements) {
    if (x.is_zero()) {
      CHECK_THROWS_AS(x.inverse(), DivisionByZero);
      continue;
    }
    CHECK((x * x.inverse()).is_one());
    CHECK(x.pow(24).is_one());
  }
}

TEST_CASE("trace and norm") {
  auto t = Tower::build(3, 1, 2);
  const FieldElem u = t->generator();
  CHECK(t->trace_to(u, 2, 1).is_zero());
  CHECK(t->norm_to(u, 2, 1).is_one());
  CHECK(t->trace_to(t->one(), 2, 1) == t->from_int(2));
  CHECK_THROWS_AS(t->trace_to(u, 1, 1), LevelMismatch);

  auto t4 = Tower::build(3, 1, 4);
  CHECK_THROWS_AS(t4->trace_to(t4->one(), 4, 3), LevelMismatch);
  for (const auto& x : t4->level(4).elements) {
    CHECK(t4->trace_to(x, 4, 1) == t4->trace_to(t4->trace_to(x, 4, 2), 2, 1));
    CHECK(t4->norm_to(x, 4, 1) == t4->norm_to(t4->norm_to(x, 4, 2), 2, 1));
    // norm to F_q is x^{(q^4-1)/(q-1)}
    CHECK(t4->norm_to(x, 4, 1) == x.pow(40));
  }
}

TEST_CASE("quadratic character") {
  auto t = Tower::build(3, 1, 2);
  CHECK(t->quad_char(t->one(), 1) == 1);
  CHECK(t->quad_char(t->from_int(2), 1) == -1);
  CHECK_THROWS_AS(t->quad_char(t->zero(), 1), ZeroArgument);
  for (int d : {1, 2}) {
    const auto& els = t->level(d).elements;
    std::set<FieldElem> squares;
    for (const auto& x : els)
      if (!x.is_zero()) squares.insert(x * x);
    int plus = 0, minus = 0;
    for (const auto& x : els) {
      if (x.is_zero()) continue;
      const int e = t->quad_char(x, d);
      CHECK(e == (squares.count(x) ? 1 : -1));
      (e == 1 ? plus : minus)++;
      for (const auto& y : els)
        if (!y.is_zero()) CHECK(t->quad_char(x * y, d) == e * t->quad_char(y, d));
    }
    CHECK(plus == minus);
  }
}

TEST_CASE("additive character") {
  for (auto [p, b, m] : {std::tuple{3, 1, 2}, std::tuple{3, 1, 4}, std::tuple{5, 1, 2}, std::tuple{3, 2, 2}}) {
    auto t = Tower::build(p, b, m);
    const FieldElem one = t->one();
    for (int d : t->registered_levels()) {
      const auto& els = t->level(d).elements;
      std::vector<int> hist(p, 0);
      for (const auto& x : els) {
        hist[t->psi_exponent(x, d, one)]++;
        if (els.size() <= 81)
          for (const auto& y : els)
            CHECK(t->psi_exponent(x + y, d, one) == (t->psi_exponent(x, d, one) + t->psi_exponent(y, d, one)) % p);
      }
      // Σ ψ = 0 iff each residue is hit equally often
      for (int k = 0; k < p; ++k) CHECK(hist[k] * p == static_cast<int>(els.size()));
      // ψ' = ψ ∘ tr
      for (int e : t->registered_levels()) {
        if (e % d != 0) continue;
        for (const auto& x : t->level(e).elements)
          CHECK(t->psi_exponent(x, e, one) == t->psi_exponent(t->trace_to(x, e, d), d, one));
      }
    }
  }
  auto t = Tower::build(3, 1, 2);
  CHECK(t->psi_exponent(t->zero(), 1, t->one()) == 0);
  CHECK(t->psi_exponent(t->one(), 1, t->one()) == 1);
  CHECK(t->psi_exponent(t->generator(), 2, t->one()) == 0);
}

TEST_CASE("serialization round trip") {
  auto t = Tower::build(5, 1, 3);
  const std::string s = t->serialize();
  CHECK(s.find("modulus=") != std::string::npos);
  auto back = Tower::parse(s);
  CHECK(back->modulus() == t->modulus());
  CHECK(back->p() == 5);
  CHECK(back->registered_levels() == t->registered_levels());
  CHECK_THROWS_AS(Tower::parse("p=3\nbase_degree=1\nm=2\nambient_degree=2\nmodulus=2,0,1\n"), ParseError);
}

TEST_CASE("enlargement embeds the old ambient") {
  auto t = Tower::build(3, 1, 2);
  auto big = enlarge(t, 4);
  const Tower& T = *big.tower;
  CHECK(T.degree() == 4);
  // oracle: smallest root of x^2+1 among all of F_81
  FieldElem best;
  bool found = false;
  for (const auto& y : all_ambient(T))
    if ((y * y + T.one()).is_zero() && (!found || y < best)) {
      best = y;
      found = true;
    }
  REQUIRE(found);
  CHECK(big.embedding->root() == best);
  const auto& emb = *big.embedding;
  for (const auto& x : t->level(2).elements) {
    for (const auto& y : t->level(2).elements) {
      CHECK(emb.apply(x * y) == emb.apply(x) * emb.apply(y));
      CHECK(emb.apply(x + y) == emb.apply(x) + emb.apply(y));
    }
    CHECK(emb.preimage(emb.apply(x)) == x);
    // the old Frobenius is the restriction of the new one
    CHECK(emb.apply(t->frobenius(x, 1)) == T.frobenius(emb.apply(x), 1));
  }
  int in_image = 0;
  for (const auto& y : all_ambient(T))
    if (emb.preimage(y)) ++in_image;
  CHECK(in_image == 9);

  // larger enlargement through root finding
  auto t2 = Tower::build(3, 1, 4);
  auto big2 = enlarge(t2, 12);
  Rng rng(7);
  const auto& els = t2->level(4).elements;
  for (int k = 0; k < 50; ++k) {
    const auto& x = els[rng.below(els.size())];
    const auto& y = els[rng.below(els.size())];
    CHECK(big2.embedding->apply(x * y) == big2.embedding->apply(x) * big2.embedding->apply(y));
    CHECK(big2.embedding->preimage(big2.embedding->apply(x)) == x);
  }
}

TEST_CASE("smallest nonsquare and primitive element") {
  auto t = Tower::build(3, 1, 2);
  CHECK(t->smallest_nonsquare() == t->from_int(2));
  auto t5 = Tower::build(5, 1, 1);
  CHECK(t5->smallest_nonsquare() == t5->from_int(2));
  const FieldElem g = t->primitive_element(2);
  std::set<FieldElem> powers;
  FieldElem x = t->one();
  for (int k = 0; k < 8; ++k) {
    powers.insert(x);
    x *= g;
  }
  CHECK(powers.size() == 8);
}
