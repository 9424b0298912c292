#include "weilbc/characters.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "weilbc/error.hpp"

namespace weilbc {

namespace {

void check_support(const ClassFunction& a, const ClassFunction& b) {
  if (a.key != b.key || a.twist != b.twist || a.order != b.order || a.sizes != b.sizes)
    throw SupportMismatch("class functions live on different class partitions: " + a.key + " vs " + b.key);
}

template <class Op>
ClassFunction pointwise(const ClassFunction& a, const ClassFunction& b, Op op) {
  check_support(a, b);
  ClassFunction r = a;
  for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] = op(a.values[k], b.values[k]);
  return r;
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ClassFunction ClassFunction::conj() const {
  ClassFunction r = *this;
  for (auto& v : r.values) v = v.conj();
  return r;
}

ClassFunction ClassFunction::scaled(const CycNum& c) const {
  ClassFunction r = *this;
  for (auto& v : r.values) v *= c;
  return r;
}

ClassFunction operator+(const ClassFunction& a, const ClassFunction& b) {
  return pointwise(a, b, [](const CycNum& x, const CycNum& y) { return x + y; });
}
ClassFunction operator-(const ClassFunction& a, const ClassFunction& b) {
  return pointwise(a, b, [](const CycNum& x, const CycNum& y) { return x - y; });
}
ClassFunction operator*(const ClassFunction& a, const ClassFunction& b) {
  return pointwise(a, b, [](const CycNum& x, const CycNum& y) { return x * y; });
}

ClassFunction make_class_function(const std::string& key, const ClassPartition& cp, std::uint64_t order,
                                  const std::function<CycNum(std::uint64_t)>& f) {
  ClassFunction r;
  r.key = key;
  r.order = order;
  r.sizes = cp.sizes;
  r.values.reserve(cp.num_classes());
  for (std::uint64_t rep : cp.reps) r.values.push_back(f(rep));
  return r;
}

CycNum inner_product(const ClassFunction& a, const ClassFunction& b) {
  check_support(a, b);
  if (a.order == 0) throw ConfigInvalid("class function without a group order");
  CycNum s;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    s += (a.values[k] * b.values[k].conj()).scaled(static_cast<std::int64_t>(a.sizes[k]));
  return s.scaled(1, static_cast<std::int64_t>(a.order));
}

CycNum twisted_inner_product(const ClassFunction& a, const ClassFunction& b, int i) {
  if (a.twist != i || b.twist != i) throw SupportMismatch("class functions are not on the σ^" + std::to_string(i) + " coset");
  return inner_product(a, b);
}

ClassFunction weil_class_function(const WeilRepresentation& rep, const Group& g, const ClassPartition& cp) {
  if (g.kind() != GroupKind::Sp && g.kind() != GroupKind::Jacobi)
    throw ConfigInvalid("the Weil character is defined on Sp and Sp⋉H only");
  if (g.level() != rep.level() || g.n() != rep.n() || g.tower() != rep.tower_ptr())
    throw LevelMismatch("group and representation disagree on level, rank or tower");
  const std::string key = std::string(to_string(g.kind())) + "(n=" + std::to_string(g.n()) +
                          ",level=" + std::to_string(g.level()) + ")";
  return make_class_function(key, cp, g.order(), [&](std::uint64_t code) { return rep.trace(g.decode(code)); });
}

ClassFunction lift_class_function(const GyojaNorm& norm, const ClassFunction& chi, const ClassPartition& twisted) {
  if (chi.sizes != norm.target_classes().sizes)
    throw SupportMismatch("class function is not on the classes of the norm target");
  const Group& src = norm.source();
  const std::string key = std::string(to_string(src.kind())) + "(n=" + std::to_string(src.n()) + ",level=" +
                          std::to_string(src.level()) + ",twist=" + std::to_string(norm.config().i) + ")";
  ClassFunction r = make_class_function(
      key, twisted, src.order(), [&](std::uint64_t code) { return chi.values[norm.norm_class(src.decode(code))]; });
  r.twist = norm.config().i;
  return r;
}

std::string character_tsv(const Group& g, const ClassPartition& cp, const ClassFunction& f) {
  if (f.size() != cp.num_classes()) throw SupportMismatch("class function does not match the partition");
  std::ostringstream os;
  os << "class\trep\tsize\tvalue\tcomplex\n" << std::setprecision(12);
  for (std::size_t k = 0; k < cp.num_classes(); ++k) {
    const auto z = f.values[k].to_complex();
    os << k << '\t' << g.decode(cp.reps[k]).to_string() << '\t' << cp.sizes[k] << '\t' << f.values[k].to_string()
       << '\t' << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i\n";
  }
  return os.str();
}

TorusRestriction weil_torus_restriction(const std::shared_ptr<const Tower>& tower, int d, const FieldElem& scale) {
  WeilRepresentation rep(tower, 1, d, scale);
  const Sl2Torus T = sl2_torus(tower, d);
  TorusRestriction r;
  r.level = d;
  r.torus_order = T.order();
  r.omega_sign = T.order() == tower->q_pow(d) + 1 ? -1 : 1;
  const std::size_t N = T.order();
  Mat g = Mat::identity(*tower, 2);
  std::vector<int> omega(N);
  for (std::size_t e = 0; e < N; ++e) {
    const CycNum tr = rep.trace(from_matrix(g));
    if (!tr.is_rational() || tr.rational_value().second != 1)
      throw InternalError("torus trace is not a rational integer: " + tr.to_string());
    r.traces.push_back(tr.rational_value().first);
    omega[e] = T.omega(g);
    g = g * T.generator;
  }
  r.identity_holds = true;
  for (std::size_t e = 0; e < N; ++e) {
    const std::int64_t expect = (e == 0 ? static_cast<std::int64_t>(N) : 0) + r.omega_sign * omega[e];
    if (r.traces[e] != expect) r.identity_holds = false;
  }
  for (std::size_t k = 0; k < N; ++k) {
    std::complex<double> s = 0;
    for (std::size_t e = 0; e < N; ++e)
      s += static_cast<double>(r.traces[e]) *
           std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * e % N) / static_cast<double>(N));
    s /= static_cast<double>(N);
    const double re = std::round(s.real());
    if (std::abs(s.imag()) > 1e-6 || std::abs(s.real() - re) > 1e-6)
      throw InternalError("torus multiplicity is not an integer");
    r.multiplicities.push_back(static_cast<std::int64_t>(re));
  }
  r.omega_index = N / 2;
  return r;
}

TorusVirtualCheck torus_virtual_check(const std::shared_ptr<const Tower>& tower, const FieldElem& scale) {
  const Tower& tw = *tower;
  const int m = tw.m();
  const int P = tw.p();
  const Level& L = tw.level(m);
  const std::size_t Q = L.size;
  const Sl2Torus T = sl2_torus(tower, m);
  const std::size_t NT = T.order();
  const std::size_t E = static_cast<std::size_t>(m) * NT * Q * Q * Q;
  if (E > 4'000'000) throw GroupTooLarge("Γ⋉T(F')H(F') has " + std::to_string(E) + " elements");
  WeilRepresentation rep(tower, 1, m, scale);

  // Index arithmetic on F' = level m.
  std::vector<std::uint32_t> add(Q * Q), mul(Q * Q), neg(Q), psi(Q), pidx(Q), lidx(Q);
  for (std::size_t a = 0; a < Q; ++a) {
    neg[a] = L.index_of(-L.elements[a]);
    psi[a] = static_cast<std::uint32_t>(rep.psi(L.elements[a]));
    pidx[a] = rep.point_index(Vec{L.elements[a]});
    lidx[pidx[a]] = static_cast<std::uint32_t>(a);
    for (std::size_t b = 0; b < Q; ++b) {
      add[a * Q + b] = L.index_of(L.elements[a] + L.elements[b]);
      mul[a * Q + b] = L.index_of(L.elements[a] * L.elements[b]);
    }
  }
  const FieldElem hf = half(tw);
  const std::uint32_t h2 = L.index_of(hf);
  std::map<Mat, std::uint32_t> tindex;
  for (std::size_t k = 0; k < NT; ++k) tindex.emplace(T.elements[k], static_cast<std::uint32_t>(k));
  auto idx = [&](int i, std::size_t t, std::size_t w0, std::size_t w1, std::size_t z) {
    return (((static_cast<std::size_t>(i) * NT + t) * Q + w0) * Q + w1) * Q + z;
  };

  const int s1 = m % 2 == 0 ? -1 : 1;
  const int s2 = -s1;
  std::vector<std::int64_t> nu(E * static_cast<std::size_t>(P), 0);

  for (int i = 0; i < m; ++i) {
    const auto& perm = rep.galois_perm(i);
    // y with y + u1 = perm(y): the Heisenberg part of ρ(1,h)I^i meets the diagonal there
    std::vector<std::vector<std::uint32_t>> ys(Q);
    for (std::size_t y = 0; y < Q; ++y) {
      const std::uint32_t py = lidx[perm[pidx[y]]];
      for (std::size_t u1 = 0; u1 < Q; ++u1)
        if (add[y * Q + u1] == py) ys[u1].push_back(static_cast<std::uint32_t>(y));
    }
    // Ind from Γ⋉H: cosets (1,r), r ∈ T; r⁻¹(s,h)σ^i(r) ∈ H iff s = r σ^i(r)⁻¹
    for (std::size_t r = 0; r < NT; ++r) {
      const Mat& rm = T.elements[r];
      const std::uint32_t s = tindex.at(rm * rm.frobenius(i).inverse());
      for (std::size_t u0 = 0; u0 < Q; ++u0)
        for (std::size_t u1 = 0; u1 < Q; ++u1) {
          if (ys[u1].empty()) continue;
          const Vec w = rm.apply(Vec{L.elements[u0], L.elements[u1]});
          const std::uint32_t w0 = L.index_of(w[0]), w1 = L.index_of(w[1]);
          const std::uint32_t hu = neg[mul[h2 * Q + mul[u0 * Q + u1]]];
          for (std::size_t z = 0; z < Q; ++z) {
            const std::uint32_t base = add[z * Q + hu];
            std::int64_t* cell = nu.data() + idx(i, s, w0, w1, z) * static_cast<std::size_t>(P);
            for (std::uint32_t y : ys[u1]) cell[psi[add[base * Q + neg[mul[y * Q + u0]]]]] += s1;
          }
        }
    }
    // Ind from Γ⋉TZ: cosets (1,(v,0)); the conjugate lies in TZ iff w = v - sσ^i(v),
    // and then its center is z + ½⟨v, sσ^i(v)⟩
    for (std::size_t s = 0; s < NT; ++s) {
      const Mat& sm = T.elements[s];
      const int om = T.omega(sm) * s2;
      for (std::size_t v0 = 0; v0 < Q; ++v0)
        for (std::size_t v1 = 0; v1 < Q; ++v1) {
          const Vec v{L.elements[v0], L.elements[v1]};
          const Vec u = sm.apply(vec_frobenius(v, i));
          const Vec w = vec_sub(v, u);
          const std::uint32_t w0 = L.index_of(w[0]), w1 = L.index_of(w[1]);
          const std::uint32_t c = L.index_of(hf * symp_form(v, u));
          for (std::size_t z = 0; z < Q; ++z)
            nu[idx(i, s, w0, w1, z) * static_cast<std::size_t>(P) + psi[add[z * Q + c]]] += om;
        }
    }
  }

  TorusVirtualCheck out;
  out.m = m;
  out.elements = E;
  std::vector<__int128> acc(static_cast<std::size_t>(P));
  std::vector<__int128> norm2(static_cast<std::size_t>(P), 0);
  for (int i = 0; i < m; ++i) {
    const auto& perm = rep.galois_perm(i);
    const int eta = (m % 2 == 0 && i % 2 == 1) ? -1 : 1;
    for (std::size_t t = 0; t < NT; ++t) {
      const auto S = rep.rho_matrix_cached(T.elements[t]);
      const std::int64_t den = S->denominator();
      for (std::size_t w0 = 0; w0 < Q; ++w0)
        for (std::size_t w1 = 0; w1 < Q; ++w1) {
          const std::uint32_t hw = neg[mul[h2 * Q + mul[w0 * Q + w1]]];
          for (std::size_t z = 0; z < Q; ++z) {
            std::fill(acc.begin(), acc.end(), 0);
            const std::uint32_t base = add[z * Q + hw];
            for (std::size_t y = 0; y < Q; ++y) {
              const std::uint32_t col = add[y * Q + w1];
              const int k = static_cast<int>(psi[add[base * Q + neg[mul[y * Q + w0]]]]);
              const std::int64_t* b = S->raw(pidx[col], perm[pidx[y]]);
              for (int e = 0; e < P - 1; ++e) acc[static_cast<std::size_t>((k + e) % P)] += b[e];
            }
            const std::int64_t* c = nu.data() + idx(i, t, w0, w1, z) * static_cast<std::size_t>(P);
            bool same = true;
            for (int u = 0; u < P - 1; ++u) {
              const __int128 lhs = eta * (acc[static_cast<std::size_t>(u)] - acc[static_cast<std::size_t>(P - 1)]);
              const __int128 rhs = static_cast<__int128>(den) * (c[u] - c[P - 1]);
              if (lhs != rhs) same = false;
            }
            if (same) {
              ++out.pass;
            } else {
              ++out.fail;
              if (out.failures.size() < 5) {
                std::ostringstream os;
                os << "i=" << i << " t=" << T.elements[t].entries_string() << " w=(" << L.elements[w0].to_string()
                   << "," << L.elements[w1].to_string() << ") z=" << L.elements[z].to_string();
                out.failures.push_back(os.str());
              }
            }
            for (int a = 0; a < P - 1; ++a)
              for (int b = 0; b < P - 1; ++b)
                norm2[static_cast<std::size_t>(((a - b) % P + P) % P)] +=
                    static_cast<__int128>(c[a] - c[P - 1]) * (c[b] - c[P - 1]);
          }
        }
    }
  }
  std::vector<std::int64_t> n2(static_cast<std::size_t>(P));
  for (int k = 0; k < P; ++k) n2[static_cast<std::size_t>(k)] = narrow_checked(norm2[static_cast<std::size_t>(k)]);
  out.norm_squared = CycNum::from_exponent_counts(P, n2).scaled(1, static_cast<std::int64_t>(E));
  const std::uint32_t zero = L.index_of(tw.zero());
  const std::int64_t* c = nu.data() + idx(m > 1 ? 1 : 0, tindex.at(Mat::identity(tw, 2)), zero, zero, zero) *
                                          static_cast<std::size_t>(P);
  out.value_at_sigma = CycNum::from_exponent_counts(P, std::span<const std::int64_t>(c, static_cast<std::size_t>(P)));
  return out;
}

std::size_t semidirect_class_count(const Group& g) {
  const int m = g.level();
  const auto& els = g.enumerate();
  const std::size_t N = els.size();
  UnionFind uf(N * static_cast<std::size_t>(m));
  auto pos = [&](std::uint64_t code) {
    return static_cast<std::size_t>(std::lower_bound(els.begin(), els.end(), code) - els.begin());
  };
  const auto gens = g.generators();
  for (int i = 0; i < m; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      const GElem x = g.decode(els[k]);
      const auto self = static_cast<std::uint32_t>(static_cast<std::size_t>(i) * N + k);
      // (σ,1)(σ^i,x)(σ,1)⁻¹ = (σ^i, σ(x))
      uf.unite(self, static_cast<std::uint32_t>(static_cast<std::size_t>(i) * N + pos(g.encode(x.frobenius(1)))));
      // (1,h)(σ^i,x)(1,h)⁻¹ = (σ^i, h x σ^i(h)⁻¹)
      for (const GElem& h : gens) {
        const GElem y = h * x * h.frobenius(i).inverse();
        uf.unite(self, static_cast<std::uint32_t>(static_cast<std::size_t>(i) * N + pos(g.encode(y))));
      }
    }
  std::size_t count = 0;
  for (std::size_t k = 0; k < uf.parent.size(); ++k)
    if (uf.find(static_cast<std::uint32_t>(k)) == k) ++count;
  return count;
}

std::size_t lifted_class_space_dimension(const Group& g) {
  const int m = g.level();
  std::size_t total = 0;
  for (int i = 0; i < m; ++i) {
    const int d = i == 0 ? m : std::gcd(i, m);
    const Group gd(g.kind(), g.n(), g.tower(), d);
    const ClassPartition cp = conjugacy_classes(gd);
    UnionFind uf(cp.num_classes());
    for (std::size_t c = 0; c < cp.num_classes(); ++c)
      uf.unite(static_cast<std::uint32_t>(c), cp.class_id(gd.encode(gd.decode(cp.reps[c]).frobenius(1))));
    for (std::size_t c = 0; c < cp.num_classes(); ++c)
      if (uf.find(static_cast<std::uint32_t>(c)) == c) ++total;
  }
  return total;
}

}  // namespace weilbc
