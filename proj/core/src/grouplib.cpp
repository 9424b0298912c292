#include "weilbc/grouplib.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "weilbc/error.hpp"

namespace weilbc {

Mat symplectic_J(const Tower& t, int n) {
  Mat j(t, 2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j.at(k, n + k) = t.one();
    j.at(n + k, k) = -t.one();
  }
  return j;
}

FieldElem symp_form(const Vec& v, const Vec& w) {
  const std::size_t n = v.size() / 2;
  FieldElem s = v.at(0).tower()->zero();
  for (std::size_t i = 0; i < n; ++i) s += v[i] * w[n + i] - v[n + i] * w[i];
  return s;
}

FieldElem half(const Tower& t) { return t.from_int((t.p() + 1) / 2); }

MembershipResult membership(const Mat& g, int d) {
  if (g.rows() != g.cols() || g.rows() % 2 != 0) throw DimensionMismatch("membership needs a 2n x 2n matrix");
  if (!g.in_level(d)) throw LevelMismatch("matrix entries outside level " + std::to_string(d));
  const Tower& t = *g.tower();
  const int n = g.rows() / 2;
  const Mat J = symplectic_J(t, n);
  const Mat m = g.transpose() * J * g;
  const FieldElem lambda = m.at(0, n);
  if (!lambda.is_zero() && m == J.scaled(lambda)) {
    if (lambda.is_one()) return {Membership::Symp, lambda};
    return {Membership::Similitude, lambda};
  }
  return {Membership::Neither, t.zero()};
}

Mat siegel_unip(const Mat& b) {
  const Tower& t = *b.tower();
  const int n = b.rows();
  return Mat::from_blocks(Mat::identity(t, n), b, Mat(t, n, n), Mat::identity(t, n));
}

Mat siegel_lower(const Mat& c) {
  const Tower& t = *c.tower();
  const int n = c.rows();
  return Mat::from_blocks(Mat::identity(t, n), Mat(t, n, n), c, Mat::identity(t, n));
}

Mat levi(const Mat& a) {
  const Tower& t = *a.tower();
  const int n = a.rows();
  return Mat::from_blocks(a, Mat(t, n, n), Mat(t, n, n), a.inverse().transpose());
}

Mat weyl(const Mat& c) {
  const Tower& t = *c.tower();
  const int n = c.rows();
  return Mat::from_blocks(Mat(t, n, n), -c.inverse().transpose(), c, Mat(t, n, n));
}

Mat similitude_diag(const Tower& t, int n, const FieldElem& lambda) {
  return Mat::from_blocks(Mat::identity(t, n), Mat(t, n, n), Mat(t, n, n), Mat::scalar(lambda, n));
}

bool is_symmetric(const Mat& b) { return b == b.transpose(); }

HeisElem heis_identity(const Tower& t, int n) { return {vec_zero(t, 2 * n), t.zero()}; }

HeisElem heis_mul(const HeisElem& a, const HeisElem& b) {
  if (a.v.size() != b.v.size()) throw DimensionMismatch("Heisenberg dimensions differ");
  if (a.t.tower() != b.t.tower()) throw LevelMismatch("Heisenberg elements from different towers");
  const Tower& t = *a.t.tower();
  return {vec_add(a.v, b.v), a.t + b.t + half(t) * symp_form(a.v, b.v)};
}

HeisElem heis_inv(const HeisElem& a) { return {vec_neg(a.v), -a.t}; }

GElem operator*(const GElem& a, const GElem& b) {
  GElem r;
  r.s = a.s * b.s;
  if (a.has_heis()) {
    const Vec sv = a.s.apply(b.v);
    const Tower& t = *a.s.tower();
    r.v = vec_add(a.v, sv);
    r.t = a.t + b.t + half(t) * symp_form(a.v, sv);
  }
  return r;
}

GElem GElem::inverse() const {
  GElem r;
  r.s = s.inverse();
  if (has_heis()) {
    r.v = vec_neg(r.s.apply(v));
    r.t = -t;
  }
  return r;
}

GElem GElem::frobenius(long j) const {
  GElem r;
  r.s = s.frobenius(j);
  if (has_heis()) {
    r.v = vec_frobenius(v, j);
    r.t = t.tower()->frobenius(t, j);
  }
  return r;
}

std::string GElem::to_string() const {
  std::string out = s.to_string();
  if (has_heis()) {
    out += ";(";
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + v[k].to_string();
    out += ";" + t.to_string() + ")";
  }
  return out;
}

GElem from_matrix(Mat s) {
  GElem g;
  g.s = std::move(s);
  return g;
}

GElem from_heis(const Tower& t, int n, const HeisElem& h) { return {Mat::identity(t, 2 * n), h.v, h.t}; }

GElem from_parts(Mat s, const HeisElem& h) { return {std::move(s), h.v, h.t}; }

TwistedElem twisted_mul(const TwistedElem& a, const TwistedElem& b, int m) {
  return {(a.i + b.i) % m, a.g * b.g.frobenius(a.i)};
}

TwistedElem twisted_inv(const TwistedElem& a, int m) {
  // (σ^i,g)^{-1} = (σ^{-i}, σ^{-i}(g^{-1}))
  const int j = (m - a.i % m) % m;
  return {j, a.g.inverse().frobenius(j)};
}

const char* to_string(GroupKind k) {
  switch (k) {
    case GroupKind::Sp: return "Sp";
    case GroupKind::GSp: return "GSp";
    case GroupKind::Jacobi: return "SpH";
    case GroupKind::GL1: return "GL1";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Group

struct Group::Cache {
  std::mutex mu;
  std::vector<std::uint64_t> elements;
  bool ready = false;
};

Group::Group(GroupKind kind, int n, std::shared_ptr<const Tower> tower, int level)
    : kind_(kind), n_(n), tower_(std::move(tower)), level_(level), cache_(std::make_shared<Cache>()) {
  if (n < 1) throw ConfigInvalid("n must be positive");
  if (tower_->ambient_level() % level != 0) throw LevelMismatch("level does not divide the ambient level");
}

GElem Group::identity() const {
  const Tower& t = *tower_;
  GElem g = from_matrix(Mat::identity(t, dim()));
  if (kind_ == GroupKind::Jacobi) {
    g.v = vec_zero(t, 2 * n_);
    g.t = t.zero();
  }
  return g;
}

bool Group::contains(const GElem& x) const {
  if (x.s.rows() != dim() || x.s.cols() != dim()) return false;
  if (!x.s.in_level(level_)) return false;
  if (kind_ == GroupKind::Jacobi) {
    if (static_cast<int>(x.v.size()) != 2 * n_) return false;
    for (const auto& c : x.v)
      if (!tower_->in_level(c, level_)) return false;
    if (!tower_->in_level(x.t, level_)) return false;
  } else if (x.has_heis()) {
    return false;
  }
  if (kind_ == GroupKind::GL1) return !x.s.at(0, 0).is_zero();
  const auto mem = membership(x.s, level_);
  if (kind_ == GroupKind::GSp) return mem.kind != Membership::Neither;
  return mem.kind == Membership::Symp;
}

std::uint64_t Group::order() const {
  const unsigned __int128 qd = tower_->q_pow(level_);
  unsigned __int128 r = 1;
  auto mul = [&](unsigned __int128 f) {
    if (f && r > (~static_cast<unsigned __int128>(0) >> 1) / f) throw ArithmeticOverflow("group order overflow");
    r *= f;
    if (r > ~std::uint64_t{0}) throw ArithmeticOverflow("group order exceeds 64 bits");
  };
  if (kind_ == GroupKind::GL1) return static_cast<std::uint64_t>(qd - 1);
  for (int k = 0; k < n_ * n_; ++k) mul(qd);
  unsigned __int128 q2k = 1;
  for (int k = 1; k <= n_; ++k) {
    q2k *= qd * qd;
    mul(q2k - 1);
  }
  if (kind_ == GroupKind::GSp) mul(qd - 1);
  if (kind_ == GroupKind::Jacobi)
    for (int k = 0; k < 2 * n_ + 1; ++k) mul(qd);
  return static_cast<std::uint64_t>(r);
}

std::uint64_t Group::encode(const GElem& x) const {
  const Level& lv = tower_->level(level_);
  const unsigned __int128 radix = lv.size;
  unsigned __int128 code = 0;
  auto push = [&](const FieldElem& e) {
    code = code * radix + lv.index_of(e);
    if (code > ~std::uint64_t{0}) throw ArithmeticOverflow("element code exceeds 64 bits");
  };
  for (const auto& e : x.s.entries()) push(e);
  if (kind_ == GroupKind::Jacobi) {
    for (const auto& e : x.v) push(e);
    push(x.t);
  }
  return static_cast<std::uint64_t>(code);
}

GElem Group::decode(std::uint64_t code) const {
  const Level& lv = tower_->level(level_);
  const std::uint64_t radix = lv.size;
  const int D = dim();
  const int extra = kind_ == GroupKind::Jacobi ? 2 * n_ + 1 : 0;
  const int total = D * D + extra;
  std::vector<std::uint32_t> digits(static_cast<std::size_t>(total));
  for (int k = total - 1; k >= 0; --k) {
    digits[k] = static_cast<std::uint32_t>(code % radix);
    code /= radix;
  }
  GElem g;
  g.s = Mat(*tower_, D, D);
  for (int k = 0; k < D * D; ++k) g.s.at(k / D, k % D) = lv.elements[digits[k]];
  if (kind_ == GroupKind::Jacobi) {
    g.v.resize(static_cast<std::size_t>(2 * n_));
    for (int k = 0; k < 2 * n_; ++k) g.v[k] = lv.elements[digits[D * D + k]];
    g.t = lv.elements[digits[total - 1]];
  }
  return g;
}

std::vector<GElem> Group::generators() const {
  const Tower& t = *tower_;
  const FieldElem xi = t.primitive_element(level_);
  std::vector<FieldElem> basis;
  FieldElem pw = t.one();
  for (int k = 0; k < t.base_degree() * level_; ++k) {
    basis.push_back(pw);
    pw *= xi;
  }
  std::vector<GElem> gens;
  if (kind_ == GroupKind::GL1) {
    Mat m(t, 1, 1);
    m.at(0, 0) = xi;
    gens.push_back(from_matrix(m));
    return gens;
  }
  const int n = n_;
  auto wrap = [&](Mat s) {
    GElem g = from_matrix(std::move(s));
    if (kind_ == GroupKind::Jacobi) {
      g.v = vec_zero(t, 2 * n);
      g.t = t.zero();
    }
    return g;
  };
  for (const auto& beta : basis) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Mat e(t, n, n);
        e.at(i, j) = beta;
        e.at(j, i) = beta;
        gens.push_back(wrap(siegel_unip(e)));
        gens.push_back(wrap(siegel_lower(e)));
      }
  }
  Mat a = Mat::identity(t, n);
  a.at(0, 0) = xi;
  gens.push_back(wrap(levi(a)));
  if (n > 1) {
    Mat a2 = Mat::identity(t, n);
    a2.at(0, 1) = t.one();
    gens.push_back(wrap(levi(a2)));
  }
  gens.push_back(wrap(weyl(Mat::identity(t, n))));
  if (kind_ == GroupKind::GSp) gens.push_back(wrap(similitude_diag(t, n, xi)));
  if (kind_ == GroupKind::Jacobi) {
    for (const auto& beta : basis) {
      for (int k = 0; k < 2 * n; ++k) {
        HeisElem h = heis_identity(t, n);
        h.v[k] = beta;
        gens.push_back(from_heis(t, n, h));
      }
      HeisElem z = heis_identity(t, n);
      z.t = beta;
      gens.push_back(from_heis(t, n, z));
    }
  }
  return gens;
}

FieldElem Group::random_scalar(Rng& rng, bool nonzero) const {
  const auto& els = tower_->level(level_).elements;
  for (;;) {
    const FieldElem& x = els[rng.below(els.size())];
    if (!nonzero || !x.is_zero()) return x;
  }
}

Mat Group::random_symmetric(Rng& rng) const {
  Mat b(*tower_, n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      b.at(i, j) = random_scalar(rng, false);
      b.at(j, i) = b.at(i, j);
    }
  return b;
}

Mat Group::random_invertible(Rng& rng) const {
  for (;;) {
    Mat a(*tower_, n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a.at(i, j) = random_scalar(rng, false);
    if (a.invertible()) return a;
  }
}

GElem Group::random(Rng& rng) const {
  const Tower& t = *tower_;
  if (kind_ == GroupKind::GL1) {
    Mat m(t, 1, 1);
    m.at(0, 0) = random_scalar(rng, true);
    return from_matrix(m);
  }
  Mat s = levi(random_invertible(rng));
  for (int r = 0; r < 3; ++r) s = s * siegel_unip(random_symmetric(rng)) * siegel_lower(random_symmetric(rng));
  if (rng.below(2)) s = s * weyl(Mat::identity(t, n_));
  s = s * siegel_unip(random_symmetric(rng));
  if (kind_ == GroupKind::GSp) s = s * similitude_diag(t, n_, random_scalar(rng, true));
  GElem g = from_matrix(std::move(s));
  if (kind_ == GroupKind::Jacobi) {
    g.v.resize(static_cast<std::size_t>(2 * n_));
    for (auto& c : g.v) c = random_scalar(rng, false);
    g.t = random_scalar(rng, false);
  }
  return g;
}

const std::vector<std::uint64_t>& Group::enumerate(std::uint64_t cap) const {
  const std::uint64_t N = order();
  if (N > cap)
    throw GroupTooLarge(std::string(weilbc::to_string(kind_)) + " of order " + std::to_string(N) + " exceeds cap " +
                        std::to_string(cap));
  std::lock_guard lock(cache_->mu);
  if (cache_->ready) return cache_->elements;
  const auto gens = generators();
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(N * 2);
  std::deque<std::uint64_t> queue;
  const std::uint64_t id = encode(identity());
  seen.insert(id);
  queue.push_back(id);
  while (!queue.empty()) {
    const GElem x = decode(queue.front());
    queue.pop_front();
    for (const auto& s : gens) {
      const std::uint64_t c = encode(x * s);
      if (seen.insert(c).second) queue.push_back(c);
    }
  }
  if (seen.size() != N) throw InternalError("enumeration size " + std::to_string(seen.size()) + " != order " + std::to_string(N));
  cache_->elements.assign(seen.begin(), seen.end());
  std::sort(cache_->elements.begin(), cache_->elements.end());
  cache_->ready = true;
  return cache_->elements;
}

// ---------------------------------------------------------------------------
// Classes

std::uint32_t ClassPartition::index_of(std::uint64_t code) const {
  auto it = std::lower_bound(elements.begin(), elements.end(), code);
  if (it == elements.end() || *it != code) throw LevelMismatch("element not in the enumerated group");
  return static_cast<std::uint32_t>(it - elements.begin());
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smaller index (= smaller code) becomes the root
  }
};

ClassPartition orbit_partition(const Group& g, int twist, std::uint64_t cap) {
  ClassPartition cp;
  cp.elements = g.enumerate(cap);
  const auto gens = g.generators();
  std::vector<GElem> right;  // σ^i(s)^{-1}
  for (const auto& s : gens) right.push_back(s.frobenius(twist).inverse());
  UnionFind uf(cp.elements.size());
  for (std::uint32_t e = 0; e < cp.elements.size(); ++e) {
    const GElem x = g.decode(cp.elements[e]);
    for (std::size_t k = 0; k < gens.size(); ++k) uf.unite(e, cp.index_of(g.encode(gens[k] * x * right[k])));
  }
  // roots are the least indices in their component, hence the least codes
  std::vector<std::uint32_t> root_class(cp.elements.size(), UINT32_MAX);
  cp.class_of.resize(cp.elements.size());
  for (std::uint32_t e = 0; e < cp.elements.size(); ++e) {
    const std::uint32_t r = uf.find(e);
    if (root_class[r] == UINT32_MAX) {
      root_class[r] = static_cast<std::uint32_t>(cp.reps.size());
      cp.reps.push_back(cp.elements[r]);
      cp.sizes.push_back(0);
    }
    cp.class_of[e] = root_class[r];
    ++cp.sizes[root_class[r]];
  }
  return cp;
}

}  // namespace

ClassPartition conjugacy_classes(const Group& g, std::uint64_t cap) { return orbit_partition(g, 0, cap); }

ClassPartition twisted_classes(const Group& g, int i, std::uint64_t cap) { return orbit_partition(g, i, cap); }

std::string classes_tsv(const Group& g, const ClassPartition& cp) {
  std::ostringstream out;
  out << "class_id\trepresentative\tsize\n";
  for (std::size_t c = 0; c < cp.reps.size(); ++c) {
    const GElem x = g.decode(cp.reps[c]);
    std::string rep = x.s.entries_string();
    if (x.has_heis()) {
      for (const auto& e : x.v) rep += "," + e.to_string();
      rep += "," + x.t.to_string();
    }
    out << c << "\t" << rep << "\t" << cp.sizes[c] << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Torus

namespace {

Mat mat_pow(const Mat& m, std::uint64_t e) {
  Mat r = Mat::identity(*m.tower(), m.rows());
  Mat b = m;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

}  // namespace

bool Sl2Torus::contains(const Mat& g) const { return std::binary_search(elements.begin(), elements.end(), g); }

int Sl2Torus::omega(const Mat& g) const {
  if (!contains(g)) throw LevelMismatch("element not in the torus");
  return mat_pow(g, order() / 2).is_identity() ? 1 : -1;
}

Sl2Torus sl2_torus(const std::shared_ptr<const Tower>& tower, int d) {
  const Tower& t = *tower;
  Sl2Torus T;
  T.level = d;
  T.w = t.smallest_nonsquare();
  const auto& els = t.level(d).elements;
  for (const auto& a : els)
    for (const auto& b : els)
      if ((a * a - T.w * b * b).is_one()) {
        Mat m(t, 2, 2);
        m.at(0, 0) = a;
        m.at(0, 1) = T.w * b;
        m.at(1, 0) = b;
        m.at(1, 1) = a;
        T.elements.push_back(m);
      }
  std::sort(T.elements.begin(), T.elements.end());
  const std::uint64_t N = T.elements.size();
  std::vector<std::uint64_t> primes;
  std::uint64_t n = N;
  for (std::uint64_t r = 2; r * r <= n; ++r)
    if (n % r == 0) {
      primes.push_back(r);
      while (n % r == 0) n /= r;
    }
  if (n > 1) primes.push_back(n);
  for (const auto& x : T.elements) {
    bool gen = true;
    for (auto r : primes)
      if (mat_pow(x, N / r).is_identity()) { gen = false; break; }
    if (gen) {
      T.generator = x;
      return T;
    }
  }
  throw InternalError("torus is not cyclic");
}

Mat torus_norm(const Mat& x, int e, int d) {
  if (e % d != 0) throw LevelMismatch("norm level must divide the source level");
  Mat r = Mat::identity(*x.tower(), x.rows());
  for (int k = 0; k < e / d; ++k) r = r * x.frobenius(static_cast<long>(k) * d);
  return r;
}

}  // namespace weilbc
