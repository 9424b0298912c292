#include "weilbc/normmap.hpp"

#include <functional>
#include <numeric>
#include <optional>
#include <sstream>

#include "weilbc/error.hpp"

namespace weilbc {

std::string NormConfig::to_string() const {
  std::ostringstream os;
  os << "m=" << m << " i=" << i << " t=" << t << " d=" << d << " j=" << j << " mu=" << mu;
  return os.str();
}

NormConfig choose_t(int i, int m) {
  if (m < 1 || i < 0 || i >= m) throw ConfigInvalid("twist exponent must satisfy 0 <= i < m");
  if (i == 0) return NormConfig{m, 0, m, 0, 1, 1};
  const int d = std::gcd(m, i);
  for (int t = 1; t <= m; ++t)
    if ((t * i) % m == d % m) return NormConfig{m, i, d, i / d, m / d, t};
  throw InternalError("no t solves t*i = d mod m");
}

NormConfig make_config(int i, int t, int m) {
  NormConfig c = choose_t(i, m);
  if (i == 0) {
    if (t < 1) throw ConfigInvalid("t must be positive");
    c.t = t;
    return c;
  }
  if (t < 1 || ((static_cast<long>(t) * i - c.d) % m + m) % m != 0)
    throw ConfigInvalid("t=" + std::to_string(t) + " does not satisfy t*i = gcd(i,m) mod m for i=" + std::to_string(i) +
                        ", m=" + std::to_string(m));
  c.t = t;
  return c;
}

GElem twisted_product(int i, const GElem& g, int k) {
  GElem r = g;
  if (k == 0) {
    r = g * g.inverse();
    return r;
  }
  for (int s = 1; s < k; ++s) r = r * g.frobenius(static_cast<long>(i) * s);
  return r;
}

namespace {

Mat map_mat(const Mat& a, const Tower& to, const std::function<FieldElem(const FieldElem&)>& f) {
  Mat r(to, a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.at(i, j) = f(a.at(i, j));
  return r;
}

GElem map_gelem(const GElem& x, const Tower& to, const std::function<FieldElem(const FieldElem&)>& f) {
  Mat s = map_mat(x.s, to, f);
  if (!x.has_heis()) return from_matrix(std::move(s));
  HeisElem h{Vec{}, f(x.t)};
  for (const auto& c : x.v) h.v.push_back(f(c));
  return from_parts(std::move(s), h);
}

int element_level(const GElem& x) {
  const Tower& t = *x.s.tower();
  int lvl = 1;
  auto acc = [&](const FieldElem& e) { lvl = std::lcm(lvl, t.level_of(e)); };
  for (const auto& e : x.s.entries()) acc(e);
  if (x.has_heis()) {
    for (const auto& e : x.v) acc(e);
    acc(x.t);
  }
  return lvl;
}

bool is_identity(const GElem& x) {
  if (!x.s.is_identity()) return false;
  if (!x.has_heis()) return true;
  for (const auto& e : x.v)
    if (!e.is_zero()) return false;
  return x.t.is_zero();
}

// Row vector a·M.
Vec row_times(const Vec& a, const Mat& m) {
  const Tower& t = *m.tower();
  Vec r(static_cast<std::size_t>(m.cols()), t.zero());
  for (int i = 0; i < m.rows(); ++i) {
    if (a[static_cast<std::size_t>(i)].is_zero()) continue;
    for (int j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] += a[static_cast<std::size_t>(i)] * m.at(i, j);
  }
  return r;
}

// Elements of F_{q^N} spanning it over F_p: traces of powers of the ambient generator.
std::vector<FieldElem> level_spanning_set(const Tower& t, int N) {
  std::vector<FieldElem> out;
  FieldElem x = t.one();
  for (int k = 0; k < t.degree(); ++k) {
    FieldElem y = t.trace_to(x, t.ambient_level(), N);
    if (!y.is_zero()) out.push_back(y);
    x *= t.generator();
  }
  return out;
}

// Basis (e_1..e_n, f_1..f_n) of the form B(u,w) = u M wᵀ, as the rows of T with T M Tᵀ = J.
Mat symplectic_basis(const Mat& M) {
  const Tower& t = *M.tower();
  const int k = M.rows();
  auto B = [&](const Vec& u, const Vec& w) { return dot(row_times(u, M), w); };
  std::vector<Vec> pool;
  for (int i = 0; i < k; ++i) {
    Vec e(static_cast<std::size_t>(k), t.zero());
    e[static_cast<std::size_t>(i)] = t.one();
    pool.push_back(std::move(e));
  }
  std::vector<Vec> es, fs;
  while (!pool.empty()) {
    Vec u = pool.front();
    pool.erase(pool.begin());
    bool zero = true;
    for (const auto& c : u) zero &= c.is_zero();
    if (zero) continue;
    std::size_t wi = 0;
    for (; wi < pool.size(); ++wi)
      if (!B(u, pool[wi]).is_zero()) break;
    if (wi == pool.size()) throw InternalError("degenerate form in symplectic basis");
    Vec w = pool[wi];
    pool.erase(pool.begin() + static_cast<long>(wi));
    const FieldElem s = B(u, w).inverse();
    for (auto& c : w) c *= s;
    for (auto& z : pool) {
      const FieldElem bzw = B(z, w), bzu = B(z, u);
      for (std::size_t c = 0; c < z.size(); ++c) z[c] = z[c] - bzw * u[c] + bzu * w[c];
    }
    es.push_back(std::move(u));
    fs.push_back(std::move(w));
  }
  if (static_cast<int>(es.size()) * 2 != k) throw InternalError("symplectic basis incomplete");
  Mat T(t, k, k);
  const int n = k / 2;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) {
      T.at(i, c) = es[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      T.at(n + i, c) = fs[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
  return T;
}

// y with τ(y) - y = c, τ = σ^d of order r on F_{q^N}.
FieldElem additive_hilbert90(const Tower& t, const FieldElem& c, int d, int r, const std::vector<FieldElem>& span) {
  FieldElem theta;
  bool found = false;
  for (const auto& xi : span) {
    FieldElem tr = t.zero(), y = xi;
    for (int k = 0; k < r; ++k) {
      tr += y;
      y = t.frobenius(y, d);
    }
    if (!tr.is_zero()) {
      theta = xi / tr;
      found = true;
      break;
    }
  }
  if (!found) throw InternalError("trace map vanished on a spanning set");
  FieldElem S = t.zero(), y = t.zero(), tc = c, tt = theta;
  for (int k = 0; k < r; ++k) {
    y -= S * tt;
    S += tc;
    tc = t.frobenius(tc, d);
    tt = t.frobenius(tt, d);
  }
  if (!S.is_zero()) throw InternalError("additive Lang equation has no solution at this level");
  return y;
}

}  // namespace

GElem embed(const GElem& x, const Embedding& e) {
  return map_gelem(x, *e.to(), [&](const FieldElem& c) { return e.apply(c); });
}

GElem pull_back(const GElem& x, const Embedding& e) {
  return map_gelem(x, *e.from(), [&](const FieldElem& c) {
    auto r = e.preimage(c);
    if (!r) throw LevelMismatch("element outside the embedded field");
    return *r;
  });
}

// ---------------------------------------------------------------- LangSolver

LangSolver::LangSolver(GroupKind kind, int n, std::shared_ptr<const Tower> base, int ambient_cap)
    : kind_(kind), n_(n), base_(std::move(base)), cap_(ambient_cap) {
  if (cap_ < 1) throw ConfigInvalid("ambient cap must be positive");
}

int LangSolver::solution_level(const GElem& h, int d) const {
  const int ell = std::lcm(d, element_level(h));
  GElem step = h;
  for (int k = 1; k < ell / d; ++k) step = step * h.frobenius(static_cast<long>(d) * k);
  GElem pw = step;
  long ord = 1;
  while (!is_identity(pw)) {
    ++ord;
    if (static_cast<long>(ell) * ord > cap_)
      throw AmbientCapExceeded("Lang equation needs a field beyond the ambient cap " + std::to_string(cap_));
    pw = pw * step;
  }
  return static_cast<int>(ell * ord);
}

const Enlargement& LangSolver::field_for(int level) const {
  const int amb = std::lcm(base_->ambient_level(), level);
  if (amb > cap_ && amb != base_->ambient_level())
    throw AmbientCapExceeded("ambient level " + std::to_string(amb) + " exceeds cap " + std::to_string(cap_));
  std::lock_guard lk(mu_);
  auto it = fields_.find(amb);
  if (it != fields_.end()) return it->second;
  Enlargement e;
  if (amb == base_->ambient_level()) {
    e.tower = base_;
  } else {
    e = enlarge(base_, amb);
  }
  return fields_.emplace(amb, std::move(e)).first->second;
}

LangWitness LangSolver::solve(const GElem& h_base, int d) const {
  const int N = solution_level(h_base, d);
  const Enlargement& F = field_for(N);
  const Tower& t = *F.tower;
  const GElem h = F.embedding ? embed(h_base, *F.embedding) : h_base;
  const int r = N / d;
  const Mat& s = h.s;
  const int k = s.rows();
  const std::vector<FieldElem> span = level_spanning_set(t, N);

  // α0 with τ(α0) = α0 s: rows fixed by θ(a) = τ(a) s⁻¹.
  const Mat sinv = s.inverse();
  std::vector<Vec> rows;
  for (const auto& xi : span) {
    for (int j = 0; j < k && static_cast<int>(rows.size()) < k; ++j) {
      Vec a(static_cast<std::size_t>(k), t.zero());
      a[static_cast<std::size_t>(j)] = xi;
      Vec v(static_cast<std::size_t>(k), t.zero());
      for (int step = 0; step < r; ++step) {
        v = vec_add(v, a);
        a = row_times(vec_frobenius(a, d), sinv);
      }
      Mat trial(t, static_cast<int>(rows.size()) + 1, k);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (int c = 0; c < k; ++c) trial.at(static_cast<int>(i), c) = rows[i][static_cast<std::size_t>(c)];
      for (int c = 0; c < k; ++c) trial.at(static_cast<int>(rows.size()), c) = v[static_cast<std::size_t>(c)];
      if (rank(trial) == static_cast<int>(rows.size()) + 1) rows.push_back(std::move(v));
    }
    if (static_cast<int>(rows.size()) == k) break;
  }
  if (static_cast<int>(rows.size()) != k) throw InternalError("Galois descent did not produce a full basis");
  Mat alpha0(t, k, k);
  for (int i = 0; i < k; ++i)
    for (int c = 0; c < k; ++c) alpha0.at(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];

  Mat a = alpha0;
  if (kind_ != GroupKind::GL1) {
    const Mat J = symplectic_J(t, n_);
    Mat M = alpha0 * J * alpha0.transpose();
    if (kind_ == GroupKind::GSp) {
      const FieldElem lam = membership(s, N).lambda;
      FieldElem c;
      bool found = false;
      for (const auto& xi : span) {
        FieldElem sum = t.zero(), y = xi;
        for (int step = 0; step < r; ++step) {
          sum += y;
          y = t.frobenius(y, d) * lam;
        }
        if (!sum.is_zero()) {
          c = sum;
          found = true;
          break;
        }
      }
      if (!found) throw InternalError("scalar Galois descent failed");
      M = M.scaled(c);
    }
    if (M.frobenius(d) != M) throw InternalError("Gram matrix of the descended basis is not fixed");
    a = symplectic_basis(M) * alpha0;
  }

  GElem alpha = from_matrix(a);
  if (h.has_heis()) {
    const HeisElem w{a.apply(h.v), h.t};
    Vec x;
    for (const auto& c : w.v) x.push_back(additive_hilbert90(t, c, d, r, span));
    const FieldElem rhs = w.t + half(t) * symp_form(x, vec_frobenius(x, d));
    const FieldElem z = additive_hilbert90(t, rhs, d, r, span);
    alpha = from_parts(a, HeisElem{x, z});
  }
  if (!(alpha.inverse() * alpha.frobenius(d) == h)) throw InternalError("Lang witness failed to verify");
  return LangWitness{alpha, h, N, F.tower, F.embedding};
}

std::optional<GElem> lang_search(const Group& g, const GElem& h, int d) {
  for (std::uint64_t code : g.enumerate()) {
    const GElem a = g.decode(code);
    if (a.inverse() * a.frobenius(d) == h) return a;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- GyojaNorm

GyojaNorm::GyojaNorm(Group source, NormConfig cfg, int ambient_cap)
    : source_(std::move(source)),
      target_(source_.kind(), source_.n(), source_.tower(), cfg.d),
      cfg_(cfg),
      solver_(source_.kind(), source_.n(), source_.tower(), ambient_cap) {
  if (source_.level() != cfg_.m) throw ConfigInvalid("source group level must equal m");
}

GElem GyojaNorm::operator()(const GElem& g) const { return apply(g, nullptr); }

GElem GyojaNorm::apply(const GElem& g, LangWitness* witness) const {
  if (!source_.contains(g)) throw NotSymplectic("element is not in the source group");
  if (cfg_.i == 0) return g;
  const GElem h = twisted_product(cfg_.i, g, cfg_.t);
  const GElem P = twisted_product(cfg_.i, g, cfg_.mu);
  LangWitness w = solver_.solve(h, cfg_.d);
  const GElem Pb = w.embedding ? embed(P, *w.embedding) : P;
  const GElem Nb = w.alpha * Pb * w.alpha.inverse();
  if (!(Nb.frobenius(cfg_.d) == Nb)) throw InternalError("norm is not fixed by sigma^d");
  GElem out = w.embedding ? pull_back(Nb, *w.embedding) : Nb;
  if (!target_.contains(out)) throw InternalError("norm is not in the target group");
  if (witness) *witness = std::move(w);
  return out;
}

const ClassPartition& GyojaNorm::target_classes() const {
  std::call_once(classes_once_, [&] { classes_ = std::make_shared<ClassPartition>(conjugacy_classes(target_)); });
  return *classes_;
}

std::uint32_t GyojaNorm::norm_class(const GElem& g) const {
  return target_classes().class_id(target_.encode((*this)(g)));
}

BijectionReport verify_bijection(const GyojaNorm& norm, std::uint64_t cap, std::size_t max_per_class) {
  const Group& src = norm.source();
  const Group& tgt = norm.target();
  const NormConfig& cfg = norm.config();
  BijectionReport rep;
  rep.cfg = cfg;
  const ClassPartition tw = twisted_classes(src, cfg.i, cap);
  const ClassPartition& tc = norm.target_classes();
  rep.twisted_classes = tw.num_classes();
  rep.target_classes = tc.num_classes();
  constexpr std::uint32_t kUnset = ~0u;
  std::vector<std::uint32_t> image(tw.num_classes(), kUnset);
  std::vector<std::size_t> seen(tw.num_classes(), 0);
  for (std::size_t e = 0; e < tw.elements.size(); ++e) {
    const std::uint32_t c = tw.class_of[e];
    if (max_per_class && seen[c] >= max_per_class) continue;
    ++seen[c];
    const std::uint32_t nc = norm.norm_class(src.decode(tw.elements[e]));
    if (image[c] == kUnset) {
      image[c] = nc;
    } else if (image[c] != nc) {
      rep.well_defined = false;
    }
  }
  std::vector<int> hits(tc.num_classes(), 0);
  for (std::uint32_t c : image) ++hits[c];
  for (int h : hits) {
    if (h == 0) rep.surjective = false;
    if (h > 1) rep.injective = false;
  }
  for (std::size_t c = 0; c < tw.num_classes(); ++c) {
    const GElem g = src.decode(tw.reps[c]);
    const std::uint32_t lhs = norm.norm_class(g.frobenius(1));
    const std::uint32_t rhs = tc.class_id(tgt.encode(norm(g).frobenius(1)));
    if (lhs != rhs) rep.equivariant = false;
    rep.rows.push_back({tw.reps[c], tw.sizes[c], tc.reps[image[c]], tc.sizes[image[c]]});
  }
  return rep;
}

std::string bijection_tsv(const GyojaNorm& norm, const BijectionReport& r) {
  std::ostringstream os;
  os << "twisted_rep\ttwisted_size\tnorm_rep\tnorm_size\n";
  for (const auto& row : r.rows)
    os << norm.source().decode(row.twisted_rep).to_string() << '\t' << row.twisted_size << '\t'
       << norm.target().decode(row.norm_rep).to_string() << '\t' << row.norm_size << '\n';
  return os.str();
}

}  // namespace weilbc
