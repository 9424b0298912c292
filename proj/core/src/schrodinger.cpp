#include "weilbc/schrodinger.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "weilbc/error.hpp"

namespace weilbc {

// ---------------------------------------------------------------- WeilOperator

WeilOperator::WeilOperator(int p, std::size_t dim)
    : p_(p), dim_(dim), den_(1), num_(dim * dim * static_cast<std::size_t>(p - 1), 0) {}

WeilOperator WeilOperator::identity(int p, std::size_t dim) {
  WeilOperator r(p, dim);
  for (std::size_t i = 0; i < dim; ++i) r.cell(i, i)[0] = 1;
  return r;
}

bool WeilOperator::entry_is_zero(std::size_t i, std::size_t j) const {
  const std::int64_t* c = cell(i, j);
  for (int k = 0; k < p_ - 1; ++k)
    if (c[k]) return false;
  return true;
}

CycNum WeilOperator::entry(std::size_t i, std::size_t j) const {
  const std::int64_t* c = cell(i, j);
  return CycNum::from_coeffs(p_, std::vector<std::int64_t>(c, c + (p_ - 1)), den_);
}

void WeilOperator::set_root(std::size_t i, std::size_t j, long k, std::int64_t sign) {
  std::int64_t* c = cell(i, j);
  std::fill(c, c + (p_ - 1), 0);
  const long e = ((k % p_) + p_) % p_;
  if (e == p_ - 1) {
    for (int u = 0; u < p_ - 1; ++u) c[u] = -sign * den_;
  } else {
    c[e] = sign * den_;
  }
}

std::int64_t WeilOperator::lcm_den(std::int64_t L, const CycNum& c) {
  const std::int64_t d = c.denominator();
  return narrow_checked(static_cast<__int128>(L / std::gcd(L, d)) * d);
}

void WeilOperator::set_scaled(std::size_t i, std::size_t j, const CycNum& c, std::int64_t L) {
  std::int64_t* out = cell(i, j);
  if (c.is_zero()) {
    std::fill(out, out + (p_ - 1), 0);
    return;
  }
  if (c.p() != p_) throw DimensionMismatch("entry over a different cyclotomic field");
  const std::int64_t f = L / c.denominator();
  for (int k = 0; k < p_ - 1; ++k) out[k] = narrow_checked(static_cast<__int128>(c.numerators()[static_cast<std::size_t>(k)]) * f);
}

void WeilOperator::normalize() {
  std::int64_t g = den_;
  for (std::int64_t v : num_) {
    if (g == 1) break;
    if (v) g = std::gcd(g, v < 0 ? -v : v);
  }
  if (g > 1) {
    den_ /= g;
    for (auto& v : num_) v /= g;
  }
}

WeilOperator WeilOperator::operator*(const WeilOperator& o) const {
  if (p_ != o.p_ || dim_ != o.dim_) throw DimensionMismatch("operator shapes differ");
  const int P = p_;
  const std::size_t L = static_cast<std::size_t>(P - 1);
  std::vector<std::vector<std::uint32_t>> nz(dim_);
  for (std::size_t k = 0; k < dim_; ++k)
    for (std::size_t j = 0; j < dim_; ++j)
      if (!o.entry_is_zero(k, j)) nz[k].push_back(static_cast<std::uint32_t>(j));

  WeilOperator r(P, dim_);
  std::vector<__int128> acc(dim_ * static_cast<std::size_t>(P));
  std::vector<std::uint8_t> touched(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    std::fill(touched.begin(), touched.end(), 0);
    for (std::size_t k = 0; k < dim_; ++k) {
      const std::int64_t* a = cell(i, k);
      bool any = false;
      for (std::size_t u = 0; u < L; ++u) any |= a[u] != 0;
      if (!any) continue;
      for (std::uint32_t j : nz[k]) {
        const std::int64_t* b = o.cell(k, j);
        __int128* out = acc.data() + static_cast<std::size_t>(j) * P;
        touched[j] = 1;
        for (std::size_t u = 0; u < L; ++u) {
          if (!a[u]) continue;
          const __int128 au = a[u];
          for (std::size_t v = 0; v < L; ++v) {
            std::size_t e = u + v;
            if (e >= static_cast<std::size_t>(P)) e -= P;
            out[e] += au * b[v];
          }
        }
      }
    }
    for (std::size_t j = 0; j < dim_; ++j) {
      if (!touched[j]) continue;
      const __int128* in = acc.data() + j * P;
      std::int64_t* c = r.cell(i, j);
      for (std::size_t u = 0; u < L; ++u) c[u] = narrow_checked(in[u] - in[P - 1]);
    }
  }
  r.den_ = narrow_checked(static_cast<__int128>(den_) * o.den_);
  r.normalize();
  return r;
}

bool operator==(const WeilOperator& a, const WeilOperator& b) {
  return a.p_ == b.p_ && a.dim_ == b.dim_ && a.den_ == b.den_ && a.num_ == b.num_;
}

WeilOperator WeilOperator::scaled(const CycNum& c) const {
  return from_function(p_, dim_, [&](std::size_t i, std::size_t j) {
    return entry_is_zero(i, j) ? CycNum(p_) : entry(i, j) * c;
  });
}

WeilOperator WeilOperator::conj_transpose() const {
  WeilOperator r(p_, dim_);
  r.den_ = den_;
  const int P = p_;
  std::vector<std::int64_t> full(static_cast<std::size_t>(P));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      const std::int64_t* a = cell(i, j);
      std::fill(full.begin(), full.end(), 0);
      for (int u = 0; u < P - 1; ++u) full[static_cast<std::size_t>((P - u) % P)] = a[u];
      std::int64_t* c = r.cell(j, i);
      for (int u = 0; u < P - 1; ++u) c[u] = full[static_cast<std::size_t>(u)] - full[static_cast<std::size_t>(P - 1)];
    }
  return r;
}

CycNum WeilOperator::trace() const {
  std::vector<std::uint32_t> id(dim_);
  std::iota(id.begin(), id.end(), 0u);
  return permuted_trace(id);
}

CycNum WeilOperator::permuted_trace(const std::vector<std::uint32_t>& perm) const {
  if (perm.size() != dim_) throw DimensionMismatch("permutation size");
  std::vector<__int128> s(static_cast<std::size_t>(p_ - 1), 0);
  for (std::size_t x = 0; x < dim_; ++x) {
    const std::int64_t* c = cell(x, perm[x]);
    for (int u = 0; u < p_ - 1; ++u) s[static_cast<std::size_t>(u)] += c[u];
  }
  std::vector<std::int64_t> out(s.size());
  for (std::size_t u = 0; u < s.size(); ++u) out[u] = narrow_checked(s[u]);
  return CycNum::from_coeffs(p_, std::move(out), den_);
}

bool WeilOperator::is_monomial() const {
  std::vector<int> col(dim_, 0);
  for (std::size_t i = 0; i < dim_; ++i) {
    int row = 0;
    for (std::size_t j = 0; j < dim_; ++j)
      if (!entry_is_zero(i, j)) {
        ++row;
        ++col[j];
      }
    if (row != 1) return false;
  }
  for (int c : col)
    if (c != 1) return false;
  return true;
}

std::string WeilOperator::serialize() const {
  std::ostringstream os;
  os << "den=" << den_ << '\n';
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      if (j) os << ' ';
      const std::int64_t* c = cell(i, j);
      for (int u = 0; u < p_ - 1; ++u) os << (u ? "," : "") << c[u];
    }
    os << '\n';
  }
  return os.str();
}

WeilOperator WeilOperator::parse(int p, std::size_t dim, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("den=", 0) != 0) throw ParseError("operator: missing den line");
  WeilOperator r(p, dim);
  try {
    r.den_ = std::stoll(line.substr(4));
  } catch (const std::exception&) {
    throw ParseError("operator: bad denominator");
  }
  if (r.den_ <= 0) throw ParseError("operator: nonpositive denominator");
  for (std::size_t i = 0; i < dim; ++i) {
    if (!std::getline(is, line)) throw ParseError("operator: missing row");
    std::istringstream row(line);
    for (std::size_t j = 0; j < dim; ++j) {
      std::string tok;
      if (!(row >> tok)) throw ParseError("operator: short row");
      std::istringstream ts(tok);
      std::string v;
      std::int64_t* c = r.cell(i, j);
      for (int u = 0; u < p - 1; ++u) {
        if (!std::getline(ts, v, ',')) throw ParseError("operator: short entry");
        try {
          c[u] = std::stoll(v);
        } catch (const std::exception&) {
          throw ParseError("operator: bad entry '" + v + "'");
        }
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- generators

Mat Generator::matrix(int n) const {
  switch (kind) {
    case Kind::Unip: return siegel_unip(m);
    case Kind::Levi: return levi(m);
    case Kind::Weyl: return weyl(m);
    case Kind::Heis: break;
  }
  return Mat::identity(*h.t.tower(), 2 * n);
}

std::string Generator::to_string() const {
  switch (kind) {
    case Kind::Unip: return "Unip(" + m.to_string() + ")";
    case Kind::Levi: return "Levi(" + m.to_string() + ")";
    case Kind::Weyl: return "Weyl(" + m.to_string() + ")";
    case Kind::Heis: break;
  }
  std::string s = "Heis([";
  for (std::size_t k = 0; k < h.v.size(); ++k) s += (k ? "," : "") + h.v[k].to_string();
  return s + "]," + h.t.to_string() + ")";
}

Mat GeneratorWord::product(const Tower& t, int n) const {
  Mat r = Mat::identity(t, 2 * n);
  for (const auto& g : gens) r = r * g.matrix(n);
  return r;
}

std::string GeneratorWord::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < gens.size(); ++k) s += (k ? " " : "") + gens[k].to_string();
  return s;
}

// ---------------------------------------------------------------- representation

WeilRepresentation::WeilRepresentation(std::shared_ptr<const Tower> tower, int n, int level, FieldElem scale)
    : tower_(std::move(tower)), n_(n), level_(level), scale_(std::move(scale)) {
  if (n < 1) throw ConfigInvalid("n must be positive");
  if (!tower_->has_level(level)) throw LevelMismatch("level " + std::to_string(level) + " not registered");
  if (scale_.is_zero() || !tower_->in_level(scale_, 1)) throw ConfigInvalid("psi scale must be a nonzero element of F_q");
  const Level& L = tower_->level(level);
  std::uint64_t dim = 1;
  for (int k = 0; k < n; ++k) {
    dim *= L.size;
    if (dim > (1u << 16)) throw GroupTooLarge("Schrödinger model dimension exceeds 65536");
  }
  points_.reserve(dim);
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  for (std::uint64_t c = 0; c < dim; ++c) {
    Vec y(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = L.elements[digit[static_cast<std::size_t>(k)]];
    points_.push_back(std::move(y));
    for (int k = n - 1; k >= 0; --k) {
      if (++digit[static_cast<std::size_t>(k)] < L.size) break;
      digit[static_cast<std::size_t>(k)] = 0;
    }
  }
  psi_tab_.reserve(L.size);
  for (const auto& e : L.elements) psi_tab_.push_back(static_cast<std::uint8_t>(tower_->psi_exponent(e, level, scale_)));
  gauss_ = gauss_sum(*tower_, level, scale_);
  CycNum base = gauss_.scaled(eps(tower_->from_int(2)));
  CycNum k = CycNum::rational(tower_->p(), 1);
  for (int j = 0; j < n; ++j) k *= base;
  kappa_ = k.inv();
}

std::uint32_t WeilRepresentation::point_index(const Vec& y) const {
  if (static_cast<int>(y.size()) != n_) throw DimensionMismatch("point has wrong length");
  const Level& L = tower_->level(level_);
  std::uint64_t idx = 0;
  for (const auto& c : y) idx = idx * L.size + L.index_of(c);
  return static_cast<std::uint32_t>(idx);
}

const std::vector<std::uint32_t>& WeilRepresentation::galois_perm(long j) const {
  const long period = static_cast<long>(level_);
  const long jj = ((j % period) + period) % period;
  std::lock_guard lk(mu_);
  auto it = perms_.find(jj);
  if (it != perms_.end()) return it->second;
  std::vector<std::uint32_t> perm(points_.size());
  for (std::size_t x = 0; x < points_.size(); ++x) perm[x] = point_index(vec_frobenius(points_[x], jj));
  return perms_.emplace(jj, std::move(perm)).first->second;
}

namespace {

void check_square(const Mat& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw DimensionMismatch(std::string(what) + " must be n×n");
}

}  // namespace

WeilOperator WeilRepresentation::op_heis(const HeisElem& h) const {
  if (static_cast<int>(h.v.size()) != 2 * n_) throw DimensionMismatch("Heisenberg vector must have length 2n");
  const FieldElem hf = half(*tower_);
  Vec x(h.v.begin(), h.v.begin() + n_), xs(h.v.begin() + n_, h.v.end());
  const FieldElem base = h.t - hf * dot(x, xs);
  WeilOperator r(p(), dim());
  for (std::size_t y = 0; y < dim(); ++y) {
    const std::uint32_t col = point_index(vec_add(points_[y], xs));
    r.set_root(y, col, psi(base - dot(points_[y], x)), 1);
  }
  return r;
}

WeilOperator WeilRepresentation::op_unip(const Mat& b) const {
  check_square(b, n_, "b");
  if (!is_symmetric(b)) throw NotSymplectic("Siegel unipotent parameter is not symmetric");
  const FieldElem hf = half(*tower_);
  WeilOperator r(p(), dim());
  for (std::size_t y = 0; y < dim(); ++y) r.set_root(y, y, psi(hf * dot(points_[y], b.apply(points_[y]))), 1);
  return r;
}

WeilOperator WeilRepresentation::op_levi(const Mat& a) const {
  check_square(a, n_, "a");
  const FieldElem det = a.det();
  if (det.is_zero()) throw Singular("Levi parameter is singular");
  const int e = eps(det);
  const Mat at = a.transpose();
  WeilOperator r(p(), dim());
  for (std::size_t y = 0; y < dim(); ++y) r.set_root(y, point_index(at.apply(points_[y])), 0, e);
  return r;
}

WeilOperator WeilRepresentation::op_weyl(const Mat& c) const {
  check_square(c, n_, "c");
  const FieldElem det = c.det();
  if (det.is_zero()) throw NotSymplectic("Weyl parameter is singular");
  const CycNum scal = kappa_.scaled(eps(det));
  const Mat ci = c.inverse();
  // scal · ζ^k for each k, shared across entries.
  const int P = p();
  std::vector<CycNum> rootvals(static_cast<std::size_t>(P));
  for (int k = 0; k < P; ++k) rootvals[static_cast<std::size_t>(k)] = scal * CycNum::zeta(P, k);
  WeilOperator r(P, dim());
  r.den_ = scal.denominator();
  for (std::size_t y = 0; y < dim(); ++y) {
    const Vec u = ci.apply(points_[y]);
    for (std::size_t x = 0; x < dim(); ++x) {
      const int k = psi(-dot(u, points_[x]));
      r.set_scaled(y, x, rootvals[static_cast<std::size_t>(k)], r.den_);
    }
  }
  r.normalize();
  return r;
}

WeilOperator WeilRepresentation::op_galois(long j) const {
  const auto& perm = galois_perm(-j);
  WeilOperator r(p(), dim());
  for (std::size_t x = 0; x < dim(); ++x) r.set_root(x, perm[x], 0, 1);
  return r;
}

WeilOperator WeilRepresentation::op_generator(const Generator& g) const {
  switch (g.kind) {
    case Generator::Kind::Heis: return op_heis(g.h);
    case Generator::Kind::Unip: return op_unip(g.m);
    case Generator::Kind::Levi: return op_levi(g.m);
    case Generator::Kind::Weyl: return op_weyl(g.m);
  }
  throw InternalError("unknown generator kind");
}

GeneratorWord WeilRepresentation::siegel_factor(const Mat& g) const {
  if (g.rows() != 2 * n_ || g.cols() != 2 * n_) throw DimensionMismatch("element must be 2n×2n");
  if (membership(g, level_).kind != Membership::Symp) throw NotSymplectic("element is not symplectic");
  const Tower& t = *tower_;
  const Mat A = g.block(0, 0, n_, n_), B = g.block(0, n_, n_, n_);
  const Mat C = g.block(n_, 0, n_, n_), D = g.block(n_, n_, n_, n_);
  using K = Generator::Kind;
  GeneratorWord w;
  auto push_unip = [&](const Mat& b) {
    if (!b.is_zero()) w.gens.push_back({K::Unip, b, {}});
  };
  auto invertible_corner = [&](const Mat& a, const Mat& c, const Mat& d) {
    const Mat ci = c.inverse();
    push_unip(a * ci);
    w.gens.push_back({K::Weyl, c, {}});
    push_unip(ci * d);
  };

  if (C.is_zero()) {
    w.gens.push_back({K::Unip, B * A.transpose(), {}});
    w.gens.push_back({K::Levi, A, {}});
  } else if (C.invertible()) {
    invertible_corner(A, C, D);
  } else {
    // Smallest symmetric b (canonical order) making the corner of g·u(b)·w(1) invertible.
    const Level& L = t.level(level_);
    const int slots = n_ * (n_ + 1) / 2;
    std::vector<std::size_t> digit(static_cast<std::size_t>(slots), 0);
    std::optional<Mat> found;
    while (true) {
      Mat b(t, n_, n_);
      int s = 0;
      for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j, ++s) {
          b.at(i, j) = L.elements[digit[static_cast<std::size_t>(s)]];
          b.at(j, i) = b.at(i, j);
        }
      if ((C * b + D).invertible()) {
        found = b;
        break;
      }
      int k = slots - 1;
      for (; k >= 0; --k) {
        if (++digit[static_cast<std::size_t>(k)] < L.size) break;
        digit[static_cast<std::size_t>(k)] = 0;
      }
      if (k < 0) break;
    }
    if (!found) throw FactorizationFailed("no symmetric b makes the lower corner invertible");
    const Mat& b = *found;
    const Mat gu = g * siegel_unip(b);
    const Mat A2 = gu.block(0, 0, n_, n_), B2 = gu.block(0, n_, n_, n_);
    const Mat C2 = gu.block(n_, 0, n_, n_), D2 = gu.block(n_, n_, n_, n_);
    // g·u(b)·w(1) = [[B2, -A2], [D2, -C2]]
    invertible_corner(B2, D2, -C2);
    w.gens.push_back({K::Weyl, -Mat::identity(t, n_), {}});
    push_unip(-b);
  }
  if (w.gens.empty()) w.gens.push_back({K::Levi, Mat::identity(t, n_), {}});
  if (w.product(t, n_) != g) throw InternalError("Siegel factorization certificate failed");
  return w;
}

std::string WeilRepresentation::key_of(const Mat& s) const {
  std::string k;
  for (const auto& e : s.entries()) k += std::to_string(e.packed()) + ',';
  return k;
}

WeilOperator WeilRepresentation::build_rho_matrix(const Mat& s) const {
  const GeneratorWord w = siegel_factor(s);
  WeilOperator r = op_generator(w.gens.front());
  for (std::size_t k = 1; k < w.gens.size(); ++k) r = r * op_generator(w.gens[k]);
  return r;
}

std::shared_ptr<const WeilOperator> WeilRepresentation::rho_matrix_cached(const Mat& s) const {
  const std::string key = key_of(s);
  {
    std::lock_guard lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto op = std::make_shared<const WeilOperator>(build_rho_matrix(s));
  std::lock_guard lk(mu_);
  return cache_.emplace(key, std::move(op)).first->second;
}

WeilOperator WeilRepresentation::build_rho(const GElem& g) const {
  auto s = rho_matrix_cached(g.s);
  if (!g.has_heis()) return *s;
  return op_heis(g.heis()) * *s;
}

CycNum WeilRepresentation::extended_trace(int i, const GElem& g) const {
  const auto& perm = galois_perm(i);
  auto s = rho_matrix_cached(g.s);
  if (!g.has_heis()) return s->permuted_trace(perm);
  // ρ(h) is monomial: row y has ψ(t - ½x·x* - y·x) at column y + x*.
  const HeisElem h = g.heis();
  if (static_cast<int>(h.v.size()) != 2 * n_) throw DimensionMismatch("Heisenberg vector must have length 2n");
  const Vec x(h.v.begin(), h.v.begin() + n_), xs(h.v.begin() + n_, h.v.end());
  const FieldElem base = h.t - half(*tower_) * dot(x, xs);
  const int P = p();
  std::vector<__int128> acc(static_cast<std::size_t>(P), 0);
  for (std::size_t y = 0; y < dim(); ++y) {
    const std::uint32_t col = point_index(vec_add(points_[y], xs));
    const int k = psi(base - dot(points_[y], x));
    const std::int64_t* b = s->cell(col, perm[y]);
    for (int v = 0; v < P - 1; ++v) acc[static_cast<std::size_t>((k + v) % P)] += b[v];
  }
  std::vector<std::int64_t> out(static_cast<std::size_t>(P - 1));
  for (int u = 0; u < P - 1; ++u)
    out[static_cast<std::size_t>(u)] = narrow_checked(acc[static_cast<std::size_t>(u)] - acc[static_cast<std::size_t>(P - 1)]);
  return CycNum::from_coeffs(P, std::move(out), s->den_);
}

std::size_t WeilRepresentation::cache_size() const {
  std::lock_guard lk(mu_);
  return cache_.size();
}

std::string WeilRepresentation::header() const {
  std::ostringstream os;
  os << "weilbc-operator-cache 1\n" << tower_->serialize() << "n=" << n_ << "\nlevel=" << level_
     << "\nscale=" << scale_.packed() << '\n';
  return os.str();
}

void WeilRepresentation::save_cache(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigInvalid("cannot write operator cache " + path);
  out << header();
  std::lock_guard lk(mu_);
  out << "records=" << cache_.size() << '\n';
  for (const auto& [key, op] : cache_) out << "key=" << key << '\n' << op->serialize();
}

std::size_t WeilRepresentation::load_cache(const std::string& path) const {
  std::ifstream in(path);
  if (!in) return 0;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string h = header();
  if (text.compare(0, h.size(), h) != 0) return 0;
  std::istringstream is(text.substr(h.size()));
  std::string line;
  if (!std::getline(is, line) || line.rfind("records=", 0) != 0) throw ParseError("operator cache: missing record count");
  const std::size_t count = std::stoull(line.substr(8));
  std::size_t loaded = 0;
  for (std::size_t r = 0; r < count; ++r) {
    if (!std::getline(is, line) || line.rfind("key=", 0) != 0) throw ParseError("operator cache: missing key");
    const std::string key = line.substr(4);
    std::string body;
    for (std::size_t k = 0; k <= dim(); ++k) {
      if (!std::getline(is, line)) throw ParseError("operator cache: truncated record");
      body += line + '\n';
    }
    auto op = std::make_shared<const WeilOperator>(WeilOperator::parse(p(), dim(), body));
    std::lock_guard lk(mu_);
    if (cache_.emplace(key, std::move(op)).second) ++loaded;
  }
  return loaded;
}

// ---------------------------------------------------------------- GSp

CycNum gsp_character(const WeilRepresentation& rep, const Mat& x) {
  const Tower& t = rep.tower();
  const int n = rep.n();
  const auto mem = membership(x, rep.level());
  if (mem.kind == Membership::Neither) throw NotSymplectic("element is not a symplectic similitude");
  CycNum sum(rep.p());
  if (mem.kind != Membership::Symp) return sum;
  for (const auto& lam : t.level(rep.level()).elements) {
    if (lam.is_zero()) continue;
    const Mat d = similitude_diag(t, n, lam);
    const Mat di = similitude_diag(t, n, lam.inverse());
    sum += rep.trace(from_matrix(di * x * d));
  }
  return sum;
}

CycNum extended_gsp_trace(const WeilRepresentation& rep, int i, const Mat& g) {
  const Tower& t = rep.tower();
  const int n = rep.n();
  const auto mem = membership(g, rep.level());
  if (mem.kind == Membership::Neither) throw NotSymplectic("element is not a symplectic similitude");
  CycNum sum(rep.p());
  for (const auto& lam : t.level(rep.level()).elements) {
    if (lam.is_zero()) continue;
    // r⁻¹ g σ^i(r) is symplectic iff λ⁻¹ λ(g) σ^i(λ) = 1.
    const FieldElem li = lam.inverse();
    if (!(li * mem.lambda * t.frobenius(lam, i)).is_one()) continue;
    const Mat y = similitude_diag(t, n, li) * g * similitude_diag(t, n, t.frobenius(lam, i));
    sum += rep.extended_trace(i, from_matrix(y));
  }
  return sum;
}

}  // namespace weilbc
