#include "weilbc/fieldtower.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include "weilbc/error.hpp"

namespace weilbc {

namespace {

using Poly = std::vector<int>;  // coefficients mod p, low degree first

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int inv_mod(int a, int p) {
  int r = 1;
  int base = a % p;
  for (int e = p - 2; e > 0; e >>= 1) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
  }
  return r;
}

Poly poly_mod(Poly a, const Poly& f, int p) {
  trim(a);
  const int df = static_cast<int>(f.size()) - 1;
  const int lead_inv = inv_mod(f.back(), p);
  for (int k = static_cast<int>(a.size()) - 1; k >= df; --k) {
    const int c = a[k] * lead_inv % p;
    if (c == 0) continue;
    for (int j = 0; j <= df; ++j) a[k - df + j] = ((a[k - df + j] - c * f[j]) % p + p) % p;
  }
  a.resize(std::min<std::size_t>(a.size(), static_cast<std::size_t>(df)));
  trim(a);
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, int p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod(std::move(r), f, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, int p) {
  Poly r{1};
  base = poly_mod(std::move(base), f, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, int p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

bool is_irreducible(const Poly& f, int p) {
  const int D = static_cast<int>(f.size()) - 1;
  if (D == 1) return true;
  if (f[0] == 0) return false;
  // Ben-Or: gcd(x^{p^k} - x, f) = 1 for k <= D/2.
  Poly xpk{0, 1};
  for (int k = 1; k <= D / 2; ++k) {
    xpk = poly_powmod(xpk, static_cast<std::uint64_t>(p), f, p);
    Poly diff = xpk;
    diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
    diff[1] = (diff[1] - 1 + p) % p;
    trim(diff);
    if (diff.empty()) return false;
    if (poly_gcd(f, diff, p).size() > 1) return false;
  }
  return true;
}

// Lexicographically smallest monic irreducible of degree D, comparing c_0 first.
std::vector<std::uint8_t> smallest_irreducible(int p, int D) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::uint8_t>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find({p, D}); it != cache.end()) return it->second;
  Poly f(static_cast<std::size_t>(D) + 1, 0);
  f[static_cast<std::size_t>(D)] = 1;
  // Every candidate with c_0 = 0 is divisible by x.
  if (D > 1) f[0] = 1;
  for (;;) {
    if (is_irreducible(f, p)) break;
    // odometer with c_{D-1} fastest
    int k = D - 1;
    while (k >= 0) {
      if (++f[static_cast<std::size_t>(k)] < p) break;
      f[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) throw InternalError("no irreducible polynomial found");
  }
  std::vector<std::uint8_t> out(f.begin(), f.end());
  cache.emplace(std::make_pair(p, D), out);
  return out;
}

unsigned __int128 checked_pow(std::uint64_t base, int e) {
  unsigned __int128 r = 1;
  for (int k = 0; k < e; ++k) {
    if (r > (~static_cast<unsigned __int128>(0)) / base) throw ArithmeticOverflow("power exceeds 128 bits");
    r *= base;
  }
  return r;
}

constexpr std::uint64_t kLevelCap = std::uint64_t{1} << 20;

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// FieldElem

bool FieldElem::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](std::uint8_t v) { return v == 0; });
}

bool FieldElem::is_one() const {
  if (c_[0] != 1) return false;
  return std::all_of(c_.begin() + 1, c_.end(), [](std::uint8_t v) { return v == 0; });
}

FieldElem& FieldElem::operator+=(const FieldElem& other) {
  if (tower_ != other.tower_) throw LevelMismatch("elements from different towers");
  const int p = tower_->p_;
  const int D = tower_->degree_;
  for (int k = 0; k < D; ++k) {
    const int v = c_[k] + other.c_[k];
    c_[k] = static_cast<std::uint8_t>(v >= p ? v - p : v);
  }
  return *this;
}

FieldElem& FieldElem::operator-=(const FieldElem& other) {
  if (tower_ != other.tower_) throw LevelMismatch("elements from different towers");
  const int p = tower_->p_;
  const int D = tower_->degree_;
  for (int k = 0; k < D; ++k) {
    const int v = c_[k] - other.c_[k];
    c_[k] = static_cast<std::uint8_t>(v < 0 ? v + p : v);
  }
  return *this;
}

FieldElem FieldElem::operator-() const {
  FieldElem r = *this;
  const int p = tower_->p_;
  for (int k = 0; k < tower_->degree_; ++k) r.c_[k] = static_cast<std::uint8_t>(c_[k] ? p - c_[k] : 0);
  return r;
}

FieldElem& FieldElem::operator*=(const FieldElem& other) {
  if (tower_ != other.tower_) throw LevelMismatch("elements from different towers");
  const int D = tower_->degree_;
  const std::uint32_t p = static_cast<std::uint32_t>(tower_->p_);
  std::uint32_t r[2 * kMaxDegree];
  std::fill_n(r, 2 * D - 1, 0u);
  for (int i = 0; i < D; ++i) {
    const std::uint32_t a = c_[i];
    if (!a) continue;
    for (int j = 0; j < D; ++j) r[i + j] += a * other.c_[j];
  }
  const auto& f = tower_->modulus_;
  for (int k = 2 * D - 2; k >= D; --k) {
    const std::uint32_t c = r[k] % p;
    if (!c) continue;
    for (int j = 0; j < D; ++j) r[k - D + j] += c * (p - f[j]);
  }
  for (int k = 0; k < D; ++k) c_[k] = static_cast<std::uint8_t>(r[k] % p);
  return *this;
}

FieldElem FieldElem::inverse() const {
  if (is_zero()) throw DivisionByZero("inverse of zero field element");
  const int p = tower_->p_;
  const int D = tower_->degree_;
  Poly a(c_.begin(), c_.begin() + D);
  Poly f(tower_->modulus_.begin(), tower_->modulus_.end());
  trim(a);
  // extended Euclid: s*a ≡ g (mod f)
  Poly r0 = f, r1 = a, s0{}, s1{1};
  while (!r1.empty() && r1.size() > 1) {
    // q, r = divmod(r0, r1)
    Poly q(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 1, 0);
    Poly r = r0;
    const int lead_inv = inv_mod(r1.back(), p);
    for (int k = static_cast<int>(r.size()) - 1; k >= static_cast<int>(r1.size()) - 1; --k) {
      const int c = r[k] * lead_inv % p;
      if (!c) continue;
      q[k - (r1.size() - 1)] = c;
      for (std::size_t j = 0; j < r1.size(); ++j) r[k - (r1.size() - 1) + j] = ((r[k - (r1.size() - 1) + j] - c * r1[j]) % p + p) % p;
    }
    trim(r);
    // s2 = s0 - q*s1
    Poly qs(q.size() + std::max<std::size_t>(s1.size(), 1), 0);
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < s1.size(); ++j) qs[i + j] = (qs[i + j] + q[i] * s1[j]) % p;
    Poly s2(std::max(s0.size(), qs.size()), 0);
    for (std::size_t i = 0; i < s2.size(); ++i) {
      int v = (i < s0.size() ? s0[i] : 0) - (i < qs.size() ? qs[i] : 0);
      s2[i] = ((v % p) + p) % p;
    }
    trim(s2);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r1 is a nonzero constant
  const int cinv = inv_mod(r1[0], p);
  FieldElem out = tower_->zero();
  s1 = poly_mod(s1, f, p);
  for (std::size_t k = 0; k < s1.size(); ++k) out.c_[k] = static_cast<std::uint8_t>(s1[k] * cinv % p);
  return out;
}

FieldElem FieldElem::pow(unsigned __int128 e) const {
  FieldElem r = tower_->one();
  FieldElem b = *this;
  while (e) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

std::uint64_t FieldElem::packed() const {
  const int D = tower_->degree_;
  const std::uint64_t p = static_cast<std::uint64_t>(tower_->p_);
  std::uint64_t v = 0;
  for (int k = 0; k < D; ++k) {
    if (v > (~std::uint64_t{0} - c_[k]) / p) throw ArithmeticOverflow("packed field element exceeds 64 bits");
    v = v * p + c_[k];
  }
  return v;
}

std::size_t FieldElem::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  const int D = tower_ ? tower_->degree_ : 0;
  for (int k = 0; k < D; ++k) {
    h ^= c_[k];
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::string FieldElem::to_string() const {
  if (!tower_) return "?";
  // polynomial in x, constant first; base-field elements print as integers
  const int D = tower_->degree_;
  int top = D - 1;
  while (top > 0 && c_[top] == 0) --top;
  if (top == 0) return std::to_string(c_[0]);
  std::string s;
  for (int k = 0; k <= top; ++k) {
    if (!c_[k]) continue;
    if (!s.empty()) s += "+";
    if (k == 0) {
      s += std::to_string(c_[k]);
    } else {
      if (c_[k] != 1) s += std::to_string(c_[k]) + "*";
      s += "x";
      if (k > 1) s += "^" + std::to_string(k);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Level

std::uint32_t Level::index_of(const FieldElem& x) const {
  auto it = index.find(x.packed());
  if (it == index.end()) throw LevelMismatch("element " + x.to_string() + " not in level " + std::to_string(degree));
  return it->second;
}

// ---------------------------------------------------------------------------
// Tower

Tower::Tower(int p, int base_degree, int m, std::vector<std::uint8_t> modulus)
    : p_(p), base_degree_(base_degree), m_(m), degree_(static_cast<int>(modulus.size()) - 1), modulus_(std::move(modulus)) {
  q_ = 1;
  for (int k = 0; k < base_degree_; ++k) q_ *= static_cast<std::uint64_t>(p_);
  const int D = degree_;
  const std::size_t DD = static_cast<std::size_t>(D) * static_cast<std::size_t>(D);
  // frob_[1]: column c holds (x^c)^p = (x^p)^c
  Poly f(modulus_.begin(), modulus_.end());
  const Poly xp = poly_powmod(Poly{0, 1}, static_cast<std::uint64_t>(p_), f, p_);
  std::vector<std::uint8_t> m1(DD, 0);
  Poly col{1};
  for (int c = 0; c < D; ++c) {
    for (std::size_t r = 0; r < col.size(); ++r) m1[r * D + c] = static_cast<std::uint8_t>(col[r]);
    col = poly_mulmod(col, xp, f, p_);
  }
  std::vector<std::uint8_t> id(DD, 0);
  for (int k = 0; k < D; ++k) id[static_cast<std::size_t>(k) * D + k] = 1;
  frob_.push_back(std::move(id));
  for (int k = 1; k < D; ++k) {
    const auto& prev = frob_.back();
    std::vector<std::uint8_t> next(DD, 0);
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) {
        std::uint32_t acc = 0;
        for (int j = 0; j < D; ++j) acc += static_cast<std::uint32_t>(m1[r * D + j]) * prev[j * D + c];
        next[r * D + c] = static_cast<std::uint8_t>(acc % static_cast<std::uint32_t>(p_));
      }
    frob_.push_back(std::move(next));
  }
  levels_.resize(static_cast<std::size_t>(ambient_level()) + 1);
}

static void validate_prime(int p) {
  if (p == 2) throw EvenCharacteristic("characteristic 2 is not supported");
  if (!is_prime(static_cast<std::uint64_t>(p < 0 ? 0 : p))) throw NotPrime(std::to_string(p) + " is not prime");
  if (p > 251) throw ConfigInvalid("characteristic above 251 is not supported");
}

std::shared_ptr<const Tower> Tower::with_ambient(int p, int base_degree, int m, int ambient_level,
                                                 bool register_levels) {
  validate_prime(p);
  if (base_degree < 1 || m < 1 || ambient_level < 1) throw ConfigInvalid("degrees must be positive");
  const int D = base_degree * ambient_level;
  if (D > kMaxDegree) throw AmbientCapExceeded("ambient degree " + std::to_string(D) + " exceeds " + std::to_string(kMaxDegree));
  std::shared_ptr<Tower> t(new Tower(p, base_degree, m, smallest_irreducible(p, D)));
  if (register_levels) {
    for (int d = 1; d <= m; ++d) {
      if (m % d != 0 || ambient_level % d != 0) continue;
      if (checked_pow(t->q_, d) <= kLevelCap) t->register_level(d);
    }
  }
  return t;
}

std::shared_ptr<const Tower> Tower::build(int p, int base_degree, int m) {
  return with_ambient(p, base_degree, m, m, true);
}

std::shared_ptr<const Tower> Tower::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int p = 0, b = 0, m = 0, D = 0;
  std::vector<std::uint8_t> mod;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    try {
      if (key == "p") p = std::stoi(val);
      else if (key == "base_degree") b = std::stoi(val);
      else if (key == "m") m = std::stoi(val);
      else if (key == "ambient_degree") D = std::stoi(val);
      else if (key == "modulus") {
        std::istringstream vs(val);
        std::string tok;
        while (std::getline(vs, tok, ',')) mod.push_back(static_cast<std::uint8_t>(std::stoi(tok)));
      }
    } catch (const std::exception&) {
      throw ParseError("bad tower field: " + line);
    }
  }
  validate_prime(p);
  if (b < 1 || m < 1 || D < 1 || static_cast<int>(mod.size()) != D + 1 || mod.back() != 1 || D % b != 0 || D > kMaxDegree)
    throw ParseError("inconsistent tower header");
  for (auto c : mod)
    if (c >= p) throw ParseError("modulus coefficient out of range");
  if (!is_irreducible(Poly(mod.begin(), mod.end()), p)) throw ParseError("modulus is reducible");
  std::shared_ptr<Tower> t(new Tower(p, b, m, std::move(mod)));
  const int amb = D / b;
  for (int d = 1; d <= m; ++d) {
    if (m % d != 0 || amb % d != 0) continue;
    if (checked_pow(t->q_, d) <= kLevelCap) t->register_level(d);
  }
  return t;
}

std::string Tower::serialize() const {
  std::ostringstream out;
  out << "p=" << p_ << "\nbase_degree=" << base_degree_ << "\nm=" << m_ << "\nambient_degree=" << degree_ << "\nmodulus=";
  for (std::size_t k = 0; k < modulus_.size(); ++k) out << (k ? "," : "") << static_cast<int>(modulus_[k]);
  out << "\n";
  return out.str();
}

std::uint64_t Tower::q_pow(int d) const {
  unsigned __int128 v = checked_pow(q_, d);
  if (v > ~std::uint64_t{0}) throw ArithmeticOverflow("q^d exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

FieldElem Tower::make() const {
  FieldElem e;
  e.tower_ = this;
  return e;
}

FieldElem Tower::zero() const { return make(); }

FieldElem Tower::one() const {
  FieldElem e = make();
  e.c_[0] = 1;
  return e;
}

FieldElem Tower::from_int(std::int64_t v) const {
  FieldElem e = make();
  e.c_[0] = static_cast<std::uint8_t>(((v % p_) + p_) % p_);
  return e;
}

FieldElem Tower::generator() const {
  FieldElem e = make();
  if (degree_ == 1) {
    // x ≡ -f_0 in F_p[x]/(x + f_0)
    e.c_[0] = static_cast<std::uint8_t>((p_ - modulus_[0]) % p_);
  } else {
    e.c_[1] = 1;
  }
  return e;
}

FieldElem Tower::from_coeffs(std::span<const int> coeffs) const {
  if (static_cast<int>(coeffs.size()) > degree_) throw DimensionMismatch("too many coefficients");
  FieldElem e = make();
  for (std::size_t k = 0; k < coeffs.size(); ++k) e.c_[k] = static_cast<std::uint8_t>(((coeffs[k] % p_) + p_) % p_);
  return e;
}

void Tower::apply_linear(const std::vector<std::uint8_t>& matrix, const FieldElem& x, FieldElem& out) const {
  const int D = degree_;
  const std::uint32_t p = static_cast<std::uint32_t>(p_);
  for (int r = 0; r < D; ++r) {
    std::uint32_t acc = 0;
    const std::uint8_t* row = matrix.data() + static_cast<std::size_t>(r) * D;
    for (int c = 0; c < D; ++c) acc += static_cast<std::uint32_t>(row[c]) * x.c_[c];
    out.c_[r] = static_cast<std::uint8_t>(acc % p);
  }
}

FieldElem Tower::frobenius_p(const FieldElem& x, long k) const {
  if (x.tower_ != this) throw LevelMismatch("element from another tower");
  long kk = k % degree_;
  if (kk < 0) kk += degree_;
  if (kk == 0) return x;
  FieldElem out = make();
  apply_linear(frob_[static_cast<std::size_t>(kk)], x, out);
  return out;
}

FieldElem Tower::frobenius(const FieldElem& x, long j) const {
  return frobenius_p(x, (j % ambient_level()) * base_degree_);
}

bool Tower::in_level(const FieldElem& x, int d) const {
  if (d < 1) return false;
  return frobenius(x, d) == x;
}

int Tower::level_of(const FieldElem& x) const {
  const int amb = ambient_level();
  for (int d = 1; d <= amb; ++d)
    if (amb % d == 0 && frobenius(x, d) == x) return d;
  return amb;
}

FieldElem Tower::trace_to(const FieldElem& x, int from, int to) const {
  if (to < 1 || from < 1 || from % to != 0 || ambient_level() % from != 0)
    throw LevelMismatch("level " + std::to_string(to) + " is not a subfield of level " + std::to_string(from));
  if (!in_level(x, from)) throw LevelMismatch("element not in level " + std::to_string(from));
  FieldElem s = zero();
  for (int k = 0; k < from / to; ++k) s += frobenius(x, static_cast<long>(k) * to);
  return s;
}

FieldElem Tower::norm_to(const FieldElem& x, int from, int to) const {
  if (to < 1 || from < 1 || from % to != 0 || ambient_level() % from != 0)
    throw LevelMismatch("level " + std::to_string(to) + " is not a subfield of level " + std::to_string(from));
  if (!in_level(x, from)) throw LevelMismatch("element not in level " + std::to_string(from));
  FieldElem s = one();
  for (int k = 0; k < from / to; ++k) s *= frobenius(x, static_cast<long>(k) * to);
  return s;
}

int Tower::quad_char(const FieldElem& x, int d) const {
  if (x.is_zero()) throw ZeroArgument("quadratic character of zero");
  if (!in_level(x, d)) throw LevelMismatch("element not in level " + std::to_string(d));
  const unsigned __int128 e = (checked_pow(q_, d) - 1) / 2;
  const FieldElem r = x.pow(e);
  if (r.is_one()) return 1;
  if (r == -one()) return -1;
  throw InternalError("Euler criterion produced neither 1 nor -1");
}

int Tower::absolute_trace(const FieldElem& x, int d) const {
  if (!in_level(x, d)) throw LevelMismatch("element not in level " + std::to_string(d));
  FieldElem s = zero();
  for (int k = 0; k < base_degree_ * d; ++k) s += frobenius_p(x, k);
  for (int k = 1; k < degree_; ++k)
    if (s.c_[k]) throw InternalError("absolute trace not in the prime field");
  return s.c_[0];
}

bool Tower::has_level(int d) const {
  return d >= 1 && d < static_cast<int>(levels_.size()) && levels_[static_cast<std::size_t>(d)] != nullptr;
}

const Level& Tower::level(int d) const {
  if (!has_level(d)) throw LevelMismatch("level " + std::to_string(d) + " is not registered");
  return *levels_[static_cast<std::size_t>(d)];
}

std::vector<int> Tower::registered_levels() const {
  std::vector<int> out;
  for (std::size_t d = 1; d < levels_.size(); ++d)
    if (levels_[d]) out.push_back(static_cast<int>(d));
  return out;
}

void Tower::register_level(int d) {
  const int D = degree_;
  const int p = p_;
  // kernel of Frob_p^{b d} - I over F_p
  const auto& M = frob_[static_cast<std::size_t>((base_degree_ * d) % D)];
  std::vector<std::vector<int>> A(static_cast<std::size_t>(D), std::vector<int>(static_cast<std::size_t>(D)));
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) A[r][c] = ((M[static_cast<std::size_t>(r) * D + c] - (r == c ? 1 : 0)) % p + p) % p;
  std::vector<int> pivots;
  int row = 0;
  std::vector<int> pivot_of_col(static_cast<std::size_t>(D), -1);
  for (int c = 0; c < D && row < D; ++c) {
    int sel = -1;
    for (int r = row; r < D; ++r)
      if (A[r][c]) { sel = r; break; }
    if (sel < 0) continue;
    std::swap(A[row], A[sel]);
    const int iv = inv_mod(A[row][c], p);
    for (int k = 0; k < D; ++k) A[row][k] = A[row][k] * iv % p;
    for (int r = 0; r < D; ++r) {
      if (r == row || !A[r][c]) continue;
      const int f = A[r][c];
      for (int k = 0; k < D; ++k) A[r][k] = ((A[r][k] - f * A[row][k]) % p + p) % p;
    }
    pivot_of_col[c] = row;
    ++row;
  }
  std::vector<FieldElem> basis;
  for (int free = 0; free < D; ++free) {
    if (pivot_of_col[free] >= 0) continue;
    FieldElem v = make();
    v.c_[free] = 1;
    for (int c = 0; c < D; ++c)
      if (pivot_of_col[c] >= 0) v.c_[c] = static_cast<std::uint8_t>((p - A[pivot_of_col[c]][free]) % p);
    basis.push_back(v);
  }
  if (static_cast<int>(basis.size()) != base_degree_ * d) throw InternalError("fixed field has wrong dimension");
  auto lvl = std::make_unique<Level>();
  lvl->degree = d;
  lvl->size = q_pow(d);
  lvl->elements.reserve(lvl->size);
  lvl->elements.push_back(zero());
  for (const auto& bvec : basis) {
    const std::size_t n = lvl->elements.size();
    for (int c = 1; c < p; ++c) {
      FieldElem scaled = zero();
      for (int k = 0; k < D; ++k) scaled.c_[k] = static_cast<std::uint8_t>(bvec.c_[k] * c % p);
      for (std::size_t i = 0; i < n; ++i) lvl->elements.push_back(lvl->elements[i] + scaled);
    }
  }
  std::sort(lvl->elements.begin(), lvl->elements.end());
  lvl->index.reserve(lvl->size * 2);
  for (std::uint32_t i = 0; i < lvl->elements.size(); ++i) lvl->index.emplace(lvl->elements[i].packed(), i);
  levels_[static_cast<std::size_t>(d)] = std::move(lvl);
}

FieldElem Tower::smallest_nonsquare() const {
  for (const auto& x : level(1).elements)
    if (!x.is_zero() && quad_char(x, 1) == -1) return x;
  throw InternalError("no nonsquare in F_q");
}

FieldElem Tower::primitive_element(int d) const {
  const std::uint64_t N = q_pow(d) - 1;
  std::vector<std::uint64_t> primes;
  std::uint64_t n = N;
  for (std::uint64_t r = 2; r * r <= n; ++r)
    if (n % r == 0) {
      primes.push_back(r);
      while (n % r == 0) n /= r;
    }
  if (n > 1) primes.push_back(n);
  for (const auto& x : level(d).elements) {
    if (x.is_zero()) continue;
    bool ok = true;
    for (auto r : primes)
      if (x.pow(N / r).is_one()) { ok = false; break; }
    if (ok) return x;
  }
  throw InternalError("no primitive element");
}

// ---------------------------------------------------------------------------
// Embedding

namespace {

using FPoly = std::vector<FieldElem>;  // over a target tower, low degree first

void ftrim(FPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

FPoly fmod(FPoly a, const FPoly& f) {
  ftrim(a);
  const int df = static_cast<int>(f.size()) - 1;
  const FieldElem li = f.back().inverse();
  for (int k = static_cast<int>(a.size()) - 1; k >= df; --k) {
    if (a[k].is_zero()) continue;
    const FieldElem c = a[k] * li;
    for (int j = 0; j <= df; ++j) a[k - df + j] -= c * f[j];
  }
  if (static_cast<int>(a.size()) > df) a.resize(static_cast<std::size_t>(df));
  ftrim(a);
  return a;
}

FPoly fmulmod(const FPoly& a, const FPoly& b, const FPoly& f) {
  if (a.empty() || b.empty()) return {};
  const Tower* t = a[0].tower();
  FPoly r(a.size() + b.size() - 1, t->zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return fmod(std::move(r), f);
}

FPoly fgcd(FPoly a, FPoly b) {
  ftrim(a);
  ftrim(b);
  while (!b.empty()) {
    FPoly r = fmod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// One root of a squarefree polynomial f that splits into linear factors over
// the tower's ambient field of size P (odd), by Cantor–Zassenhaus.
FieldElem split_root(FPoly f, const Tower& t, unsigned __int128 P) {
  ftrim(f);
  std::uint64_t attempt = 0;
  while (f.size() > 2) {
    // δ runs through a fixed sequence of ambient elements
    ++attempt;
    std::vector<int> coeffs(static_cast<std::size_t>(t.degree()));
    std::uint64_t s = attempt * 0x9e3779b97f4a7c15ULL + 12345;
    for (auto& c : coeffs) {
      s ^= s >> 31;
      s *= 0xbf58476d1ce4e5b9ULL;
      s ^= s >> 27;
      c = static_cast<int>(s % static_cast<std::uint64_t>(t.p()));
    }
    const FieldElem delta = t.from_coeffs(coeffs);
    FPoly base{delta, t.one()};
    FPoly r{t.one()};
    unsigned __int128 e = (P - 1) / 2;
    base = fmod(base, f);
    while (e) {
      if (e & 1) r = fmulmod(r, base, f);
      e >>= 1;
      if (e) base = fmulmod(base, base, f);
    }
    if (r.empty()) r.push_back(t.zero());
    r[0] -= t.one();
    FPoly g = fgcd(f, r);
    if (g.size() > 1 && g.size() < f.size()) {
      // keep the smaller factor
      if (2 * (g.size() - 1) <= f.size() - 1) {
        f = g;
      } else {
        // f / g by long division
        FPoly q(f.size() - g.size() + 1, t.zero());
        FPoly rem = f;
        const FieldElem li = g.back().inverse();
        for (int k = static_cast<int>(rem.size()) - 1; k >= static_cast<int>(g.size()) - 1; --k) {
          const FieldElem c = rem[k] * li;
          q[k - (g.size() - 1)] = c;
          for (std::size_t j = 0; j < g.size(); ++j) rem[k - (g.size() - 1) + j] -= c * g[j];
        }
        ftrim(q);
        f = q;
      }
    }
    if (attempt > 10000) throw InternalError("root finding did not converge");
  }
  return -(f[0] / f[1]);
}

}  // namespace

Embedding::Embedding(std::shared_ptr<const Tower> from, std::shared_ptr<const Tower> to)
    : from_(std::move(from)), to_(std::move(to)) {
  if (from_->p() != to_->p() || to_->degree() % from_->degree() != 0)
    throw LevelMismatch("target tower does not contain the source field");
  const Tower& t = *to_;
  FPoly f;
  for (auto c : from_->modulus()) f.push_back(t.from_int(c));
  FieldElem root;
  if (from_->degree() == 1) {
    root = -f[0];
  } else {
    const FieldElem r = split_root(f, t, checked_pow(static_cast<std::uint64_t>(t.p()), t.degree()));
    root = r;
    for (int k = 1; k < from_->degree(); ++k) root = std::min(root, t.frobenius_p(r, k));
  }
  root_ = root;
  powers_.push_back(t.one());
  for (int k = 1; k < from_->degree(); ++k) powers_.push_back(powers_.back() * root_);
}

FieldElem Embedding::apply(const FieldElem& x) const {
  if (x.tower() != from_.get()) throw LevelMismatch("element not in the embedding source");
  FieldElem out = to_->zero();
  for (int k = 0; k < from_->degree(); ++k) {
    const int c = x.coeff(k);
    for (int j = 0; j < c; ++j) out += powers_[static_cast<std::size_t>(k)];
  }
  return out;
}

std::optional<FieldElem> Embedding::preimage(const FieldElem& x) const {
  if (x.tower() != to_.get()) throw LevelMismatch("element not in the embedding target");
  const int p = to_->p();
  const int Dt = to_->degree();
  const int Ds = from_->degree();
  // Solve Σ a_k powers_[k] = x over F_p: Dt equations, Ds unknowns.
  std::vector<std::vector<int>> A(static_cast<std::size_t>(Dt), std::vector<int>(static_cast<std::size_t>(Ds) + 1));
  for (int r = 0; r < Dt; ++r) {
    for (int c = 0; c < Ds; ++c) A[r][c] = powers_[static_cast<std::size_t>(c)].coeff(r);
    A[r][Ds] = x.coeff(r);
  }
  int row = 0;
  std::vector<int> pivot_col;
  for (int c = 0; c < Ds && row < Dt; ++c) {
    int sel = -1;
    for (int r = row; r < Dt; ++r)
      if (A[r][c]) { sel = r; break; }
    if (sel < 0) continue;
    std::swap(A[row], A[sel]);
    const int iv = inv_mod(A[row][c], p);
    for (auto& v : A[row]) v = v * iv % p;
    for (int r = 0; r < Dt; ++r) {
      if (r == row || !A[r][c]) continue;
      const int f = A[r][c];
      for (int k = 0; k <= Ds; ++k) A[r][k] = ((A[r][k] - f * A[row][k]) % p + p) % p;
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (int r = row; r < Dt; ++r)
    if (A[r][Ds]) return std::nullopt;
  std::vector<int> coeffs(static_cast<std::size_t>(Ds), 0);
  for (int r = 0; r < row; ++r) coeffs[static_cast<std::size_t>(pivot_col[r])] = A[r][Ds];
  return from_->from_coeffs(coeffs);
}

Enlargement enlarge(const std::shared_ptr<const Tower>& tower, int new_ambient_level) {
  if (new_ambient_level % tower->ambient_level() != 0)
    throw LevelMismatch("new ambient level must be a multiple of the old one");
  auto bigger = Tower::with_ambient(tower->p(), tower->base_degree(), tower->m(), new_ambient_level, false);
  auto emb = std::make_shared<const Embedding>(tower, bigger);
  return {bigger, emb};
}

}  // namespace weilbc
