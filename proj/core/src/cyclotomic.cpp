#include "weilbc/cyclotomic.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "weilbc/error.hpp"
#include "weilbc/fieldtower.hpp"

namespace weilbc {

std::int64_t narrow_checked(__int128 v) {
  if (v > INT64_MAX || v < -INT64_MAX) throw ArithmeticOverflow("cyclotomic coefficient exceeds 64 bits");
  return static_cast<std::int64_t>(v);
}

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

// reduce a length-p vector in the ζ^0..ζ^{p-1} basis to length p-1
std::vector<std::int64_t> reduce_full(const std::vector<__int128>& full, int p) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(p - 1));
  const __int128 top = full[static_cast<std::size_t>(p - 1)];
  for (int k = 0; k < p - 1; ++k) out[static_cast<std::size_t>(k)] = narrow_checked(full[static_cast<std::size_t>(k)] - top);
  return out;
}

}  // namespace

CycNum::CycNum(int p) : p_(p), num_(static_cast<std::size_t>(p > 0 ? p - 1 : 0), 0), den_(1) {}

CycNum CycNum::rational(int p, std::int64_t num, std::int64_t den) {
  if (den == 0) throw DivisionByZero("zero denominator");
  CycNum r(p);
  r.num_[0] = num;
  r.den_ = den;
  r.normalize();
  return r;
}

CycNum CycNum::zeta(int p, long k) {
  long e = k % p;
  if (e < 0) e += p;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(p), 0);
  counts[static_cast<std::size_t>(e)] = 1;
  return from_exponent_counts(p, counts);
}

CycNum CycNum::from_coeffs(int p, std::vector<std::int64_t> num, std::int64_t den) {
  if (static_cast<int>(num.size()) != p - 1) throw DimensionMismatch("cyclotomic coefficient count must be p-1");
  if (den == 0) throw DivisionByZero("zero denominator");
  CycNum r(p);
  r.num_ = std::move(num);
  r.den_ = den;
  r.normalize();
  return r;
}

CycNum CycNum::from_exponent_counts(int p, std::span<const std::int64_t> counts) {
  if (static_cast<int>(counts.size()) != p) throw DimensionMismatch("exponent counts must have length p");
  CycNum r(p);
  const std::int64_t top = counts[static_cast<std::size_t>(p - 1)];
  for (int k = 0; k < p - 1; ++k) r.num_[static_cast<std::size_t>(k)] = counts[static_cast<std::size_t>(k)] - top;
  return r;
}

CycNum CycNum::parse(const std::string& text) {
  if (text == "0") return CycNum();
  std::vector<std::int64_t> nums;
  std::vector<std::int64_t> dens;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    auto slash = tok.find('/');
    try {
      if (slash == std::string::npos) {
        nums.push_back(std::stoll(tok));
        dens.push_back(1);
      } else {
        nums.push_back(std::stoll(tok.substr(0, slash)));
        dens.push_back(std::stoll(tok.substr(slash + 1)));
      }
    } catch (const std::exception&) {
      throw ParseError("bad cyclotomic entry '" + tok + "'");
    }
    if (dens.back() == 0) throw ParseError("zero denominator");
  }
  const int p = static_cast<int>(nums.size()) + 1;
  if (p < 3 || !is_prime(static_cast<std::uint64_t>(p))) throw ParseError("entry count does not match an odd prime");
  std::int64_t L = 1;
  for (auto d : dens) L = narrow_checked(static_cast<__int128>(L) / gcd64(L, d) * (d < 0 ? -d : d));
  std::vector<std::int64_t> num(nums.size());
  for (std::size_t k = 0; k < nums.size(); ++k) num[k] = narrow_checked(static_cast<__int128>(nums[k]) * (L / dens[k]));
  return from_coeffs(p, std::move(num), L);
}

void CycNum::normalize() {
  if (den_ < 0) {
    den_ = -den_;
    for (auto& v : num_) v = -v;
  }
  std::int64_t g = den_;
  for (auto v : num_) g = gcd64(g, v);
  if (g > 1) {
    den_ /= g;
    for (auto& v : num_) v /= g;
  }
  bool zero = true;
  for (auto v : num_) zero = zero && v == 0;
  if (zero) den_ = 1;
}

void CycNum::adopt(int p) {
  if (p_ == p) return;
  if (p_ == 0) {
    *this = CycNum(p);
    return;
  }
  if (p != 0) throw LevelMismatch("cyclotomic numbers of different orders");
}

bool CycNum::is_zero() const {
  for (auto v : num_)
    if (v) return false;
  return true;
}

bool CycNum::is_rational() const {
  for (std::size_t k = 1; k < num_.size(); ++k)
    if (num_[k]) return false;
  return true;
}

std::pair<std::int64_t, std::int64_t> CycNum::rational_value() const {
  if (!is_rational()) throw ConfigInvalid("value " + pretty() + " is not rational");
  return {num_.empty() ? 0 : num_[0], den_};
}

CycNum& CycNum::operator+=(const CycNum& o) {
  if (o.p_ == 0) return *this;
  adopt(o.p_);
  const std::int64_t g = gcd64(den_, o.den_);
  const __int128 fa = o.den_ / g;
  const __int128 fb = den_ / g;
  for (std::size_t k = 0; k < num_.size(); ++k) num_[k] = narrow_checked(num_[k] * fa + o.num_[k] * fb);
  den_ = narrow_checked(static_cast<__int128>(den_) * fa);
  normalize();
  return *this;
}

CycNum& CycNum::operator-=(const CycNum& o) { return *this += -o; }

CycNum CycNum::operator-() const {
  CycNum r = *this;
  for (auto& v : r.num_) v = -v;
  return r;
}

CycNum& CycNum::operator*=(const CycNum& o) {
  if (o.p_ == 0 || p_ == 0) {
    const int p = p_ ? p_ : o.p_;
    *this = CycNum(p);
    return *this;
  }
  adopt(o.p_);
  const int p = p_;
  std::vector<__int128> full(static_cast<std::size_t>(p), 0);
  for (int i = 0; i < p - 1; ++i) {
    if (!num_[i]) continue;
    for (int j = 0; j < p - 1; ++j) {
      if (!o.num_[j]) continue;
      full[static_cast<std::size_t>((i + j) % p)] += static_cast<__int128>(num_[i]) * o.num_[j];
    }
  }
  num_ = reduce_full(full, p);
  den_ = narrow_checked(static_cast<__int128>(den_) * o.den_);
  normalize();
  return *this;
}

bool operator==(const CycNum& a, const CycNum& b) {
  if (a.p_ == b.p_) return a.den_ == b.den_ && a.num_ == b.num_;
  if (a.p_ == 0) return b.is_zero();
  if (b.p_ == 0) return a.is_zero();
  return false;
}

CycNum CycNum::scaled(std::int64_t num, std::int64_t den) const {
  if (den == 0) throw DivisionByZero("zero denominator");
  CycNum r = *this;
  for (auto& v : r.num_) v = narrow_checked(static_cast<__int128>(v) * num);
  r.den_ = narrow_checked(static_cast<__int128>(r.den_) * den);
  r.normalize();
  return r;
}

CycNum CycNum::galois(long k) const {
  if (p_ == 0) return *this;
  long kk = k % p_;
  if (kk < 0) kk += p_;
  if (kk == 0) throw ConfigInvalid("Galois exponent must be prime to p");
  std::vector<__int128> full(static_cast<std::size_t>(p_), 0);
  for (int j = 0; j < p_ - 1; ++j) full[static_cast<std::size_t>((j * kk) % p_)] += num_[static_cast<std::size_t>(j)];
  CycNum r(p_);
  r.num_ = reduce_full(full, p_);
  r.den_ = den_;
  r.normalize();
  return r;
}

CycNum CycNum::conj() const { return galois(-1); }

CycNum CycNum::inv() const {
  if (is_zero()) throw DivisionByZero("inverse of zero");
  // a^{-1} = Π_{k≠1} σ_k(a) / N(a), with N(a) = a · Π_{k≠1} σ_k(a) rational
  CycNum prod = CycNum::rational(p_, 1);
  for (int k = 2; k < p_; ++k) prod *= galois(k);
  const CycNum n = *this * prod;
  auto [nn, nd] = n.rational_value();
  return prod.scaled(nd, nn);
}

std::complex<double> CycNum::to_complex() const {
  std::complex<double> z{0.0, 0.0};
  for (int k = 0; k < p_ - 1; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / p_;
    z += static_cast<double>(num_[static_cast<std::size_t>(k)]) * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return z / static_cast<double>(den_);
}

std::string CycNum::to_string() const {
  if (p_ == 0) return "0";
  std::string s;
  for (std::size_t k = 0; k < num_.size(); ++k) {
    const std::int64_t g = gcd64(num_[k], den_);
    const std::int64_t n = g ? num_[k] / g : 0;
    const std::int64_t d = g ? den_ / g : 1;
    if (k) s += ",";
    s += std::to_string(n) + "/" + std::to_string(d);
  }
  return s;
}

std::string CycNum::pretty() const {
  std::string s;
  for (std::size_t k = 0; k < num_.size(); ++k) {
    const std::int64_t v = num_[k];
    if (!v) continue;
    std::string term;
    if (k == 0) {
      term = std::to_string(v);
    } else {
      if (v == -1) term = "-";
      else if (v != 1) term = std::to_string(v) + "*";
      term += k == 1 ? "z" : "z^" + std::to_string(k);
    }
    if (!s.empty() && term[0] != '-') s += "+";
    s += term;
  }
  if (s.empty()) s = "0";
  if (den_ != 1) s = "(" + s + ")/" + std::to_string(den_);
  return s;
}

CycNum gauss_sum(const Tower& tower, int d, const FieldElem& scale) {
  const int p = tower.p();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(p), 0);
  for (const auto& x : tower.level(d).elements) ++counts[static_cast<std::size_t>(tower.psi_exponent(x * x, d, scale))];
  return CycNum::from_exponent_counts(p, counts);
}

}  // namespace weilbc
