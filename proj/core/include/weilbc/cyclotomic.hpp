#pragma once

// Exact arithmetic in Q(ζ_p).

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace weilbc {

class Tower;
class FieldElem;

/// Σ_{k<p-1} (num[k]/den) ζ_p^k, reduced by 1 + ζ + ... + ζ^{p-1} = 0.
/// Numerators share one positive denominator and the whole tuple is kept in
/// lowest terms, so equality is coefficient-wise.
class CycNum {
 public:
  /// The zero of an unspecified field. It adopts p from the other operand.
  CycNum() = default;
  explicit CycNum(int p);

  static CycNum rational(int p, std::int64_t num, std::int64_t den = 1);
  static CycNum zeta(int p, long k);
  static CycNum from_coeffs(int p, std::vector<std::int64_t> num, std::int64_t den);
  /// Σ_k counts[k] ζ^k for k in [0, p).
  static CycNum from_exponent_counts(int p, std::span<const std::int64_t> counts);
  /// Parse the "num/den,num/den,..." text form; p is the entry count plus one.
  static CycNum parse(const std::string& text);

  int p() const { return p_; }
  const std::vector<std::int64_t>& numerators() const { return num_; }
  std::int64_t denominator() const { return den_; }

  bool is_zero() const;
  /// True when the value lies in Q. Then `rational_value` is meaningful.
  bool is_rational() const;
  /// (num, den) of a rational value; throws ConfigInvalid otherwise.
  std::pair<std::int64_t, std::int64_t> rational_value() const;

  CycNum& operator+=(const CycNum& o);
  CycNum& operator-=(const CycNum& o);
  CycNum& operator*=(const CycNum& o);
  CycNum operator-() const;
  friend CycNum operator+(CycNum a, const CycNum& b) { return a += b; }
  friend CycNum operator-(CycNum a, const CycNum& b) { return a -= b; }
  friend CycNum operator*(CycNum a, const CycNum& b) { return a *= b; }
  friend CycNum operator/(const CycNum& a, const CycNum& b) { return a * b.inv(); }
  friend bool operator==(const CycNum& a, const CycNum& b);

  CycNum scaled(std::int64_t num, std::int64_t den = 1) const;

  /// Throws DivisionByZero on zero.
  CycNum inv() const;
  /// ζ ↦ ζ^{-1}.
  CycNum conj() const;
  /// ζ ↦ ζ^k for k prime to p.
  CycNum galois(long k) const;

  std::complex<double> to_complex() const;
  std::string to_string() const;
  /// Compact human form such as "1+2z^2" (z = ζ_p).
  std::string pretty() const;

 private:
  void normalize();
  void adopt(int p);

  int p_ = 0;
  std::vector<std::int64_t> num_;
  std::int64_t den_ = 1;
};

/// G_d = Σ_{x ∈ F_{q^d}} ψ_{d,a}(x²).
CycNum gauss_sum(const Tower& tower, int d, const FieldElem& scale);

/// Narrow with overflow detection.
std::int64_t narrow_checked(__int128 v);

}  // namespace weilbc
