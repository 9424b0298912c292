#pragma once

// Finite field tower F_p ⊂ F_q ⊂ F_{q^d} ⊂ ... realized inside a single ambient
// field F_p[x]/(f). Every level is the fixed set of a power of the q-Frobenius,
// so embeddings between levels are identities.

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace weilbc {

/// Largest supported ambient degree over F_p.
inline constexpr int kMaxDegree = 48;

class Tower;

/// Element of the ambient field, stored as coefficients over F_p in the
/// power basis 1, x, ..., x^{D-1}. Elements hold a non-owning pointer to their
/// tower, which must outlive them.
class FieldElem {
 public:
  FieldElem() = default;

  const Tower* tower() const { return tower_; }
  std::uint8_t coeff(int k) const { return c_[static_cast<std::size_t>(k)]; }
  bool is_zero() const;
  bool is_one() const;

  FieldElem& operator+=(const FieldElem& other);
  FieldElem& operator-=(const FieldElem& other);
  FieldElem& operator*=(const FieldElem& other);
  FieldElem operator-() const;

  friend FieldElem operator+(FieldElem a, const FieldElem& b) { return a += b; }
  friend FieldElem operator-(FieldElem a, const FieldElem& b) { return a -= b; }
  friend FieldElem operator*(FieldElem a, const FieldElem& b) { return a *= b; }
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inverse(); }

  /// Throws DivisionByZero on zero.
  FieldElem inverse() const;
  FieldElem pow(unsigned __int128 e) const;

  friend bool operator==(const FieldElem& a, const FieldElem& b) {
    return a.tower_ == b.tower_ && a.c_ == b.c_;
  }
  /// Canonical order: lexicographic on (c_0, c_1, ...), low degree most significant.
  friend std::strong_ordering operator<=>(const FieldElem& a, const FieldElem& b) {
    return a.c_ <=> b.c_;
  }

  /// Base-p digits with c_0 most significant; order-preserving. Requires p^D < 2^64.
  std::uint64_t packed() const;
  std::size_t hash() const;
  std::string to_string() const;

 private:
  friend class Tower;
  const Tower* tower_ = nullptr;
  std::array<std::uint8_t, kMaxDegree> c_{};
};

struct FieldElemHash {
  std::size_t operator()(const FieldElem& x) const { return x.hash(); }
};

/// Elements of F_{q^d} in canonical order, with a reverse index.
struct Level {
  int degree = 0;          // over F_q
  std::uint64_t size = 0;  // q^degree
  std::vector<FieldElem> elements;
  std::unordered_map<std::uint64_t, std::uint32_t> index;

  /// Position of x in `elements`; throws LevelMismatch if x is not in this level.
  std::uint32_t index_of(const FieldElem& x) const;
};

class Tower {
 public:
  /// Tower with ambient F_{q^m}, q = p^base_degree, and every level d | m registered.
  /// Throws EvenCharacteristic for p = 2, NotPrime for composite p.
  static std::shared_ptr<const Tower> build(int p, int base_degree, int m);

  /// Tower whose ambient field has degree ambient_level over F_q. Levels d | m
  /// are registered only when register_levels is set.
  static std::shared_ptr<const Tower> with_ambient(int p, int base_degree, int m, int ambient_level,
                                                   bool register_levels);

  /// Parse the text form produced by serialize().
  static std::shared_ptr<const Tower> parse(const std::string& text);

  Tower(const Tower&) = delete;
  Tower& operator=(const Tower&) = delete;

  int p() const { return p_; }
  int base_degree() const { return base_degree_; }
  int m() const { return m_; }
  /// Ambient degree over F_p.
  int degree() const { return degree_; }
  /// Ambient degree over F_q.
  int ambient_level() const { return degree_ / base_degree_; }
  std::uint64_t q() const { return q_; }
  /// q^d; throws ArithmeticOverflow past 2^64.
  std::uint64_t q_pow(int d) const;
  const std::vector<std::uint8_t>& modulus() const { return modulus_; }

  FieldElem zero() const;
  FieldElem one() const;
  FieldElem from_int(std::int64_t v) const;
  /// The class of x in F_p[x]/(f).
  FieldElem generator() const;
  FieldElem from_coeffs(std::span<const int> coeffs) const;

  /// x^{q^j}; j may be negative.
  FieldElem frobenius(const FieldElem& x, long j) const;
  /// x^{p^k}; k may be negative.
  FieldElem frobenius_p(const FieldElem& x, long k) const;

  bool in_level(const FieldElem& x, int d) const;
  /// Smallest d with x ∈ F_{q^d}.
  int level_of(const FieldElem& x) const;

  /// Relative trace / norm from F_{q^from} down to F_{q^to}.
  /// Throws LevelMismatch unless to | from and x ∈ F_{q^from}.
  FieldElem trace_to(const FieldElem& x, int from, int to) const;
  FieldElem norm_to(const FieldElem& x, int from, int to) const;

  /// Quadratic character of F_{q^d}^×: x^{(q^d-1)/2} as ±1. Throws ZeroArgument on 0.
  int quad_char(const FieldElem& x, int d) const;

  /// Tr_{F_{q^d}/F_p}(x) as an integer in [0, p).
  int absolute_trace(const FieldElem& x, int d) const;

  /// Exponent k with ψ_{d,a}(x) = ζ_p^k, where ψ_{d,a}(x) = ζ_p^{Tr_{F_{q^d}/F_p}(a x)}.
  int psi_exponent(const FieldElem& x, int d, const FieldElem& scale) const {
    return absolute_trace(scale * x, d);
  }

  bool has_level(int d) const;
  const Level& level(int d) const;
  std::vector<int> registered_levels() const;

  /// Smallest nonsquare of F_q in canonical order.
  FieldElem smallest_nonsquare() const;
  /// A generator of F_{q^d}^× (first in canonical order); level must be registered.
  FieldElem primitive_element(int d) const;

  /// "p, degrees, modulus (low degree first)" text form.
  std::string serialize() const;

 private:
  Tower(int p, int base_degree, int m, std::vector<std::uint8_t> modulus);
  void register_level(int d);
  void apply_linear(const std::vector<std::uint8_t>& matrix, const FieldElem& x, FieldElem& out) const;
  FieldElem make() const;

  friend class FieldElem;
  friend class Embedding;

  int p_;
  int base_degree_;
  int m_;
  int degree_;
  std::uint64_t q_;
  std::vector<std::uint8_t> modulus_;  // length degree_+1, monic
  // frob_[k] is the D×D matrix (row-major) of x ↦ x^{p^k}, k = 0..D-1.
  std::vector<std::vector<std::uint8_t>> frob_;
  std::vector<std::unique_ptr<Level>> levels_;  // indexed by d, null if not registered
};

/// Field embedding F_p[x]/(f) → F_p[y]/(g), x ↦ r where r is the smallest root
/// of f in the target in canonical order.
class Embedding {
 public:
  Embedding(std::shared_ptr<const Tower> from, std::shared_ptr<const Tower> to);

  const std::shared_ptr<const Tower>& from() const { return from_; }
  const std::shared_ptr<const Tower>& to() const { return to_; }
  const FieldElem& root() const { return root_; }

  FieldElem apply(const FieldElem& x) const;
  /// Inverse image, if x lies in the image.
  std::optional<FieldElem> preimage(const FieldElem& x) const;

 private:
  std::shared_ptr<const Tower> from_;
  std::shared_ptr<const Tower> to_;
  FieldElem root_;
  std::vector<FieldElem> powers_;  // root^k, k < from->degree()
};

/// New ambient of degree new_ambient_level over F_q together with the
/// re-embedding of the old ambient. new_ambient_level must be a multiple of
/// the old ambient level.
struct Enlargement {
  std::shared_ptr<const Tower> tower;
  std::shared_ptr<const Embedding> embedding;
};
Enlargement enlarge(const std::shared_ptr<const Tower>& tower, int new_ambient_level);

bool is_prime(std::uint64_t n);

}  // namespace weilbc
