#pragma once

// Symplectic, similitude and Heisenberg groups over a tower level, their
// Galois-twisted cosets, enumeration and (twisted) conjugacy classes.
//
// Conventions: V = X ⊕ X* with basis (e_1..e_n, f_1..f_n), matrices act on
// column vectors with X-coordinates first, ⟨v,w⟩ = vᵀ J w with
// J = [[0, I], [-I, 0]].

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "weilbc/fieldtower.hpp"
#include "weilbc/matrix.hpp"
#include "weilbc/rng.hpp"

namespace weilbc {

inline constexpr std::uint64_t kDefaultGroupCap = 1'000'000;

Mat symplectic_J(const Tower& t, int n);
/// ⟨v,w⟩ = Σ_i v_i w_{n+i} - v_{n+i} w_i.
FieldElem symp_form(const Vec& v, const Vec& w);
/// 1/2 in F_p.
FieldElem half(const Tower& t);

enum class Membership { Symp, Similitude, Neither };
struct MembershipResult {
  Membership kind;
  FieldElem lambda;  // similitude factor; 1 for Symp
};
/// Throws DimensionMismatch unless g is 2n×2n, LevelMismatch if an entry is outside level d.
MembershipResult membership(const Mat& g, int d);

// Standard elements.
Mat siegel_unip(const Mat& b);   // [[1,b],[0,1]]
Mat siegel_lower(const Mat& c);  // [[1,0],[c,1]]
Mat levi(const Mat& a);          // [[a,0],[0,a^{-T}]]
Mat weyl(const Mat& c);          // [[0,-c^{-T}],[c,0]]
Mat similitude_diag(const Tower& t, int n, const FieldElem& lambda);  // [[1,0],[0,λ]]
bool is_symmetric(const Mat& b);

/// Heisenberg element (v, t).
struct HeisElem {
  Vec v;
  FieldElem t;
  friend bool operator==(const HeisElem&, const HeisElem&) = default;
};
HeisElem heis_identity(const Tower& t, int n);
/// (v1,t1)(v2,t2) = (v1+v2, t1+t2+½⟨v1,v2⟩). Throws LevelMismatch across towers.
HeisElem heis_mul(const HeisElem& a, const HeisElem& b);
HeisElem heis_inv(const HeisElem& a);

/// Element of G or of Sp⋉H: matrix part s and, for Jacobi groups, a Heisenberg
/// part with (s,h)(s',h') = (ss', h·s(h')). For matrix groups `v` is empty.
struct GElem {
  Mat s;
  Vec v;
  FieldElem t;

  bool has_heis() const { return !v.empty(); }
  HeisElem heis() const { return {v, t}; }
  friend bool operator==(const GElem& a, const GElem& b) { return a.s == b.s && a.v == b.v && (a.v.empty() || a.t == b.t); }
  friend GElem operator*(const GElem& a, const GElem& b);
  GElem inverse() const;
  GElem frobenius(long j) const;
  std::string to_string() const;
};
GElem from_matrix(Mat s);
GElem from_heis(const Tower& t, int n, const HeisElem& h);
GElem from_parts(Mat s, const HeisElem& h);

/// (σ^i, g) in Γ ⋉ G(F'), Γ = Gal(F'/F) of order m.
struct TwistedElem {
  int i;
  GElem g;
};
/// (σ^i,g)(σ^j,h) = (σ^{i+j}, g·σ^i(h)), exponent mod m.
TwistedElem twisted_mul(const TwistedElem& a, const TwistedElem& b, int m);
TwistedElem twisted_inv(const TwistedElem& a, int m);

enum class GroupKind { Sp, GSp, Jacobi, GL1 };
const char* to_string(GroupKind k);

/// A group G(F_{q^d}) of one of the supported kinds.
class Group {
 public:
  Group(GroupKind kind, int n, std::shared_ptr<const Tower> tower, int level);

  GroupKind kind() const { return kind_; }
  int n() const { return n_; }
  int level() const { return level_; }
  const std::shared_ptr<const Tower>& tower() const { return tower_; }
  /// Matrix size: 2n, or 1 for GL1.
  int dim() const { return kind_ == GroupKind::GL1 ? 1 : 2 * n_; }

  GElem identity() const;
  bool contains(const GElem& x) const;
  /// Group order by formula; throws ArithmeticOverflow past 2^64.
  std::uint64_t order() const;

  /// Mixed-radix code of the entries (matrix row-major, then v, then t) in the
  /// level's canonical index; code order equals canonical element order.
  std::uint64_t encode(const GElem& x) const;
  GElem decode(std::uint64_t code) const;

  std::vector<GElem> generators() const;
  /// Deterministic random word in generator families.
  GElem random(Rng& rng) const;
  /// Sorted codes of all elements. Throws GroupTooLarge if order() > cap.
  /// The result is cached and shared by copies of this Group.
  const std::vector<std::uint64_t>& enumerate(std::uint64_t cap = kDefaultGroupCap) const;

  FieldElem random_scalar(Rng& rng, bool nonzero) const;
  Mat random_symmetric(Rng& rng) const;
  Mat random_invertible(Rng& rng) const;

 private:
  GroupKind kind_;
  int n_;
  std::shared_ptr<const Tower> tower_;
  int level_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Partition of an enumerated group into orbits, each identified by its
/// least element code.
struct ClassPartition {
  std::vector<std::uint64_t> elements;  // sorted codes
  std::vector<std::uint32_t> class_of;  // per element position
  std::vector<std::uint64_t> reps;      // least code per class, ascending
  std::vector<std::uint64_t> sizes;

  std::size_t num_classes() const { return reps.size(); }
  /// Position of code in `elements`; throws LevelMismatch if absent.
  std::uint32_t index_of(std::uint64_t code) const;
  std::uint32_t class_id(std::uint64_t code) const { return class_of[index_of(code)]; }
};

ClassPartition conjugacy_classes(const Group& g, std::uint64_t cap = kDefaultGroupCap);
/// Orbits of x ↦ h x σ^i(h)^{-1} on G(F') for the group at level m.
ClassPartition twisted_classes(const Group& g, int i, std::uint64_t cap = kDefaultGroupCap);
/// TSV: class id, representative entries (row-major), class size.
std::string classes_tsv(const Group& g, const ClassPartition& cp);

/// SL₂ torus {[[a, w b],[b, a]] : a² - w b² = 1} over F_{q^d}, w the smallest
/// nonsquare of F_q. Elliptic of order q^d+1 for odd d, split of order q^d-1 for even d.
struct Sl2Torus {
  int level = 0;
  FieldElem w;
  std::vector<Mat> elements;  // canonical order
  Mat generator;
  std::uint64_t order() const { return elements.size(); }
  bool contains(const Mat& g) const;
  /// Unique character of order 2: +1 on squares.
  int omega(const Mat& g) const;
};
Sl2Torus sl2_torus(const std::shared_ptr<const Tower>& tower, int d);
/// Torus norm T(F_{q^e}) → T(F_{q^d}): t σ^d(t) ⋯ σ^{d(e/d-1)}(t).
Mat torus_norm(const Mat& t, int e, int d);

}  // namespace weilbc
