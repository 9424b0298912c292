#pragma once

// Twisted norm maps N_{i,t}: σ^i ⋉ G(F') → G(F_d).
//
// For g ∈ G(F') let P_k = g σ^i(g) ⋯ σ^{i(k-1)}(g). Choose α with
// α⁻¹ σ^d(α) = P_t, then N_{i,t}(σ^i, g) = α P_μ α⁻¹, which is σ^d-fixed.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "weilbc/fieldtower.hpp"
#include "weilbc/grouplib.hpp"

namespace weilbc {

struct NormConfig {
  int m = 1;
  int i = 0;
  int d = 1;   // gcd(m, i), or m when i = 0
  int j = 0;   // i / d
  int mu = 1;  // m / d
  int t = 1;
  std::string to_string() const;
};

/// Smallest positive t with t·i ≡ d (mod m); i = 0 gives t = 1, d = m.
/// Throws ConfigInvalid unless 0 ≤ i < m.
NormConfig choose_t(int i, int m);
/// Validates t·i ≡ gcd(i, m) (mod m). Throws ConfigInvalid.
NormConfig make_config(int i, int t, int m);

/// g σ^i(g) ⋯ σ^{i(k-1)}(g); the identity for k = 0.
GElem twisted_product(int i, const GElem& g, int k);

/// Entry-wise image of x under a field embedding, and its inverse when defined.
GElem embed(const GElem& x, const Embedding& e);
/// Throws LevelMismatch if some entry is outside the image.
GElem pull_back(const GElem& x, const Embedding& e);

struct LangWitness {
  GElem alpha;   // over `tower`
  GElem target;  // h, over `tower`
  int lang_level = 0;  // α ∈ G(F_{q^lang_level})
  std::shared_ptr<const Tower> tower;
  std::shared_ptr<const Embedding> embedding;  // base tower → tower
};

/// Solves α⁻¹ σ^d(α) = h by Galois descent over the smallest level N where a
/// solution exists, enlarging the ambient field as needed.
class LangSolver {
 public:
  /// ambient_cap bounds N (over F_q) and the enlarged ambient level.
  LangSolver(GroupKind kind, int n, std::shared_ptr<const Tower> base, int ambient_cap = kMaxDegree);

  GroupKind kind() const { return kind_; }
  int ambient_cap() const { return cap_; }
  const std::shared_ptr<const Tower>& base() const { return base_; }

  /// Level N of the smallest field containing a solution. Throws AmbientCapExceeded.
  int solution_level(const GElem& h, int d) const;
  /// Throws AmbientCapExceeded, InternalError if the witness fails to verify.
  LangWitness solve(const GElem& h, int d) const;
  /// Ambient level lcm(base ambient, N) with the embedding of the base tower.
  const Enlargement& field_for(int level) const;

 private:
  GroupKind kind_;
  int n_;
  std::shared_ptr<const Tower> base_;
  int cap_;
  mutable std::mutex mu_;
  mutable std::map<int, Enlargement> fields_;
};

/// Exhaustive search for α in an enumerated group at level N of the base tower;
/// used as an independent check of the constructive solver on small cases.
std::optional<GElem> lang_search(const Group& g, const GElem& h, int d);

/// Norm map for a group at level m of a tower built with m.
class GyojaNorm {
 public:
  GyojaNorm(Group source, NormConfig cfg, int ambient_cap = kMaxDegree);

  const NormConfig& config() const { return cfg_; }
  const Group& source() const { return source_; }
  /// G(F_d).
  const Group& target() const { return target_; }
  const LangSolver& solver() const { return solver_; }

  /// N_{i,t}(σ^i, g), an element of G(F_d) over the source tower.
  GElem operator()(const GElem& g) const;
  /// Same, with the witness used.
  GElem apply(const GElem& g, LangWitness* witness) const;

  /// Class of the norm in G(F_d); enumerates G(F_d) on first use.
  std::uint32_t norm_class(const GElem& g) const;
  const ClassPartition& target_classes() const;

 private:
  Group source_;
  Group target_;
  NormConfig cfg_;
  LangSolver solver_;
  mutable std::once_flag classes_once_;
  mutable std::shared_ptr<ClassPartition> classes_;
};

struct BijectionRow {
  std::uint64_t twisted_rep;  // code in G(F')
  std::uint64_t twisted_size;
  std::uint64_t norm_rep;     // code in G(F_d)
  std::uint64_t norm_size;
};

struct BijectionReport {
  NormConfig cfg;
  std::size_t twisted_classes = 0;
  std::size_t target_classes = 0;
  bool well_defined = true;  // every element of a twisted class maps to one class
  bool injective = true;
  bool surjective = true;
  bool equivariant = true;   // N(σ^i, σ(g)) ~ σ(N(σ^i, g))
  std::vector<BijectionRow> rows;
  bool ok() const { return well_defined && injective && surjective && equivariant; }
};

/// Norms every element of G(F'), or the first max_per_class elements of each
/// twisted class when it is nonzero. Throws GroupTooLarge.
BijectionReport verify_bijection(const GyojaNorm& norm, std::uint64_t cap = kDefaultGroupCap,
                                 std::size_t max_per_class = 0);
/// TSV: twisted class rep, norm class rep, class sizes.
std::string bijection_tsv(const GyojaNorm& norm, const BijectionReport& r);

}  // namespace weilbc
