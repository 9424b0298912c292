#pragma once

// Class functions, induced characters and the SL₂ torus identities.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "weilbc/cyclotomic.hpp"
#include "weilbc/grouplib.hpp"
#include "weilbc/normmap.hpp"
#include "weilbc/schrodinger.hpp"

namespace weilbc {

/// Values on the classes of a partition; `order` is the normalizer of inner
/// products (|G|, or |σ^i ⋉ G(F')| = |G(F')| for a coset).
struct ClassFunction {
  std::string key;
  int twist = -1;  // i for a function on the σ^i-coset, -1 on an ordinary group
  std::uint64_t order = 0;
  std::vector<std::uint64_t> sizes;
  std::vector<CycNum> values;

  std::size_t size() const { return values.size(); }
  ClassFunction conj() const;
  ClassFunction scaled(const CycNum& c) const;
  /// Pointwise operations; throw SupportMismatch on different supports.
  friend ClassFunction operator+(const ClassFunction& a, const ClassFunction& b);
  friend ClassFunction operator-(const ClassFunction& a, const ClassFunction& b);
  friend ClassFunction operator*(const ClassFunction& a, const ClassFunction& b);
};

ClassFunction make_class_function(const std::string& key, const ClassPartition& cp, std::uint64_t order,
                                  const std::function<CycNum(std::uint64_t rep_code)>& f);
/// (1/order) Σ_classes size · χ₁ · conj(χ₂). Throws SupportMismatch.
CycNum inner_product(const ClassFunction& a, const ClassFunction& b);
/// Same sum for functions on the σ^i-coset, normalized by |σ^i ⋉ G(F')| = |G(F')|.
CycNum twisted_inner_product(const ClassFunction& a, const ClassFunction& b, int i);

/// tr ρ_d on the classes of G(F_d) for G = Sp or Jacobi at the representation's level.
ClassFunction weil_class_function(const WeilRepresentation& rep, const Group& g, const ClassPartition& cp);
/// χ ∘ N_{i,t} on the twisted classes of the source group.
ClassFunction lift_class_function(const GyojaNorm& norm, const ClassFunction& chi, const ClassPartition& twisted);
/// TSV: class id, representative, value (text form), complex rendering.
std::string character_tsv(const Group& g, const ClassPartition& cp, const ClassFunction& f);

/// Ind_H^G χ(g) = (1/|H|) Σ_{x ∈ G} χ̇(x g x⁻¹), with χ̇ returning nullopt off H.
template <class E, class Mul, class Inv, class Chi>
CycNum induce_full(const std::vector<E>& G, std::uint64_t h_order, const E& g, Mul mul, Inv inv, Chi chi) {
  CycNum s;
  for (const E& x : G)
    if (auto v = chi(mul(mul(x, g), inv(x)))) s += *v;
  return s.scaled(1, static_cast<std::int64_t>(h_order));
}

/// Ind_H^G χ(g) = Σ_r χ̇(r⁻¹ g r) over left coset representatives r of G/H.
template <class E, class Mul, class Inv, class Chi>
CycNum induce_cosets(const std::vector<E>& reps, const E& g, Mul mul, Inv inv, Chi chi) {
  CycNum s;
  for (const E& r : reps)
    if (auto v = chi(mul(mul(inv(r), g), r))) s += *v;
  return s;
}

/// ρ_d restricted to the SL₂ torus of level d (n = 1).
struct TorusRestriction {
  int level = 0;
  std::uint64_t torus_order = 0;
  std::vector<std::int64_t> traces;          // tr ρ_d(γ^e), γ the torus generator
  std::vector<std::int64_t> multiplicities;  // of φ_k(γ^e) = exp(2πi k e / |T|)
  std::size_t omega_index = 0;               // k of the order-2 character
  int omega_sign = -1;                       // -1 for the elliptic torus, +1 for the split one
  bool identity_holds = false;               // tr ρ_d(t) = |T|·[t = 1] + omega_sign·ω(t) for every t
};
/// Throws InternalError if a torus trace is not rational.
TorusRestriction weil_torus_restriction(const std::shared_ptr<const Tower>& tower, int d, const FieldElem& scale);

/// Comparison of a virtual character against the extended Weil character on
/// Γ ⋉ T(F')H_V(F') for n = 1, where F' is the top level m of the tower.
///   m = 1:    ν  = Ind_H^{TH} ρ|_H − Ind_{TZ}^{TH} ωψ equals ρ.
///   m odd:    ν' = Ind(ρ̃'|_{Γ⋉H}) − Ind(ω̃'ψ̃') equals ρ̃'.
///   m even:   ν' = −Ind(ρ̃'|_{Γ⋉H}) + Ind(ω̃'ψ̃') equals η ρ̃', η(σ^i) = (−1)^i.
struct TorusVirtualCheck {
  int m = 1;
  std::uint64_t elements = 0;
  std::uint64_t pass = 0;
  std::uint64_t fail = 0;
  CycNum norm_squared;    // ⟨ν', ν'⟩
  CycNum value_at_sigma;  // ν'(σ, 1), or ν(1) when m = 1
  std::vector<std::string> failures;  // first few mismatches
};
TorusVirtualCheck torus_virtual_check(const std::shared_ptr<const Tower>& tower, const FieldElem& scale);

/// Number of conjugacy classes of Γ ⋉ G(F') by orbit computation.
std::size_t semidirect_class_count(const Group& g);
/// Σ_i #(σ-orbits on classes of G(F_{gcd(i,m)})), i = 0..m-1.
std::size_t lifted_class_space_dimension(const Group& g);

}  // namespace weilbc
