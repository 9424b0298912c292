#pragma once

// Weil representation of Sp(F_{q^d}) ⋉ H(F_{q^d}) in the Schrödinger model on
// functions on X*(F_{q^d}).
//
//   Heis (x + x*, t):  f(y) ↦ ψ(t - ½ x·x* - y·x) f(y + x*)
//   Unip b:            f(y) ↦ ψ(½ yᵀ b y) f(y)
//   Levi a:            f(y) ↦ ε(det a) f(aᵀ y)
//   Weyl c:            f(y) ↦ κ ε(det c) Σ_x ψ(-(c⁻¹y)·x) f(x),  κ = (ε(2) G)^{-n}
//   Galois σ^j:        f(y) ↦ f(σ^{-j} y)
//
// with ρ(s, h) = ρ(h) ρ(s) on Sp ⋉ H.

#include <cstdint>
#include <map>
#include <optional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "weilbc/cyclotomic.hpp"
#include "weilbc/fieldtower.hpp"
#include "weilbc/grouplib.hpp"
#include "weilbc/matrix.hpp"

namespace weilbc {

/// Square matrix over Q(ζ_p) with one common positive denominator.
class WeilOperator {
 public:
  WeilOperator() = default;
  WeilOperator(int p, std::size_t dim);
  static WeilOperator identity(int p, std::size_t dim);

  int p() const { return p_; }
  std::size_t dim() const { return dim_; }
  std::int64_t denominator() const { return den_; }

  CycNum entry(std::size_t i, std::size_t j) const;
  bool entry_is_zero(std::size_t i, std::size_t j) const;
  /// The p-1 numerators of entry (i,j) over denominator().
  const std::int64_t* raw(std::size_t i, std::size_t j) const { return cell(i, j); }
  /// Set entry (i,j) to ζ^k · s, where s shares this operator's denominator as numerators.
  void set_root(std::size_t i, std::size_t j, long k, std::int64_t sign);

  WeilOperator operator*(const WeilOperator& o) const;
  friend bool operator==(const WeilOperator& a, const WeilOperator& b);
  WeilOperator scaled(const CycNum& c) const;
  WeilOperator conj_transpose() const;

  CycNum trace() const;
  /// Σ_x M[x, perm[x]].
  CycNum permuted_trace(const std::vector<std::uint32_t>& perm) const;
  bool is_monomial() const;

  std::string serialize() const;
  static WeilOperator parse(int p, std::size_t dim, const std::string& text);

  /// Build from an explicit function (i, j) -> CycNum; used by oracles and tests.
  template <class F>
  static WeilOperator from_function(int p, std::size_t dim, F&& f) {
    WeilOperator r(p, dim);
    std::vector<CycNum> vals(dim * dim);
    std::int64_t L = 1;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        vals[i * dim + j] = f(i, j);
        L = lcm_den(L, vals[i * dim + j]);
      }
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) r.set_scaled(i, j, vals[i * dim + j], L);
    r.den_ = L;
    r.normalize();
    return r;
  }

 private:
  static std::int64_t lcm_den(std::int64_t L, const CycNum& c);
  void set_scaled(std::size_t i, std::size_t j, const CycNum& c, std::int64_t L);
  void normalize();
  std::int64_t* cell(std::size_t i, std::size_t j) { return num_.data() + (i * dim_ + j) * static_cast<std::size_t>(p_ - 1); }
  const std::int64_t* cell(std::size_t i, std::size_t j) const {
    return num_.data() + (i * dim_ + j) * static_cast<std::size_t>(p_ - 1);
  }

  friend class WeilRepresentation;
  int p_ = 0;
  std::size_t dim_ = 0;
  std::int64_t den_ = 1;
  std::vector<std::int64_t> num_;
};

/// A formula-covered generator.
struct Generator {
  enum class Kind { Heis, Unip, Levi, Weyl };
  Kind kind;
  Mat m;       // b, a or c
  HeisElem h;  // Heis only
  Mat matrix(int n) const;  // symplectic matrix (identity for Heis)
  std::string to_string() const;
};

/// Factorization certificate: the product of the generator matrices equals the factored element.
struct GeneratorWord {
  std::vector<Generator> gens;
  Mat product(const Tower& t, int n) const;
  std::string to_string() const;
};

class WeilRepresentation {
 public:
  /// Representation ρ_d of Sp_{2n}(F_{q^d}) ⋉ H for ψ_{d,a}(x) = ζ^{Tr(a x)}.
  WeilRepresentation(std::shared_ptr<const Tower> tower, int n, int level, FieldElem scale);

  const Tower& tower() const { return *tower_; }
  const std::shared_ptr<const Tower>& tower_ptr() const { return tower_; }
  int p() const { return tower_->p(); }
  int n() const { return n_; }
  int level() const { return level_; }
  const FieldElem& scale() const { return scale_; }
  std::size_t dim() const { return points_.size(); }

  /// Basis: X*(F_{q^d}) in canonical order, last coordinate fastest.
  const std::vector<Vec>& points() const { return points_; }
  std::uint32_t point_index(const Vec& y) const;
  /// perm[x] = index of σ^j(x).
  const std::vector<std::uint32_t>& galois_perm(long j) const;

  int psi(const FieldElem& x) const { return psi_tab_[tower_->level(level_).index_of(x)]; }
  int eps(const FieldElem& x) const { return tower_->quad_char(x, level_); }
  /// κ = (ε(2) G)^{-n}.
  const CycNum& weyl_constant() const { return kappa_; }
  /// G = Σ ψ(x²).
  const CycNum& gauss() const { return gauss_; }

  WeilOperator op_heis(const HeisElem& h) const;
  /// Throws NotSymplectic unless b is symmetric.
  WeilOperator op_unip(const Mat& b) const;
  /// Throws Singular.
  WeilOperator op_levi(const Mat& a) const;
  /// Throws NotSymplectic if c is singular.
  WeilOperator op_weyl(const Mat& c) const;
  WeilOperator op_galois(long j) const;
  WeilOperator op_generator(const Generator& g) const;

  /// Throws NotSymplectic, FactorizationFailed.
  GeneratorWord siegel_factor(const Mat& g) const;

  /// ρ(s, h) = ρ(h) ρ(s). The symplectic part is memoized.
  WeilOperator build_rho(const GElem& g) const;
  WeilOperator build_rho_matrix(const Mat& s) const;
  std::shared_ptr<const WeilOperator> rho_matrix_cached(const Mat& s) const;

  /// tr(ρ(g) I_σ^i).
  CycNum extended_trace(int i, const GElem& g) const;
  CycNum trace(const GElem& g) const { return extended_trace(0, g); }

  std::size_t cache_size() const;
  /// Operator cache file: header with the tower and parameters, then one
  /// record per memoized element.
  void save_cache(const std::string& path) const;
  /// Returns the number of records loaded; mismatching headers load nothing.
  std::size_t load_cache(const std::string& path) const;

 private:
  std::string key_of(const Mat& s) const;
  std::string header() const;

  std::shared_ptr<const Tower> tower_;
  int n_;
  int level_;
  FieldElem scale_;
  std::vector<Vec> points_;
  std::vector<std::uint8_t> psi_tab_;
  CycNum gauss_;
  CycNum kappa_;
  mutable std::mutex mu_;
  mutable std::map<long, std::vector<std::uint32_t>> perms_;
  mutable std::map<std::string, std::shared_ptr<const WeilOperator>> cache_;
};

/// Value at x ∈ GSp(F_{q^d}) of π = Ind_{Sp}^{GSp} ρ|_{Sp}: Σ_λ χ̇(δ_λ⁻¹ x δ_λ).
CycNum gsp_character(const WeilRepresentation& rep, const Mat& x);
/// Value at (σ^i, g') of the representation of Γ ⋉ GSp(F') induced from ρ̃'.
CycNum extended_gsp_trace(const WeilRepresentation& rep_top, int i, const Mat& g);

}  // namespace weilbc
