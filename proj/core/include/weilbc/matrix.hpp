#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "weilbc/fieldtower.hpp"

namespace weilbc {

using Vec = std::vector<FieldElem>;

/// Dense matrix over the ambient field of one tower.
class Mat {
 public:
  Mat() = default;
  Mat(const Tower& tower, int rows, int cols);
  static Mat identity(const Tower& tower, int n);
  static Mat scalar(const FieldElem& c, int n);
  static Mat from_rows(const Tower& tower, const std::vector<std::vector<int>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Tower* tower() const { return tower_; }

  FieldElem& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const FieldElem& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const boost::container::small_vector<FieldElem, 16>& entries() const { return a_; }

  Mat operator*(const Mat& o) const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat operator-() const;
  Mat scaled(const FieldElem& c) const;
  Vec apply(const Vec& v) const;

  Mat transpose() const;
  FieldElem det() const;
  /// Throws Singular.
  Mat inverse() const;
  bool invertible() const { return !det().is_zero(); }
  bool is_zero() const;
  bool is_identity() const;
  /// σ^j applied entrywise.
  Mat frobenius(long j) const;
  /// True when every entry lies in F_{q^d}.
  bool in_level(int d) const;

  Mat block(int r0, int c0, int nr, int nc) const;
  void set_block(int r0, int c0, const Mat& b);
  static Mat from_blocks(const Mat& a, const Mat& b, const Mat& c, const Mat& d);

  friend bool operator==(const Mat& x, const Mat& y) { return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_; }
  /// Canonical order: row-major lexicographic with entries in canonical field order.
  friend std::strong_ordering operator<=>(const Mat& x, const Mat& y);

  std::string to_string() const;
  /// Row-major entries separated by commas.
  std::string entries_string() const;

 private:
  const Tower* tower_ = nullptr;
  int rows_ = 0;
  int cols_ = 0;
  boost::container::small_vector<FieldElem, 16> a_;
};

Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_neg(const Vec& a);
Vec vec_frobenius(const Vec& a, long j);
Vec vec_zero(const Tower& t, int n);
FieldElem dot(const Vec& a, const Vec& b);

/// Row reduction over the ambient field; returns rank.
int rank(Mat m);
/// Kernel basis (column vectors).
std::vector<Vec> kernel(const Mat& m);
/// Solve m x = b; nullopt if inconsistent. Any solution is returned.
std::optional<Vec> solve(const Mat& m, const Vec& b);

}  // namespace weilbc
