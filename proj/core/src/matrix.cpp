#include "weilbc/matrix.hpp"

#include "weilbc/error.hpp"

namespace weilbc {

Mat::Mat(const Tower& tower, int rows, int cols)
    : tower_(&tower), rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, tower.zero()) {}

Mat Mat::identity(const Tower& tower, int n) {
  Mat m(tower, n, n);
  for (int k = 0; k < n; ++k) m.at(k, k) = tower.one();
  return m;
}

Mat Mat::scalar(const FieldElem& c, int n) {
  Mat m(*c.tower(), n, n);
  for (int k = 0; k < n; ++k) m.at(k, k) = c;
  return m;
}

Mat Mat::from_rows(const Tower& tower, const std::vector<std::vector<int>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows[0].size()) : 0;
  Mat m(tower, r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw DimensionMismatch("ragged rows");
    for (int j = 0; j < c; ++j) m.at(i, j) = tower.from_int(rows[i][j]);
  }
  return m;
}

Mat Mat::operator*(const Mat& o) const {
  if (cols_ != o.rows_) throw DimensionMismatch("matrix product shapes");
  Mat r(*tower_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const FieldElem& x = at(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j) r.at(i, j) += x * o.at(k, j);
    }
  return r;
}

Mat Mat::operator+(const Mat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix sum shapes");
  Mat r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] += o.a_[k];
  return r;
}

Mat Mat::operator-(const Mat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix difference shapes");
  Mat r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] -= o.a_[k];
  return r;
}

Mat Mat::operator-() const {
  Mat r = *this;
  for (auto& x : r.a_) x = -x;
  return r;
}

Mat Mat::scaled(const FieldElem& c) const {
  Mat r = *this;
  for (auto& x : r.a_) x *= c;
  return r;
}

Vec Mat::apply(const Vec& v) const {
  if (static_cast<int>(v.size()) != cols_) throw DimensionMismatch("matrix-vector shapes");
  Vec out(static_cast<std::size_t>(rows_), tower_->zero());
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out[i] += at(i, j) * v[j];
  return out;
}

Mat Mat::transpose() const {
  Mat r(*tower_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

FieldElem Mat::det() const {
  if (rows_ != cols_) throw DimensionMismatch("determinant of non-square matrix");
  const int n = rows_;
  if (n == 1) return at(0, 0);
  if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  Mat m = *this;
  FieldElem d = tower_->one();
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (!m.at(r, c).is_zero()) { piv = r; break; }
    if (piv < 0) return tower_->zero();
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(c, j));
      d = -d;
    }
    d *= m.at(c, c);
    const FieldElem inv = m.at(c, c).inverse();
    for (int r = c + 1; r < n; ++r) {
      if (m.at(r, c).is_zero()) continue;
      const FieldElem f = m.at(r, c) * inv;
      for (int j = c; j < n; ++j) m.at(r, j) -= f * m.at(c, j);
    }
  }
  return d;
}

Mat Mat::inverse() const {
  if (rows_ != cols_) throw DimensionMismatch("inverse of non-square matrix");
  const int n = rows_;
  if (n == 2) {
    const FieldElem d = det();
    if (d.is_zero()) throw Singular("matrix is singular");
    const FieldElem di = d.inverse();
    Mat r(*tower_, 2, 2);
    r.at(0, 0) = at(1, 1) * di;
    r.at(0, 1) = -at(0, 1) * di;
    r.at(1, 0) = -at(1, 0) * di;
    r.at(1, 1) = at(0, 0) * di;
    return r;
  }
  Mat m = *this;
  Mat inv = identity(*tower_, n);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (!m.at(r, c).is_zero()) { piv = r; break; }
    if (piv < 0) throw Singular("matrix is singular");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(m.at(piv, j), m.at(c, j));
        std::swap(inv.at(piv, j), inv.at(c, j));
      }
    const FieldElem pi = m.at(c, c).inverse();
    for (int j = 0; j < n; ++j) {
      m.at(c, j) *= pi;
      inv.at(c, j) *= pi;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || m.at(r, c).is_zero()) continue;
      const FieldElem f = m.at(r, c);
      for (int j = 0; j < n; ++j) {
        m.at(r, j) -= f * m.at(c, j);
        inv.at(r, j) -= f * inv.at(c, j);
      }
    }
  }
  return inv;
}

bool Mat::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

bool Mat::is_identity() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (i == j ? !at(i, j).is_one() : !at(i, j).is_zero()) return false;
  return true;
}

Mat Mat::frobenius(long j) const {
  Mat r = *this;
  for (auto& x : r.a_) x = tower_->frobenius(x, j);
  return r;
}

bool Mat::in_level(int d) const {
  for (const auto& x : a_)
    if (!tower_->in_level(x, d)) return false;
  return true;
}

Mat Mat::block(int r0, int c0, int nr, int nc) const {
  Mat r(*tower_, nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
  return r;
}

void Mat::set_block(int r0, int c0, const Mat& b) {
  for (int i = 0; i < b.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) at(r0 + i, c0 + j) = b.at(i, j);
}

Mat Mat::from_blocks(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
  const int n = a.rows();
  Mat r(*a.tower(), 2 * n, 2 * n);
  r.set_block(0, 0, a);
  r.set_block(0, n, b);
  r.set_block(n, 0, c);
  r.set_block(n, n, d);
  return r;
}

std::strong_ordering operator<=>(const Mat& x, const Mat& y) {
  if (auto c = x.rows_ <=> y.rows_; c != 0) return c;
  if (auto c = x.cols_ <=> y.cols_; c != 0) return c;
  for (std::size_t k = 0; k < x.a_.size(); ++k)
    if (auto c = x.a_[k] <=> y.a_[k]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string Mat::to_string() const {
  std::string s = "[";
  for (int i = 0; i < rows_; ++i) {
    s += i ? ",[" : "[";
    for (int j = 0; j < cols_; ++j) s += (j ? "," : "") + at(i, j).to_string();
    s += "]";
  }
  return s + "]";
}

std::string Mat::entries_string() const {
  std::string s;
  for (std::size_t k = 0; k < a_.size(); ++k) s += (k ? "," : "") + a_[k].to_string();
  return s;
}

Vec vec_add(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
  return r;
}

Vec vec_neg(const Vec& a) {
  Vec r = a;
  for (auto& x : r) x = -x;
  return r;
}

Vec vec_frobenius(const Vec& a, long j) {
  Vec r = a;
  for (auto& x : r) x = x.tower()->frobenius(x, j);
  return r;
}

Vec vec_zero(const Tower& t, int n) { return Vec(static_cast<std::size_t>(n), t.zero()); }

FieldElem dot(const Vec& a, const Vec& b) {
  FieldElem s = a.at(0).tower()->zero();
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(Mat& m, int ncols) {
  std::vector<int> pivots;
  int row = 0;
  for (int c = 0; c < ncols && row < m.rows(); ++c) {
    int piv = -1;
    for (int r = row; r < m.rows(); ++r)
      if (!m.at(r, c).is_zero()) { piv = r; break; }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m.at(piv, j), m.at(row, j));
    const FieldElem pi = m.at(row, c).inverse();
    for (int j = 0; j < m.cols(); ++j) m.at(row, j) *= pi;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || m.at(r, c).is_zero()) continue;
      const FieldElem f = m.at(r, c);
      for (int j = 0; j < m.cols(); ++j) m.at(r, j) -= f * m.at(row, j);
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

}  // namespace

int rank(Mat m) { return static_cast<int>(rref(m, m.cols()).size()); }

std::vector<Vec> kernel(const Mat& m0) {
  Mat m = m0;
  const auto pivots = rref(m, m.cols());
  std::vector<int> pivot_row(static_cast<std::size_t>(m.cols()), -1);
  for (std::size_t r = 0; r < pivots.size(); ++r) pivot_row[pivots[r]] = static_cast<int>(r);
  std::vector<Vec> out;
  const Tower& t = *m.tower();
  for (int f = 0; f < m.cols(); ++f) {
    if (pivot_row[f] >= 0) continue;
    Vec v = vec_zero(t, m.cols());
    v[f] = t.one();
    for (int c = 0; c < m.cols(); ++c)
      if (pivot_row[c] >= 0) v[c] = -m.at(pivot_row[c], f);
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<Vec> solve(const Mat& a, const Vec& b) {
  const Tower& t = *a.tower();
  Mat aug(t, a.rows(), a.cols() + 1);
  aug.set_block(0, 0, a);
  for (int r = 0; r < a.rows(); ++r) aug.at(r, a.cols()) = b[r];
  const auto pivots = rref(aug, a.cols());
  for (int r = static_cast<int>(pivots.size()); r < a.rows(); ++r)
    if (!aug.at(r, a.cols()).is_zero()) return std::nullopt;
  Vec x = vec_zero(t, a.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(static_cast<int>(r), a.cols());
  return x;
}

}  // namespace weilbc
