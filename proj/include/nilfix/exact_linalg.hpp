#pragma once

// Exact rational and integer-lattice linear algebra.
//
// Everything here is backed by GMP (mpz_class / mpq_class); no value in this
// library is ever rounded.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nilfix {

using Integer = mpz_class;
using Rational = mpq_class;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline Rational make_rational(const Integer& num, const Integer& den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses "p", "-p" or "p/q" (q > 0). Throws std::invalid_argument.
inline Rational parse_rational(std::string_view text) {
  auto is_digits = [](std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"}
                                                         : body.substr(slash + 1);
  if (!is_digits(num) || !is_digits(den))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  Integer n(std::string(num), 10);
  Integer d(std::string(den), 10);
  if (d == 0)
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return make_rational(negative ? Integer(-n) : n, d);
}

/// "p/q", or "p" when q = 1; sign on the numerator.
inline std::string to_string(const Rational& r) { return r.get_str(); }
inline std::string to_string(const Integer& z) { return z.get_str(); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline int sign(const Rational& r) { return sgn(r); }

// ---------------------------------------------------------------------------
// Extended values: a finite value or +infinity.

template <class T>
class Extended {
 public:
  Extended() = default;
  Extended(T value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)

  static Extended infinite() {
    Extended e;
    e.value_.reset();
    return e;
  }

  bool is_infinite() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }

  const T& value() const {
    if (!value_) throw std::logic_error("value() of an infinite extended number");
    return *value_;
  }

  std::string to_string() const {
    return value_ ? nilfix::to_string(*value_) : std::string("infinite");
  }

  friend Extended operator+(const Extended& a, const Extended& b) {
    if (a.is_infinite() || b.is_infinite()) return infinite();
    return Extended(T(*a.value_ + *b.value_));
  }

  // Infinite * 0 never arises from a class count; treat it as a logic error.
  friend Extended operator*(const Extended& a, const Extended& b) {
    if (a.is_infinite() || b.is_infinite()) {
      const Extended& other = a.is_infinite() ? b : a;
      if (other.is_finite() && *other.value_ == 0)
        throw std::logic_error("product of infinite and zero count");
      return infinite();
    }
    return Extended(T(*a.value_ * *b.value_));
  }

  Extended& operator+=(const Extended& o) { return *this = *this + o; }
  Extended& operator*=(const Extended& o) { return *this = *this * o; }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite();
    return *a.value_ == *b.value_;
  }

  friend std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
    if (a.is_infinite()) return std::strong_ordering::greater;
    if (b.is_infinite()) return std::strong_ordering::less;
    int c = cmp(*a.value_, *b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  std::optional<T> value_ = T(0);
};

using ExtendedCount = Extended<Integer>;
using ExtendedRational = Extended<Rational>;

/// |a| for a != 0, infinity for a = 0.
inline ExtendedRational abs_inf(const Rational& a) {
  if (a == 0) return ExtendedRational::infinite();
  return ExtendedRational(Rational(abs(a)));
}

/// Converts an extended rational that must be integral into a count.
inline ExtendedCount to_count(const ExtendedRational& r) {
  if (r.is_infinite()) return ExtendedCount::infinite();
  if (!is_integer(r.value()))
    throw std::logic_error("non-integral class count " + r.to_string());
  return ExtendedCount(Integer(r.value().get_num()));
}

// ---------------------------------------------------------------------------
// Dense row-major matrices.

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionError("matrix entry count does not match its shape");
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionError("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix diagonal(std::span<const T> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> entries() const { return data_; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }
  // row[dst] += factor * row[src]
  void add_row(std::size_t dst, std::size_t src, const T& factor) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += factor * (*this)(src, c);
  }
  void add_col(std::size_t dst, std::size_t src, const T& factor) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += factor * (*this)(r, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
      }
    return out;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    a.require_same_shape(b);
    Matrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
    return out;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    a.require_same_shape(b);
    Matrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
    return out;
  }

  std::vector<T> apply(std::span<const T> v) const {
    if (v.size() != cols_) throw DimensionError("matrix-vector shape mismatch");
    std::vector<T> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

 private:
  void require_same_shape(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using IntegerMatrix = Matrix<Integer>;

inline RationalMatrix to_rational(const IntegerMatrix& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = Rational(m(r, c));
  return out;
}

inline bool is_integral(const RationalMatrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(),
                     [](const Rational& q) { return is_integer(q); });
}

inline IntegerMatrix to_integer(const RationalMatrix& m) {
  if (!is_integral(m)) throw std::domain_error("matrix has non-integral entries");
  IntegerMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).get_num();
  return out;
}

/// I - m
inline RationalMatrix identity_minus(const RationalMatrix& m) {
  if (!m.is_square()) throw DimensionError("identity_minus of a non-square matrix");
  return RationalMatrix::identity(m.rows()) - m;
}

/// Exact determinant by Gaussian elimination over Q.
inline Rational det(RationalMatrix m) {
  if (!m.is_square()) throw DimensionError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  Rational result = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m(pivot, col) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      m.swap_rows(pivot, col);
      result = -result;
    }
    result *= m(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m(r, col) == 0) continue;
      Rational factor = m(r, col) / m(col, col);
      m.add_row(r, col, Rational(-factor));
    }
  }
  return result;
}

/// Exact determinant of an integer matrix by Bareiss fraction-free elimination.
inline Integer det(IntegerMatrix m) {
  if (!m.is_square()) throw DimensionError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Integer previous = 1;
  int sign_flip = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      m.swap_rows(swap, k);
      sign_flip = -sign_flip;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), previous.get_mpz_t());
        m(i, j) = v;
      }
    previous = m(k, k);
  }
  return sign_flip * m(n - 1, n - 1);
}

/// Inverse over Q by Gauss-Jordan elimination. Throws std::domain_error if singular.
inline RationalMatrix inverse(const RationalMatrix& m) {
  if (!m.is_square()) throw DimensionError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  RationalMatrix a = m;
  RationalMatrix inv = RationalMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) throw std::domain_error("inverse of a singular matrix");
    a.swap_rows(pivot, col);
    inv.swap_rows(pivot, col);
    Rational scale = 1 / a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) *= scale;
      inv(col, c) *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      Rational factor = -a(r, col);
      a.add_row(r, col, factor);
      inv.add_row(r, col, factor);
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Smith normal form.

struct SmithDecomposition {
  IntegerMatrix left;      // U, unimodular
  IntegerMatrix diagonal;  // S = U * A * V
  IntegerMatrix right;     // V, unimodular
};

/// Diagonalizes a square integer matrix by unimodular row and column
/// operations, always pivoting on an entry of minimal nonzero absolute value.
/// The diagonal is non-negative and each entry divides the next.
inline SmithDecomposition smith_normal_form(const IntegerMatrix& a) {
  if (!a.is_square()) throw DimensionError("Smith normal form of a non-square matrix");
  const std::size_t n = a.rows();
  IntegerMatrix s = a;
  IntegerMatrix u = IntegerMatrix::identity(n);
  IntegerMatrix v = IntegerMatrix::identity(n);

  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      std::optional<std::pair<std::size_t, std::size_t>> best;
      for (std::size_t r = t; r < n; ++r)
        for (std::size_t c = t; c < n; ++c)
          if (s(r, c) != 0 && (!best || mpz_cmpabs(s(r, c).get_mpz_t(), s(best->first, best->second).get_mpz_t()) < 0))
            best = {r, c};
      if (!best) return {std::move(u), std::move(s), std::move(v)};

      s.swap_rows(t, best->first);
      u.swap_rows(t, best->first);
      s.swap_cols(t, best->second);
      v.swap_cols(t, best->second);

      bool clean = true;
      for (std::size_t r = t + 1; r < n; ++r) {
        if (s(r, t) == 0) continue;
        Integer q = s(r, t) / s(t, t);
        s.add_row(r, t, Integer(-q));
        u.add_row(r, t, Integer(-q));
        if (s(r, t) != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < n; ++c) {
        if (s(t, c) == 0) continue;
        Integer q = s(t, c) / s(t, t);
        s.add_col(c, t, Integer(-q));
        v.add_col(c, t, Integer(-q));
        if (s(t, c) != 0) clean = false;
      }
      if (!clean) continue;

      // Row and column t are cleared; enforce the divisibility chain.
      std::optional<std::size_t> offending;
      for (std::size_t r = t + 1; r < n && !offending; ++r)
        for (std::size_t c = t + 1; c < n; ++c)
          if (!mpz_divisible_p(s(r, c).get_mpz_t(), s(t, t).get_mpz_t())) {
            offending = r;
            break;
          }
      if (!offending) break;
      s.add_row(t, *offending, Integer(1));
      u.add_row(t, *offending, Integer(1));
    }
    if (s(t, t) < 0) {
      s.negate_row(t);
      u.negate_row(t);
    }
  }
  return {std::move(u), std::move(s), std::move(v)};
}

/// [Z^k : A Z^k], infinite when A is singular. Computed from the Smith
/// diagonal and cross-checked against the determinant.
inline ExtendedCount lattice_index(const IntegerMatrix& a) {
  SmithDecomposition snf = smith_normal_form(a);
  Integer product = 1;
  for (std::size_t i = 0; i < a.rows(); ++i) product *= snf.diagonal(i, i);
  Integer d = abs(det(a));
  if (product != d) throw std::logic_error("Smith diagonal disagrees with determinant");
  if (product == 0) return ExtendedCount::infinite();
  return ExtendedCount(product);
}

}  // namespace nilfix
