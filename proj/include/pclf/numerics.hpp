#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pclf/error.hpp"

namespace pclf {

/// Numerical tolerances shared by the eigen-solvers, sampler and LMI checks.
struct Tolerances {
  double eig_rel = 1e-10;         // Jacobi off-diagonal stopping threshold (relative)
  double stable_margin = 1e-9;    // accepted samples satisfy rho < 1 - stable_margin
  double det_floor = 1e-9;        // accepted samples satisfy |det| > det_floor
  std::size_t max_draws = 1'000'000;
  double contraction_margin = 1e-12;
  std::size_t enumeration_cap = 10'000'000;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {
    if (n == 0) throw InvalidInput("matrix dimension must be at least 1");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows) : Matrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != n_) throw InvalidInput("matrix rows must have length " + std::to_string(n_));
      std::copy(r.begin(), r.end(), a_.begin() + i++ * n_);
    }
    check_finite();
  }
  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.n_) throw InvalidInput("matrix rows must have length " + std::to_string(m.n_));
      std::copy(rows[i].begin(), rows[i].end(), m.a_.begin() + i * m.n_);
    }
    m.check_finite();
    return m;
  }
  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diag(const std::vector<double>& d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t n() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  const std::vector<double>& data() const { return a_; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> r(n_);
    for (std::size_t i = 0; i < n_; ++i) r[i].assign(a_.begin() + i * n_, a_.begin() + (i + 1) * n_);
    return r;
  }

  Matrix transposed() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_finite() const {
    return std::all_of(a_.begin(), a_.end(), [](double x) { return std::isfinite(x); });
  }
  void check_finite() const {
    if (!is_finite()) throw InvalidInput("matrix has non-finite entries");
  }

  Matrix& operator+=(const Matrix& o) {
    same_dim(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    same_dim(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Matrix& operator*=(double c) {
    for (auto& x : a_) x *= c;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double c) { return a *= c; }
  friend Matrix operator*(double c, Matrix a) { return a *= c; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.same_dim(b);
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;

  double max_abs() const {
    double m = 0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  void same_dim(const Matrix& o) const {
    if (o.n_ != n_) throw InvalidInput("matrix dimension mismatch");
  }

  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Symmetric matrix; the input is symmetrized as (M + Mᵀ)/2 on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m) : m_(m.n()) {
    m.check_finite();
    const std::size_t n = m.n();
    for (std::size_t i = 0; i < n; ++i) {
      m_(i, i) = m(i, i);
      for (std::size_t j = i + 1; j < n; ++j) m_(i, j) = m_(j, i) = 0.5 * (m(i, j) + m(j, i));
    }
  }
  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t n() const { return m_.n(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

/// aᵀ p a, symmetrized.
inline SymMatrix congruence(const Matrix& a, const SymMatrix& p) { return SymMatrix(a.transposed() * p.matrix() * a); }

namespace detail {

inline double frobenius(const Matrix& a) {
  double s = 0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

/// Cyclic Jacobi on a copy of `a`; returns (eigenvalues, eigenvectors as columns).
inline std::pair<std::vector<double>, Matrix> jacobi(Matrix a, double rel_tol, bool want_vectors) {
  const std::size_t n = a.n();
  Matrix v = want_vectors ? Matrix::identity(n) : Matrix(1);
  const double scale = std::max(1.0, frobenius(a));
  const double target = rel_tol * 1e-3 * scale;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= target) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  return {d, v};
}

inline void balance(Matrix& a) {
  constexpr double radix = 2.0, sqrdx = radix * radix;
  const std::size_t n = a.n();
  for (bool done = false; !done;) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0, c = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity transforms.
inline void hessenberg(Matrix& a) {
  const std::size_t n = a.n();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0;
    std::size_t i = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x == 0.0) continue;
    for (i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = y;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

/// Francis double-shift QR on an upper Hessenberg matrix. nullopt when the
/// iteration budget runs out.
inline std::optional<std::vector<std::complex<double>>> hessenberg_eigvals(Matrix a, int max_its) {
  const int n = static_cast<int>(a.n());
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::complex<double>> w(n);
  double anorm = 0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  auto sign = [](double x, double y) { return y >= 0 ? std::abs(x) : -std::abs(x); };
  int nn = n - 1, l = 0;
  double t = 0, p = 0, q = 0, r = 0, s = 0, x = 0, y = 0, z = 0, ww = 0;
  while (nn >= 0) {
    int its = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        w[nn--] = x + t;
      } else {
        y = a(nn - 1, nn - 1);
        ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign(z, p);
            w[nn - 1] = w[nn] = x + z;
            if (z != 0.0) w[nn] = x - ww / z;
          } else {
            w[nn] = {x + p, -z};
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (its == max_its) return std::nullopt;
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

/// ‖A^(2^j)‖^(1/2^j) by repeated squaring with renormalization.
inline double gelfand_radius(const Matrix& a, int squarings = 40) {
  Matrix m = a;
  double log_scale = 0;  // m = A^(2^j) / exp(log_scale)
  double est = 0;
  for (int j = 0; j <= squarings; ++j) {
    const double nm = frobenius(m);
    if (nm == 0.0) return 0.0;
    est = std::exp((std::log(nm) + log_scale) / std::ldexp(1.0, j));
    m *= 1.0 / nm;
    log_scale += std::log(nm);
    m = m * m;
    log_scale *= 2;
  }
  return est;
}

}  // namespace detail

/// Eigenvalues in ascending order.
inline std::vector<double> sym_eigvals(const SymMatrix& s) {
  s.matrix().check_finite();
  auto d = detail::jacobi(s.matrix(), default_tolerances().eig_rel, false).first;
  std::sort(d.begin(), d.end());
  return d;
}

/// Ascending eigenvalues with matching orthonormal eigenvectors (columns of the matrix).
inline std::pair<std::vector<double>, Matrix> sym_eigen(const SymMatrix& s) {
  s.matrix().check_finite();
  auto [d, v] = detail::jacobi(s.matrix(), default_tolerances().eig_rel, true);
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  std::vector<double> ds(n);
  Matrix vs(n);
  for (std::size_t c = 0; c < n; ++c) {
    ds[c] = d[order[c]];
    for (std::size_t r = 0; r < n; ++r) vs(r, c) = v(r, order[c]);
  }
  return {ds, vs};
}

inline double min_eigval(const SymMatrix& s) { return sym_eigvals(s).front(); }
inline double max_eigval(const SymMatrix& s) { return sym_eigvals(s).back(); }

inline std::vector<std::complex<double>> eigvals(const Matrix& a) {
  a.check_finite();
  if (a.n() == 1) return {a(0, 0)};
  Matrix h = a;
  detail::balance(h);
  detail::hessenberg(h);
  const int n = static_cast<int>(a.n());
  auto w = detail::hessenberg_eigvals(h, std::max(30, 10 * n * n));
  if (!w) throw BudgetError("QR iteration did not converge");
  return *w;
}

inline double spectral_radius(const Matrix& a) {
  a.check_finite();
  if (a.n() == 1) return std::abs(a(0, 0));
  Matrix h = a;
  detail::balance(h);
  detail::hessenberg(h);
  const int n = static_cast<int>(a.n());
  auto w = detail::hessenberg_eigvals(h, std::max(30, 10 * n * n));
  if (!w) return detail::gelfand_radius(a);
  double r = 0;
  for (const auto& z : *w) r = std::max(r, std::abs(z));
  return r;
}

inline double operator_norm(const Matrix& a) {
  return std::sqrt(std::max(0.0, max_eigval(SymMatrix(a.transposed() * a))));
}

/// Determinant by LU with partial pivoting.
inline double det(const Matrix& a) {
  Matrix m = a;
  const std::size_t n = m.n();
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (m(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return d;
}

/// Lower Cholesky factor, or nullopt if `s` is not numerically positive definite.
inline std::optional<Matrix> cholesky(const SymMatrix& s) {
  const std::size_t n = s.n();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

/// Solve (L Lᵀ) x = b in place.
inline void cholesky_solve(const Matrix& l, std::vector<double>& b) {
  const std::size_t n = l.n();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
    b[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
    b[i] /= l(i, i);
  }
}

/// Reproducible uniform/normal stream. Output depends only on (seed, stream_index).
class RngStream {
 public:
  static constexpr const char* generator_id = "mt19937_64/splitmix64";

  RngStream(std::uint64_t seed, std::uint64_t stream_index)
      : seed_(seed), stream_index_(stream_index), eng_(mix(seed, stream_index)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Uniform in (0, 1), never 0 or 1.
  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box–Muller.
  double normal() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = uniform(), u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    spare_ = rad * std::sin(two_pi * u2);
    return rad * std::cos(two_pi * u2);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t idx) { return splitmix(splitmix(seed) ^ idx); }

  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 eng_;
  std::optional<double> spare_;
};

inline Matrix gaussian_matrix(std::size_t n, RngStream& rng) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.normal();
  return m;
}

inline bool is_stable_invertible(const Matrix& a, const Tolerances& tol = default_tolerances()) {
  return spectral_radius(a) < 1.0 - tol.stable_margin && std::abs(det(a)) > tol.det_floor;
}

struct SampledMatrices {
  std::vector<Matrix> matrices;
  std::size_t rejections = 0;
};

/// `count` Gaussian matrices, each redrawn until stable and invertible.
inline SampledMatrices sample_stable_invertible(std::size_t n, std::size_t count, RngStream& rng,
                                                const Tolerances& tol = default_tolerances()) {
  if (n == 0) throw InvalidInput("matrix dimension must be at least 1");
  SampledMatrices out;
  std::size_t draws = 0;
  while (out.matrices.size() < count) {
    if (draws++ >= tol.max_draws) throw BudgetError("rejection sampling exceeded " + std::to_string(tol.max_draws) + " draws");
    Matrix m = gaussian_matrix(n, rng);
    if (is_stable_invertible(m, tol)) {
      out.matrices.push_back(std::move(m));
    } else {
      ++out.rejections;
    }
  }
  return out;
}

inline SampledMatrices sample_stable_invertible_pair(std::size_t n, RngStream& rng,
                                                     const Tolerances& tol = default_tolerances()) {
  return sample_stable_invertible(n, 2, rng, tol);
}

}  // namespace pclf
