#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace relnorm {

// Small dense vector (ambient or parameter-space coordinates).
struct Vec {
    std::vector<double> c;

    Vec() = default;
    explicit Vec(std::size_t n, double fill = 0.0) : c(n, fill) {}
    Vec(std::initializer_list<double> init) : c(init) {}

    std::size_t size() const { return c.size(); }
    double& operator[](std::size_t i) { return c[i]; }
    double operator[](std::size_t i) const { return c[i]; }

    Vec& operator+=(const Vec& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (double& x : c) x *= s;
        return *this;
    }
};

inline Vec operator+(Vec a, const Vec& b) { a += b; return a; }
inline Vec operator-(Vec a, const Vec& b) { a -= b; return a; }
inline Vec operator*(double s, Vec a) { a *= s; return a; }
inline Vec operator*(Vec a, double s) { a *= s; return a; }
inline Vec operator/(Vec a, double s) { a *= 1.0 / s; return a; }
inline Vec operator-(Vec a) { a *= -1.0; return a; }

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Magnitude used for pivot selection; overloaded for jets in jet.hpp.
inline double pivot_mag(double x) { return std::abs(x); }

// Dense square matrix over a field-like scalar (double, or a jet).
template <class T>
class MatT {
public:
    MatT() = default;
    MatT(int n, const T& fill) : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}

    int dim() const { return n_; }
    T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

private:
    int n_ = 0;
    std::vector<T> a_;
};

using Mat = MatT<double>;

inline Mat identity(int n) {
    Mat m(n, 0.0);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

// Determinant by cofactor expansion along the first row.  Division-free on
// purpose: jet-valued matrices may have zero-valued entries whose derivative
// coefficients still matter, which rules out LU pivoting on values.
template <class T>
T det(const MatT<T>& m) {
    const int n = m.dim();
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    T acc = m(0, 0) * 0.0; // zero of the scalar type, matching layout for jets
    MatT<T> minor(n - 1, acc);
    for (int j = 0; j < n; ++j) {
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        T term = m(0, j) * det(minor);
        if (j % 2 == 0) acc += term;
        else acc -= term;
    }
    return acc;
}

// Inverse by Gauss-Jordan elimination with partial pivoting on the scalar
// magnitude (for jets: the magnitude of the value coefficient).  Requires the
// value matrix to be invertible; throws SingularMetric otherwise.
template <class T>
MatT<T> inverse(MatT<T> m) {
    const int n = m.dim();
    T zero = m(0, 0) * 0.0;
    T one = zero + 1.0;
    MatT<T> inv(n, zero);
    for (int i = 0; i < n; ++i) inv(i, i) = one;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = pivot_mag(m(col, col));
        for (int r = col + 1; r < n; ++r) {
            double mag = pivot_mag(m(r, col));
            if (mag > best) { best = mag; piv = r; }
        }
        if (best == 0.0) throw SingularMetric();
        if (piv != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(m(piv, c), m(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        }
        T p = m(col, col);
        for (int c = 0; c < n; ++c) {
            m(col, c) = m(col, c) / p;
            inv(col, c) = inv(col, c) / p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            T f = m(r, col);
            if (pivot_mag(f) == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                m(r, c) -= f * m(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

inline double inverse_residual(const Mat& a, const Mat& ainv) {
    const int n = a.dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = (i == j) ? -1.0 : 0.0;
            for (int k = 0; k < n; ++k) s += a(i, k) * ainv(k, j);
            worst = std::max(worst, std::abs(s));
        }
    }
    return worst;
}

// Inverse with a residual guard: rejects ill-conditioned value matrices.
inline Mat guarded_inverse(const Mat& a, double max_residual = 1e-8) {
    Mat inv = inverse(a);
    double res = inverse_residual(a, inv);
    if (res > max_residual) throw IllConditioned(res);
    return inv;
}

inline Vec mat_vec(const Mat& m, const Vec& v) {
    const int n = m.dim();
    Vec out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += m(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    const int n = a.dim();
    Mat out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double aik = a(i, k);
            for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

// Scale-aware residual |lhs - rhs| / (1 + |lhs| + |rhs|): behaves like an
// absolute error near zero and a relative error for large operands.
inline double normalized_residual(double lhs, double rhs) {
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
}

inline double normalized_residual(const Vec& lhs, const Vec& rhs) {
    return norm(lhs - rhs) / (1.0 + norm(lhs) + norm(rhs));
}

inline double normalized_residual(const Mat& lhs, const Mat& rhs) {
    const int n = lhs.dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) worst = std::max(worst, normalized_residual(lhs(i, j), rhs(i, j)));
    return worst;
}

} // namespace relnorm
